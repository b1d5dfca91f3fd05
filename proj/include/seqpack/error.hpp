/* Copyright 2026 The seqpack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace seqpack {

// Broad failure class; the CLI maps each one to a stable exit code.
enum class error_kind {
    config = 1,        // invalid PackingConfig or conflicting options
    corpus = 2,        // malformed or unresolvable corpus input
    precondition = 3,  // strategy precondition violated (over-capacity item)
    data = 4,          // manifest/stream mismatch, checksum, truncation
    io = 5,            // filesystem or sink failure
};

class error : public std::runtime_error {
public:
    error(error_kind kind, const std::string &what)
      : std::runtime_error{what}, kind_{kind}
    {}

    error_kind kind() const noexcept { return kind_; }

private:
    error_kind kind_;
};

class config_error : public error {
public:
    explicit config_error(const std::string &what) : error{error_kind::config, what} {}
};

class corpus_error : public error {
public:
    explicit corpus_error(const std::string &what) : error{error_kind::corpus, what} {}
};

class precondition_error : public error {
public:
    explicit precondition_error(const std::string &what)
      : error{error_kind::precondition, what}
    {}
};

class data_error : public error {
public:
    explicit data_error(const std::string &what) : error{error_kind::data, what} {}
};

class io_error : public error {
public:
    explicit io_error(const std::string &what) : error{error_kind::io, what} {}
};

}  // namespace seqpack
