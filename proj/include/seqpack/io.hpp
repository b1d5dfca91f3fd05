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

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "seqpack/error.hpp"

namespace seqpack {

// Writes through `fill` into a sibling temp file, then renames it over `path`,
// so readers never observe a partially written file.
inline void
write_file_atomic(const std::filesystem::path &path, const std::function<void(std::ostream &)> &fill)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());

    {
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        if (!out)
            throw io_error{"cannot open '" + tmp.string() + "' for writing"};
        try {
            fill(out);
        } catch (...) {
            out.close();
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw;
        }
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw io_error{"write failed for '" + tmp.string() + "'"};
        }
    }

    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw io_error{"cannot rename '" + tmp.string() + "' to '" + path.string() + "'"};
    }
}

inline void
write_file_atomic(const std::filesystem::path &path, const std::string &content)
{
    write_file_atomic(path, [&](std::ostream &out) { out << content; });
}

}  // namespace seqpack
