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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "seqpack/error.hpp"
#include "seqpack/types.hpp"

namespace seqpack {

enum class ingest_mode { lengths_only, full };

namespace detail {

inline std::string
line_prefix(const std::string &source, std::uint64_t line_no)
{
    return source + ":" + std::to_string(line_no) + ": ";
}

inline std::uint64_t
file_size_or_throw(const std::filesystem::path &path, const std::string &where)
{
    std::error_code ec;
    auto size = std::filesystem::file_size(path, ec);
    if (ec)
        throw corpus_error{where + "unresolvable token_ref: cannot open '" + path.string() + "'"};
    return size;
}

}  // namespace detail

// Reads line-delimited JSON corpus records:
//
//   {"doc_id": "a", "length": 3}
//   {"doc_id": "b", "length": 4, "token_file": "tokens.bin", "offset": 12}
//
// `offset` is a byte offset into `token_file`, which holds little-endian uint32
// token ids; relative token paths resolve against `base_dir`. Blank lines are
// skipped. In lengths_only mode token locators are ignored.
inline std::vector<document_record>
ingest_corpus(std::istream &in,
              ingest_mode mode,
              const std::filesystem::path &base_dir = {},
              const std::string &source_name = "<corpus>")
{
    std::vector<document_record> docs;
    std::unordered_set<std::string> seen;
    std::map<std::string, std::uint64_t> file_sizes;

    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;

        const std::string where = detail::line_prefix(source_name, line_no);

        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error &e) {
            throw corpus_error{where + "malformed record: " + e.what()};
        }
        if (!rec.is_object())
            throw corpus_error{where + "malformed record: expected a JSON object"};

        document_record doc;

        auto id = rec.find("doc_id");
        if (id == rec.end())
            throw corpus_error{where + "malformed record: missing doc_id"};
        if (id->is_string())
            doc.doc_id = id->get<std::string>();
        else if (id->is_number_unsigned())
            doc.doc_id = std::to_string(id->get<std::uint64_t>());
        else
            throw corpus_error{where + "malformed record: doc_id must be a string or ordinal"};
        if (doc.doc_id.empty())
            throw corpus_error{where + "malformed record: empty doc_id"};

        auto len = rec.find("length");
        if (len == rec.end() || !len->is_number_integer())
            throw corpus_error{where + "malformed record: length must be an integer"};
        if (len->is_number_unsigned() ? len->get<std::uint64_t>() == 0 : len->get<std::int64_t>() < 1)
            throw corpus_error{where + "non-positive length for doc_id '" + doc.doc_id + "'"};
        doc.length = len->get<std::uint64_t>();

        if (mode == ingest_mode::full) {
            auto file = rec.find("token_file");
            if (file == rec.end() || !file->is_string())
                throw corpus_error{where + "unresolvable token_ref: missing token_file for doc_id '" +
                                   doc.doc_id + "'"};
            std::uint64_t offset = 0;
            if (auto off = rec.find("offset"); off != rec.end()) {
                if (!off->is_number_unsigned())
                    throw corpus_error{where + "malformed record: offset must be a non-negative integer"};
                offset = off->get<std::uint64_t>();
            }

            std::filesystem::path path = file->get<std::string>();
            if (path.is_relative() && !base_dir.empty())
                path = base_dir / path;
            path = path.lexically_normal();

            auto [it, inserted] = file_sizes.try_emplace(path.string(), 0);
            if (inserted)
                it->second = detail::file_size_or_throw(path, where);

            if (offset % sizeof(token_id) != 0)
                throw corpus_error{where + "unresolvable token_ref: offset " + std::to_string(offset) +
                                   " is not 4-byte aligned"};
            if (offset + doc.length * sizeof(token_id) > it->second)
                throw corpus_error{where + "unresolvable token_ref: '" + path.string() +
                                   "' is too short for doc_id '" + doc.doc_id + "'"};

            doc.tokens = token_ref{path.string(), offset};
        }

        if (!seen.insert(doc.doc_id).second)
            throw corpus_error{where + "duplicate doc_id '" + doc.doc_id + "'"};

        docs.push_back(std::move(doc));
    }

    return docs;
}

inline std::vector<document_record>
ingest_corpus_file(const std::filesystem::path &path, ingest_mode mode)
{
    std::ifstream in{path};
    if (!in)
        throw corpus_error{"cannot open corpus file '" + path.string() + "'"};

    return ingest_corpus(in, mode, path.parent_path(), path.string());
}

// Ingests several sources concurrently and concatenates them in declared order.
// doc_id uniqueness is enforced across all sources.
inline std::vector<document_record>
ingest_corpus_files(const std::vector<std::filesystem::path> &paths, ingest_mode mode)
{
    std::vector<std::future<std::vector<document_record>>> parts;
    parts.reserve(paths.size());
    for (const auto &p : paths)
        parts.push_back(std::async(std::launch::async, [&p, mode] { return ingest_corpus_file(p, mode); }));

    std::vector<document_record> all;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (auto &doc : parts[i].get()) {
            if (!seen.insert(doc.doc_id).second)
                throw corpus_error{paths[i].string() + ": duplicate doc_id '" + doc.doc_id +
                                   "' across sources"};
            all.push_back(std::move(doc));
        }
    }
    return all;
}

// Random access to token ids behind a token_ref.
class token_source {
public:
    virtual ~token_source() = default;

    // Returns `count` ids starting `start` tokens past the ref's offset.
    virtual std::vector<token_id>
    read(const token_ref &ref, token_count start, token_count count) const = 0;
};

// Loads each referenced file once and serves reads from memory.
class file_token_store final : public token_source {
public:
    std::vector<token_id>
    read(const token_ref &ref, token_count start, token_count count) const override
    {
        const std::vector<token_id> &ids = load(ref.file);

        std::uint64_t first = ref.byte_offset / sizeof(token_id) + start;
        if (ref.byte_offset % sizeof(token_id) != 0 || first + count > ids.size())
            throw data_error{"token_ref out of range in '" + ref.file + "'"};

        return {ids.begin() + static_cast<std::ptrdiff_t>(first),
                ids.begin() + static_cast<std::ptrdiff_t>(first + count)};
    }

private:
    const std::vector<token_id> &
    load(const std::string &file) const
    {
        std::lock_guard lock{mu_};

        auto it = cache_.find(file);
        if (it != cache_.end())
            return it->second;

        std::ifstream in{file, std::ios::binary};
        if (!in)
            throw data_error{"token_ref resolution failure: cannot open '" + file + "'"};

        std::vector<unsigned char> bytes{std::istreambuf_iterator<char>{in}, {}};
        std::vector<token_id> ids(bytes.size() / sizeof(token_id));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const unsigned char *p = bytes.data() + i * 4;
            ids[i] = static_cast<token_id>(p[0]) | static_cast<token_id>(p[1]) << 8 |
                     static_cast<token_id>(p[2]) << 16 | static_cast<token_id>(p[3]) << 24;
        }
        return cache_.emplace(file, std::move(ids)).first->second;
    }

    mutable std::mutex mu_;
    mutable std::map<std::string, std::vector<token_id>> cache_;
};

inline void
write_token_file(const std::filesystem::path &path, std::span<const token_id> ids)
{
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out)
        throw io_error{"cannot write token file '" + path.string() + "'"};

    for (token_id id : ids) {
        const char bytes[4] = {
            static_cast<char>(id & 0xFF),
            static_cast<char>((id >> 8) & 0xFF),
            static_cast<char>((id >> 16) & 0xFF),
            static_cast<char>((id >> 24) & 0xFF),
        };
        out.write(bytes, 4);
    }
    if (!out)
        throw io_error{"write failed for token file '" + path.string() + "'"};
}

}  // namespace seqpack
