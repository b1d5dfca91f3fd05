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

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqpack/corpus.hpp"
#include "seqpack/error.hpp"
#include "seqpack/types.hpp"

namespace seqpack {

// Packed sample file, little-endian throughout (see docs/sample_format.md):
//
//   header   32 bytes: "SQPK", u32 version, u32 context_length, u32 plane_flags,
//            u64 sample_count, u32 separator_id, u32 padding_id
//   record   per sample, in sample_index order:
//            token plane    context_length x u32
//            mask plane     context_length x u8   (1 = trained, 0 = masked)
//            boundary plane u16 count, count x u32 in-sample placement offsets
//   trailer  sample_count x u64 record byte offsets, u64 checksum, "SQPE"
//
// The checksum is 64-bit FNV-1a over every record byte in file order.
namespace sample_format {
inline constexpr std::array<char, 4> magic{'S', 'Q', 'P', 'K'};
inline constexpr std::array<char, 4> end_magic{'S', 'Q', 'P', 'E'};
inline constexpr std::uint32_t version = 1;
inline constexpr std::size_t header_size = 32;

inline constexpr std::uint32_t token_plane = 1u << 0;
inline constexpr std::uint32_t mask_plane = 1u << 1;
inline constexpr std::uint32_t boundary_plane = 1u << 2;
inline constexpr std::uint32_t all_planes = token_plane | mask_plane | boundary_plane;

inline constexpr std::uint64_t fnv_offset_basis = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t fnv_prime = 0x100000001b3ull;
}  // namespace sample_format

class fnv1a64 {
public:
    void
    update(std::span<const unsigned char> bytes) noexcept
    {
        for (unsigned char b : bytes) {
            state_ ^= b;
            state_ *= sample_format::fnv_prime;
        }
    }

    std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = sample_format::fnv_offset_basis;
};

struct emit_options {
    // Separators get loss mask 1 when true; padding is always masked.
    bool train_separators = true;
};

struct emission_summary {
    std::uint64_t samples_written = 0;
    std::uint64_t tokens_written = 0;
    std::uint64_t bytes_written = 0;
    std::uint64_t masked_tokens = 0;
    std::uint64_t checksum = sample_format::fnv_offset_basis;
};

namespace detail {

class byte_writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }

    void
    u16(std::uint16_t v)
    {
        buf_.push_back(static_cast<unsigned char>(v));
        buf_.push_back(static_cast<unsigned char>(v >> 8));
    }

    void
    u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i)
            buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }

    void
    u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i)
            buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }

    void raw(std::span<const char> bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }

    std::span<const unsigned char> bytes() const noexcept { return buf_; }
    void clear() noexcept { buf_.clear(); }

private:
    std::vector<unsigned char> buf_;
};

inline void
write_bytes(std::ostream &out, std::span<const unsigned char> bytes)
{
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw io_error{"sink write failure"};
}

inline std::uint64_t
load_le(const unsigned char *p, int n) noexcept
{
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
        v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

class byte_reader {
public:
    explicit byte_reader(std::istream &in) : in_{in} {}

    // Reads exactly n bytes or throws "stream truncation".
    const unsigned char *
    take(std::size_t n)
    {
        buf_.resize(n);
        in_.read(reinterpret_cast<char *>(buf_.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw data_error{"stream truncation"};
        return buf_.data();
    }

    std::span<const unsigned char> last() const noexcept { return buf_; }

    std::uint16_t u16() { return static_cast<std::uint16_t>(load_le(take(2), 2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(load_le(take(4), 4)); }
    std::uint64_t u64() { return load_le(take(8), 8); }

private:
    std::istream &in_;
    std::vector<unsigned char> buf_;
};

}  // namespace detail

// Renders every sample of `manifest` into `sink`. `documents` are the retained
// records (after the long-document policy) whose token_refs back the placements.
inline emission_summary
emit_samples(const packing_manifest &manifest,
             std::span<const document_record> documents,
             const token_source &tokens,
             std::ostream &sink,
             const emit_options &opts = {})
{
    const packing_config &cfg = manifest.config;
    const token_count cap = cfg.context_length;

    std::unordered_map<std::string_view, const document_record *> by_id;
    by_id.reserve(documents.size());
    for (const auto &doc : documents)
        by_id.emplace(doc.doc_id, &doc);

    emission_summary summary;
    fnv1a64 hash;
    detail::byte_writer w;

    w.raw(sample_format::magic);
    w.u32(sample_format::version);
    w.u32(static_cast<std::uint32_t>(cap));
    w.u32(sample_format::all_planes);
    w.u64(manifest.samples.size());
    w.u32(cfg.separator_id);
    w.u32(cfg.padding_id);
    detail::write_bytes(sink, w.bytes());
    summary.bytes_written += w.bytes().size();

    std::vector<std::uint64_t> record_offsets;
    record_offsets.reserve(manifest.samples.size());

    std::vector<token_id> ids(cap);
    std::vector<std::uint8_t> mask(cap);

    for (const auto &s : manifest.samples) {
        std::fill(ids.begin(), ids.end(), cfg.padding_id);
        std::fill(mask.begin(), mask.end(), std::uint8_t{0});

        if (s.placements.size() > 0xFFFF)
            throw data_error{"sample " + std::to_string(s.sample_index) +
                             " has more placements than the 16-bit boundary plane can hold"};

        for (const auto &p : s.placements) {
            auto it = by_id.find(p.doc_id);
            if (it == by_id.end())
                throw data_error{"manifest/corpus mismatch: unknown doc_id '" + p.doc_id + "'"};
            const document_record &doc = *it->second;
            if (doc.length != p.doc_length || p.end > doc.length || p.offset + p.size() > cap)
                throw data_error{"manifest/corpus mismatch for doc_id '" + p.doc_id + "'"};
            if (!doc.tokens)
                throw data_error{"token_ref resolution failure: doc_id '" + p.doc_id +
                                 "' has no token_ref (lengths-only corpus)"};

            std::vector<token_id> part = tokens.read(*doc.tokens, p.start, p.size());
            std::copy(part.begin(), part.end(), ids.begin() + static_cast<std::ptrdiff_t>(p.offset));
            std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(p.offset), p.size(), std::uint8_t{1});
        }
        for (token_count pos : s.separator_positions) {
            if (pos >= cap)
                throw data_error{"manifest/corpus mismatch: separator outside sample"};
            ids[pos] = cfg.separator_id;
            mask[pos] = opts.train_separators ? 1 : 0;
        }

        w.clear();
        for (token_id id : ids)
            w.u32(id);
        for (std::uint8_t m : mask)
            w.u8(m);
        w.u16(static_cast<std::uint16_t>(s.placements.size()));
        for (const auto &p : s.placements)
            w.u32(static_cast<std::uint32_t>(p.offset));

        record_offsets.push_back(summary.bytes_written);
        hash.update(w.bytes());
        detail::write_bytes(sink, w.bytes());

        summary.bytes_written += w.bytes().size();
        summary.samples_written += 1;
        summary.tokens_written += cap;
        summary.masked_tokens += static_cast<std::uint64_t>(std::count(mask.begin(), mask.end(), 0));
    }

    w.clear();
    for (std::uint64_t off : record_offsets)
        w.u64(off);
    w.u64(hash.digest());
    w.raw(sample_format::end_magic);
    detail::write_bytes(sink, w.bytes());
    summary.bytes_written += w.bytes().size();

    sink.flush();
    if (!sink)
        throw io_error{"sink write failure"};

    summary.checksum = hash.digest();
    return summary;
}

struct decoded_document {
    std::string doc_id;
    token_count length = 0;
    // Covered prefix of the document; complete iff tokens.size() == length.
    std::vector<token_id> tokens;

    bool complete() const noexcept { return tokens.size() == length; }
};

struct decoded_stream {
    std::vector<decoded_document> documents;
    std::uint64_t masked_tokens = 0;
    std::uint64_t checksum = 0;
};

// Reads a stream written by emit_samples for `manifest` and reassembles each
// placed document by writing every placement's tokens at its document range.
// Documents appear in order of first placement.
inline decoded_stream
decode_samples(std::istream &stream, const packing_manifest &manifest)
{
    const packing_config &cfg = manifest.config;
    const token_count cap = cfg.context_length;

    detail::byte_reader r{stream};

    const unsigned char *head = r.take(sample_format::header_size);
    if (std::memcmp(head, sample_format::magic.data(), 4) != 0)
        throw data_error{"not a packed sample stream (bad magic)"};
    if (detail::load_le(head + 4, 4) != sample_format::version)
        throw data_error{"unsupported sample stream version"};
    if (detail::load_le(head + 8, 4) != cap || detail::load_le(head + 16, 8) != manifest.samples.size() ||
        detail::load_le(head + 24, 4) != cfg.separator_id || detail::load_le(head + 28, 4) != cfg.padding_id)
        throw data_error{"manifest/stream mismatch: header disagrees with manifest"};
    const auto flags = static_cast<std::uint32_t>(detail::load_le(head + 12, 4));
    if (flags != sample_format::all_planes)
        throw data_error{"unsupported plane flags"};

    struct partial_doc {
        decoded_document doc;
        std::vector<bool> seen;
    };
    std::vector<partial_doc> docs;
    std::unordered_map<std::string_view, std::size_t> index;

    decoded_stream out;
    fnv1a64 hash;
    std::uint64_t offset = sample_format::header_size;
    std::vector<std::uint64_t> record_offsets;

    for (const auto &s : manifest.samples) {
        const std::size_t record_size = cap * 5 + 2 + 4 * s.placements.size();
        const unsigned char *rec = r.take(record_size);
        hash.update(r.last());
        record_offsets.push_back(offset);
        offset += record_size;

        const unsigned char *id_plane = rec;
        const unsigned char *mask_plane = rec + cap * 4;
        const unsigned char *bounds = mask_plane + cap;

        auto id_at = [&](token_count i) { return static_cast<token_id>(detail::load_le(id_plane + 4 * i, 4)); };

        if (detail::load_le(bounds, 2) != s.placements.size())
            throw data_error{"manifest/stream mismatch: boundary count in sample " +
                             std::to_string(s.sample_index)};

        for (token_count i = s.padding_begin; i < cap; ++i) {
            if (id_at(i) != cfg.padding_id || mask_plane[i] != 0)
                throw data_error{"manifest/stream mismatch: padding in sample " + std::to_string(s.sample_index)};
        }
        for (token_count i = 0; i < cap; ++i)
            out.masked_tokens += mask_plane[i] == 0 ? 1 : 0;
        for (token_count pos : s.separator_positions) {
            if (id_at(pos) != cfg.separator_id)
                throw data_error{"manifest/stream mismatch: separator in sample " +
                                 std::to_string(s.sample_index)};
        }

        for (std::size_t k = 0; k < s.placements.size(); ++k) {
            const placement &p = s.placements[k];
            if (detail::load_le(bounds + 2 + 4 * k, 4) != p.offset)
                throw data_error{"manifest/stream mismatch: boundary offset in sample " +
                                 std::to_string(s.sample_index)};

            auto [it, inserted] = index.try_emplace(p.doc_id, docs.size());
            if (inserted) {
                partial_doc pd;
                pd.doc.doc_id = p.doc_id;
                pd.doc.length = p.doc_length;
                pd.doc.tokens.assign(p.doc_length, 0);
                pd.seen.assign(p.doc_length, false);
                docs.push_back(std::move(pd));
            }
            partial_doc &pd = docs[it->second];
            for (token_count t = 0; t < p.size(); ++t) {
                token_id id = id_at(p.offset + t);
                if (mask_plane[p.offset + t] != 1)
                    throw data_error{"manifest/stream mismatch: document token masked in sample " +
                                     std::to_string(s.sample_index)};
                token_count at = p.start + t;
                if (pd.seen[at] && pd.doc.tokens[at] != id)
                    throw data_error{"manifest/stream mismatch: conflicting copies of doc_id '" +
                                     p.doc_id + "'"};
                pd.doc.tokens[at] = id;
                pd.seen[at] = true;
            }
        }
    }

    for (std::uint64_t expected : record_offsets) {
        if (r.u64() != expected)
            throw data_error{"manifest/stream mismatch: record index"};
    }
    const std::uint64_t stored = r.u64();
    const unsigned char *tail = r.take(4);
    if (std::memcmp(tail, sample_format::end_magic.data(), 4) != 0)
        throw data_error{"stream truncation"};
    if (stored != hash.digest())
        throw data_error{"checksum mismatch"};
    out.checksum = stored;

    out.documents.reserve(docs.size());
    for (auto &pd : docs) {
        auto first_gap = std::find(pd.seen.begin(), pd.seen.end(), false);
        if (std::find(first_gap, pd.seen.end(), true) != pd.seen.end())
            throw data_error{"manifest/stream mismatch: doc_id '" + pd.doc.doc_id +
                             "' has a coverage gap"};
        pd.doc.tokens.resize(static_cast<std::size_t>(first_gap - pd.seen.begin()));
        out.documents.push_back(std::move(pd.doc));
    }
    return out;
}

}  // namespace seqpack
