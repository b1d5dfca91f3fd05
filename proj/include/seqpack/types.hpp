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

#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqpack/error.hpp"

namespace seqpack {

using token_count = std::uint64_t;
using token_id = std::uint32_t;

inline constexpr token_count default_context_length = 262'144;

// Exact non-negative fraction. Always stored reduced; 0 is 0/1.
class rational {
public:
    constexpr rational() noexcept = default;

    constexpr rational(std::uint64_t num, std::uint64_t den) : num_{num}, den_{den}
    {
        if (den_ == 0)
            throw std::invalid_argument{"rational with zero denominator"};

        if (num_ == 0) {
            den_ = 1;
            return;
        }
        std::uint64_t g = std::gcd(num_, den_);
        num_ /= g;
        den_ /= g;
    }

    constexpr std::uint64_t num() const noexcept { return num_; }
    constexpr std::uint64_t den() const noexcept { return den_; }

    constexpr double to_double() const noexcept
    {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    friend constexpr bool operator==(const rational &, const rational &) noexcept = default;

    friend constexpr bool operator<(const rational &a, const rational &b) noexcept
    {
        using wide = unsigned __int128;
        return static_cast<wide>(a.num_) * b.den_ < static_cast<wide>(b.num_) * a.den_;
    }

private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

// Locator of a document's token ids inside a flat little-endian uint32 file.
struct token_ref {
    std::string file;
    std::uint64_t byte_offset = 0;

    friend bool operator==(const token_ref &, const token_ref &) = default;
};

// Where a derived record (split part or slide window) came from.
struct source_span {
    std::string parent_id;
    token_count start = 0;

    friend bool operator==(const source_span &, const source_span &) = default;
};

struct document_record {
    std::string doc_id;
    token_count length = 0;
    std::optional<token_ref> tokens;
    std::optional<source_span> origin;

    friend bool operator==(const document_record &, const document_record &) = default;
};

enum class strategy { concat_then_split, restart_last_document, pad_last_document, best_fit };

// `none` packs documents as given; strategies that need every item to fit a
// sample then reject over-capacity documents with a precondition error.
enum class long_doc_policy { split, slide, drop, none };

inline constexpr std::array all_strategies{
    strategy::concat_then_split,
    strategy::restart_last_document,
    strategy::pad_last_document,
    strategy::best_fit,
};

inline constexpr std::string_view
to_string(strategy s) noexcept
{
    switch (s) {
    case strategy::concat_then_split:
        return "concat_then_split";
    case strategy::restart_last_document:
        return "restart_last_document";
    case strategy::pad_last_document:
        return "pad_last_document";
    case strategy::best_fit:
        return "best_fit";
    }
    return "unknown";
}

inline constexpr std::string_view
to_string(long_doc_policy p) noexcept
{
    switch (p) {
    case long_doc_policy::split:
        return "split";
    case long_doc_policy::slide:
        return "slide";
    case long_doc_policy::drop:
        return "drop";
    case long_doc_policy::none:
        return "none";
    }
    return "unknown";
}

// Accepts the canonical names plus the usual short forms (cts, rld, pld, bfp).
inline strategy
parse_strategy(std::string_view name)
{
    if (name == "concat_then_split" || name == "concat" || name == "cts")
        return strategy::concat_then_split;
    if (name == "restart_last_document" || name == "rld")
        return strategy::restart_last_document;
    if (name == "pad_last_document" || name == "pld")
        return strategy::pad_last_document;
    if (name == "best_fit" || name == "bfp" || name == "best_fit_packing")
        return strategy::best_fit;

    throw config_error{"unknown strategy '" + std::string{name} + "'"};
}

inline long_doc_policy
parse_long_doc_policy(std::string_view name)
{
    if (name == "split")
        return long_doc_policy::split;
    if (name == "slide")
        return long_doc_policy::slide;
    if (name == "drop")
        return long_doc_policy::drop;
    if (name == "none")
        return long_doc_policy::none;

    throw config_error{"unknown long-document policy '" + std::string{name} + "'"};
}

struct packing_config {
    token_count context_length = default_context_length;
    seqpack::strategy strategy = strategy::best_fit;
    long_doc_policy long_doc = long_doc_policy::split;
    token_count slide_overlap = 1;
    token_id separator_id = 0;
    token_id padding_id = 1;
    bool sep_after_every_doc = true;
    bool drop_final_partial = true;
    // Best-fit only: keep input order instead of sorting by decreasing length.
    bool online = false;
    // Number of contiguous corpus shards packed independently (1 = global packing).
    std::uint32_t shard_count = 1;

    token_count separator_cost() const noexcept { return sep_after_every_doc ? 1 : 0; }

    // Longest document that still fits one sample together with its separator.
    token_count item_capacity() const noexcept { return context_length - separator_cost(); }

    void validate() const
    {
        if (context_length < 2)
            throw config_error{"context_length must be at least 2"};
        if (context_length > 0xFFFF'FFFFu)
            throw config_error{"context_length must fit in 32 bits"};
        if (separator_id == padding_id)
            throw config_error{"separator_id and padding_id must differ"};
        if (shard_count == 0)
            throw config_error{"shard_count must be positive"};
        if (online && strategy != strategy::best_fit)
            throw config_error{"--online applies only to the best_fit strategy"};
        if (long_doc == long_doc_policy::slide) {
            if (slide_overlap < 1 || slide_overlap >= item_capacity())
                throw config_error{
                    "slide_overlap must be in [1, " + std::to_string(item_capacity() - 1) +
                    "] for context_length " + std::to_string(context_length)};
        }
    }

    friend bool operator==(const packing_config &, const packing_config &) = default;
};

// Half-open token interval [start, end) of one document placed at `offset` in a sample.
struct placement {
    std::string doc_id;
    token_count doc_length = 0;
    token_count start = 0;
    token_count end = 0;
    token_count offset = 0;

    token_count size() const noexcept { return end - start; }
    bool is_partial() const noexcept { return start != 0 || end != doc_length; }

    friend bool operator==(const placement &, const placement &) = default;
};

struct packed_sample {
    std::uint64_t sample_index = 0;
    std::vector<placement> placements;
    std::vector<token_count> separator_positions;
    // Tail padding [padding_begin, context_length); empty when padding_begin == L.
    token_count padding_begin = 0;

    friend bool operator==(const packed_sample &, const packed_sample &) = default;
};

struct packing_metrics {
    std::uint64_t sample_count = 0;
    std::uint64_t total_training_tokens = 0;
    std::uint64_t retained_doc_count = 0;
    std::uint64_t fragmented_doc_count = 0;
    std::uint64_t padding_token_count = 0;

    rational fragmentation_rate() const
    {
        return retained_doc_count == 0 ? rational{}
                                       : rational{fragmented_doc_count, retained_doc_count};
    }

    rational padding_rate() const
    {
        return total_training_tokens == 0 ? rational{}
                                          : rational{padding_token_count, total_training_tokens};
    }

    friend bool operator==(const packing_metrics &, const packing_metrics &) = default;
};

// One contiguous slice of the retained corpus packed independently.
struct shard_info {
    std::uint64_t doc_begin = 0;
    std::uint64_t doc_end = 0;
    std::uint64_t sample_begin = 0;
    std::uint64_t sample_end = 0;
    // Stream tokens (document + separator) cut off with a dropped final partial sample.
    std::uint64_t discarded_tokens = 0;

    friend bool operator==(const shard_info &, const shard_info &) = default;
};

struct corpus_summary {
    std::uint64_t input_doc_count = 0;
    std::uint64_t input_tokens = 0;
    std::uint64_t retained_doc_count = 0;
    std::uint64_t retained_tokens = 0;
    std::vector<std::string> dropped;

    friend bool operator==(const corpus_summary &, const corpus_summary &) = default;
};

struct packing_manifest {
    packing_config config;
    corpus_summary documents;
    std::vector<shard_info> shards;
    std::vector<packed_sample> samples;
    packing_metrics metrics;

    std::uint64_t discarded_tokens() const noexcept
    {
        std::uint64_t total = 0;
        for (const auto &s : shards)
            total += s.discarded_tokens;
        return total;
    }

    friend bool operator==(const packing_manifest &, const packing_manifest &) = default;
};

}  // namespace seqpack
