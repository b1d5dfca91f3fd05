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

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>

#include "seqpack/error.hpp"
#include "seqpack/types.hpp"

namespace seqpack {

// Recounts every metric from raw samples. A document counts as fragmented when
// any of its placements covers a strict subset of its tokens; each document is
// counted at most once.
inline packing_metrics
compute_metrics(std::span<const packed_sample> samples,
                std::uint64_t retained_doc_count,
                token_count context_length)
{
    packing_metrics m;
    m.sample_count = samples.size();
    m.total_training_tokens = samples.size() * context_length;
    m.retained_doc_count = retained_doc_count;

    std::unordered_set<std::string_view> fragmented;
    for (const auto &s : samples) {
        m.padding_token_count += context_length - s.padding_begin;
        for (const auto &p : s.placements)
            if (p.is_partial())
                fragmented.insert(p.doc_id);
    }
    m.fragmented_doc_count = fragmented.size();
    return m;
}

inline rational
fragmentation_rate(const packing_manifest &manifest)
{
    return compute_metrics(manifest.samples, manifest.documents.retained_doc_count,
                           manifest.config.context_length)
        .fragmentation_rate();
}

inline rational
padding_rate(const packing_manifest &manifest)
{
    return compute_metrics(manifest.samples, manifest.documents.retained_doc_count,
                           manifest.config.context_length)
        .padding_rate();
}

// Token budget that keeps the same number of trained (non-padding) tokens when
// a fraction `padding` of every sample is padding: base / (1 - padding),
// rounded to the nearest token (halves round up).
inline std::uint64_t
scaled_token_budget(std::uint64_t base_tokens, rational padding)
{
    if (!(padding < rational{1, 1}))
        throw std::domain_error{"padding rate must be below 1"};

    using wide = unsigned __int128;
    const wide num = static_cast<wide>(base_tokens) * padding.den();
    const wide den = padding.den() - padding.num();
    return static_cast<std::uint64_t>((2 * num + den) / (2 * den));
}

inline std::uint64_t
scaled_token_budget(std::uint64_t base_tokens, double padding)
{
    if (!(padding >= 0.0 && padding < 1.0))
        throw std::domain_error{"padding rate must be in [0, 1)"};

    return static_cast<std::uint64_t>(
        std::llround(static_cast<long double>(base_tokens) / (1.0L - padding)));
}

inline std::string
format_fixed(double value, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

// `strategy=<s> samples=<n> frag=<r> pad=<r>` with rates to four decimals.
inline std::string
summary_line(const packing_manifest &m)
{
    return "strategy=" + std::string{to_string(m.config.strategy)} +
           " samples=" + std::to_string(m.metrics.sample_count) +
           " frag=" + format_fixed(m.metrics.fragmentation_rate().to_double(), 4) +
           " pad=" + format_fixed(m.metrics.padding_rate().to_double(), 4);
}

}  // namespace seqpack
