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
#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "seqpack/metrics.hpp"
#include "seqpack/types.hpp"

namespace seqpack {

struct corpus_stats {
    std::uint64_t doc_count = 0;
    std::uint64_t total_tokens = 0;
    token_count min_length = 0;
    token_count max_length = 0;
    // Longer than the context length.
    std::uint64_t over_length = 0;
    // Does not fit one sample together with its separator.
    std::uint64_t over_capacity = 0;
    // histogram[k] counts lengths in [2^k, 2^(k+1)).
    std::vector<std::uint64_t> histogram;

    double mean_length() const noexcept
    {
        return doc_count == 0 ? 0.0 : static_cast<double>(total_tokens) / static_cast<double>(doc_count);
    }
};

inline corpus_stats
compute_corpus_stats(const std::vector<document_record> &docs, token_count context_length,
                     token_count separator_cost = 1)
{
    corpus_stats st;
    st.doc_count = docs.size();
    st.min_length = docs.empty() ? 0 : std::numeric_limits<token_count>::max();

    for (const auto &d : docs) {
        st.total_tokens += d.length;
        st.min_length = std::min(st.min_length, d.length);
        st.max_length = std::max(st.max_length, d.length);
        if (d.length > context_length)
            ++st.over_length;
        if (d.length + separator_cost > context_length)
            ++st.over_capacity;

        std::size_t bucket = static_cast<std::size_t>(std::bit_width(d.length)) - 1;
        if (st.histogram.size() <= bucket)
            st.histogram.resize(bucket + 1, 0);
        ++st.histogram[bucket];
    }
    return st;
}

inline std::string
render_corpus_stats(const corpus_stats &st, token_count context_length)
{
    std::string out;
    out += "documents=" + std::to_string(st.doc_count) + " tokens=" + std::to_string(st.total_tokens) +
           " min=" + std::to_string(st.min_length) + " max=" + std::to_string(st.max_length) +
           " mean=" + format_fixed(st.mean_length(), 2) + "\n";
    out += "context_length=" + std::to_string(context_length) +
           " over_length=" + std::to_string(st.over_length) +
           " over_capacity=" + std::to_string(st.over_capacity) + "\n";

    std::uint64_t peak = 0;
    for (auto c : st.histogram)
        peak = std::max(peak, c);

    for (std::size_t k = 0; k < st.histogram.size(); ++k) {
        const std::uint64_t lo = std::uint64_t{1} << k;
        const std::uint64_t hi = (std::uint64_t{1} << (k + 1)) - 1;
        std::string range = "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
        range.resize(std::max<std::size_t>(range.size(), 24), ' ');
        const std::size_t bar = peak == 0 ? 0 : static_cast<std::size_t>(40 * st.histogram[k] / peak);
        std::string count = std::to_string(st.histogram[k]);
        count.insert(0, count.size() < 8 ? 8 - count.size() : 0, ' ');
        out += range + count + (bar ? " " + std::string(bar, '#') : "") + "\n";
    }
    return out;
}

}  // namespace seqpack
