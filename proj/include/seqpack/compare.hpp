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
#include <future>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqpack/error.hpp"
#include "seqpack/manifest_io.hpp"
#include "seqpack/metrics.hpp"
#include "seqpack/strategies.hpp"

namespace seqpack {

struct comparison_row {
    seqpack::strategy strategy = strategy::best_fit;
    packing_metrics metrics;
    // Set when the strategy refused the corpus; metrics are then empty.
    std::optional<error_kind> failure;
    std::string message;

    bool ok() const noexcept { return !failure; }
};

struct strategy_comparison {
    packing_config config;
    std::vector<comparison_row> rows;
};

// Packs the same corpus once per requested strategy, concurrently; rows keep
// the requested order. A failing strategy yields an error row instead of
// aborting the others.
inline strategy_comparison
compare_strategies(const std::vector<document_record> &docs,
                   const packing_config &cfg,
                   const std::vector<strategy> &strategies)
{
    strategy_comparison out;
    out.config = cfg;

    std::vector<std::future<comparison_row>> runs;
    runs.reserve(strategies.size());
    for (strategy s : strategies) {
        packing_config row_cfg = cfg;
        row_cfg.strategy = s;
        if (s != strategy::best_fit)
            row_cfg.online = false;
        runs.push_back(std::async(std::launch::async, [&docs, row_cfg, s] {
            comparison_row row;
            row.strategy = s;
            try {
                row.metrics = pack_corpus(docs, row_cfg).metrics;
            } catch (const error &e) {
                row.failure = e.kind();
                row.message = e.what();
            }
            return row;
        }));
    }
    for (auto &f : runs)
        out.rows.push_back(f.get());
    return out;
}

// Percentages: fragmentation with one decimal, padding with two.
inline std::string
render_comparison_table(const strategy_comparison &cmp)
{
    struct cells {
        std::string name, samples, tokens, frag, pad;
    };
    std::vector<cells> lines;
    lines.push_back({"Strategy", "Samples", "Tokens", "Fragm. Rate (%)", "Padding Rate (%)"});
    for (const auto &row : cmp.rows) {
        if (!row.ok()) {
            lines.push_back({std::string{to_string(row.strategy)}, "error", row.message, "", ""});
            continue;
        }
        lines.push_back({
            std::string{to_string(row.strategy)},
            std::to_string(row.metrics.sample_count),
            std::to_string(row.metrics.total_training_tokens),
            format_fixed(100.0 * row.metrics.fragmentation_rate().to_double(), 1),
            format_fixed(100.0 * row.metrics.padding_rate().to_double(), 2),
        });
    }

    std::size_t w[5] = {};
    for (const auto &l : lines) {
        w[0] = std::max(w[0], l.name.size());
        w[1] = std::max(w[1], l.samples.size());
        w[2] = std::max(w[2], l.tokens.size());
        w[3] = std::max(w[3], l.frag.size());
        w[4] = std::max(w[4], l.pad.size());
    }

    auto left = [](const std::string &s, std::size_t width) { return s + std::string(width - s.size(), ' '); };
    auto right = [](const std::string &s, std::size_t width) { return std::string(width - s.size(), ' ') + s; };

    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto &l = lines[i];
        if (l.samples == "error") {
            out += left(l.name, w[0]) + "  error: " + l.tokens + "\n";
            continue;
        }
        out += left(l.name, w[0]) + "  " + right(l.samples, w[1]) + "  " + right(l.tokens, w[2]) + "  " +
               right(l.frag, w[3]) + "  " + right(l.pad, w[4]) + "\n";
        if (i == 0)
            out += std::string(w[0] + w[1] + w[2] + w[3] + w[4] + 8, '-') + "\n";
    }
    return out;
}

// Machine-readable rows: the manifest metrics schema plus the strategy name.
inline nlohmann::json
comparison_to_json(const strategy_comparison &cmp)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : cmp.rows) {
        nlohmann::json r;
        if (row.ok()) {
            r = metrics_to_json(row.metrics);
        } else {
            r["error"] = row.message;
            r["exit_code"] = static_cast<int>(*row.failure);
        }
        r["strategy"] = std::string{to_string(row.strategy)};
        rows.push_back(std::move(r));
    }
    return {{"config", config_to_json(cmp.config)}, {"rows", rows}};
}

}  // namespace seqpack
