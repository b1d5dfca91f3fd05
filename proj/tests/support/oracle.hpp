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

// Test-only references. Nothing here includes the packing engine beyond its
// plain data types; each routine re-derives its answer the slow, obvious way.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqpack/types.hpp"

namespace seqpack::oracle {

inline constexpr std::size_t max_exhaustive_items = 14;

namespace detail {

inline void
search(const std::vector<token_count> &items, std::size_t next, std::vector<token_count> &loads,
       token_count capacity, std::size_t &best)
{
    if (loads.size() >= best)
        return;
    if (next == items.size()) {
        best = loads.size();
        return;
    }

    // Bins with equal load are interchangeable; try each load value once.
    std::set<token_count> tried;
    for (std::size_t b = 0; b < loads.size(); ++b) {
        if (loads[b] + items[next] > capacity || !tried.insert(loads[b]).second)
            continue;
        loads[b] += items[next];
        search(items, next + 1, loads, capacity, best);
        loads[b] -= items[next];
    }

    loads.push_back(items[next]);
    search(items, next + 1, loads, capacity, best);
    loads.pop_back();
}

}  // namespace detail

// Exact minimum number of bins of size `capacity` holding all `lengths`.
inline std::size_t
brute_force_min_bins(std::vector<token_count> lengths, token_count capacity)
{
    if (lengths.size() > max_exhaustive_items)
        throw std::invalid_argument{"instance too large for exhaustive search"};
    for (auto l : lengths)
        if (l > capacity)
            throw std::invalid_argument{"item exceeds capacity"};
    if (lengths.empty())
        return 0;

    std::sort(lengths.rbegin(), lengths.rend());
    std::size_t best = lengths.size() + 1;
    std::vector<token_count> loads;
    detail::search(lengths, 0, loads, capacity, best);
    return best;
}

// Straightforward long-document handling, written from the rules directly.
inline std::vector<document_record>
reference_preprocess(const std::vector<document_record> &docs, const packing_config &cfg,
                     std::vector<std::string> *dropped = nullptr)
{
    const token_count cap = cfg.context_length - (cfg.sep_after_every_doc ? 1 : 0);
    std::vector<document_record> out;
    for (const auto &d : docs) {
        if (d.length <= cap || cfg.long_doc == long_doc_policy::none) {
            out.push_back(d);
            continue;
        }
        if (cfg.long_doc == long_doc_policy::drop) {
            if (dropped)
                dropped->push_back(d.doc_id);
            continue;
        }

        std::vector<std::pair<token_count, token_count>> ranges;  // [begin, end)
        if (cfg.long_doc == long_doc_policy::split) {
            for (token_count b = 0; b < d.length; b += cap)
                ranges.emplace_back(b, std::min(d.length, b + cap));
        } else {
            const token_count stride = cap - cfg.slide_overlap;
            token_count b = 0;
            while (b + cap < d.length) {
                ranges.emplace_back(b, b + cap);
                b += stride;
            }
            ranges.emplace_back(d.length - cap, d.length);
        }

        for (std::size_t k = 0; k < ranges.size(); ++k) {
            document_record part;
            part.doc_id = d.doc_id + "#" + std::to_string(k);
            part.length = ranges[k].second - ranges[k].first;
            out.push_back(part);
        }
    }
    return out;
}

// Token-level simulation: every sample is an explicit vector of cells, each
// either a document token (doc index, position), a separator, or padding.
class reference_simulator {
public:
    reference_simulator(const std::vector<document_record> &docs, const packing_config &cfg)
      : docs_{docs}, cfg_{cfg}
    {}

    packing_metrics
    run(strategy s)
    {
        for (const auto &d : docs_)
            if (s != strategy::concat_then_split && d.length + sep_cost() > cfg_.context_length)
                throw std::invalid_argument{"document exceeds sample capacity"};

        switch (s) {
        case strategy::concat_then_split:
            concat();
            break;
        case strategy::restart_last_document:
            restart_or_pad(false);
            break;
        case strategy::pad_last_document:
            restart_or_pad(true);
            break;
        case strategy::best_fit:
            best_fit();
            break;
        }
        return tally();
    }

    std::size_t sample_count() const noexcept { return samples_.size(); }

private:
    static constexpr std::int64_t sep_cell = -1;
    static constexpr std::int64_t pad_cell = -2;

    struct cell {
        std::int64_t doc;
        token_count pos;
    };
    using sample = std::vector<cell>;

    token_count sep_cost() const { return cfg_.sep_after_every_doc ? 1 : 0; }
    token_count L() const { return cfg_.context_length; }

    void
    concat()
    {
        std::vector<cell> stream;
        for (std::size_t i = 0; i < docs_.size(); ++i) {
            for (token_count t = 0; t < docs_[i].length; ++t)
                stream.push_back({static_cast<std::int64_t>(i), t});
            if (cfg_.sep_after_every_doc)
                stream.push_back({sep_cell, 0});
        }
        for (std::size_t b = 0; b < stream.size(); b += L()) {
            sample s(stream.begin() + static_cast<std::ptrdiff_t>(b),
                     stream.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(stream.size(), b + L())));
            if (s.size() < L()) {
                if (cfg_.drop_final_partial)
                    break;
                s.resize(L(), {pad_cell, 0});
            }
            samples_.push_back(std::move(s));
        }
    }

    void
    restart_or_pad(bool pad)
    {
        sample cur;
        auto close = [&] {
            cur.resize(L(), {pad_cell, 0});
            samples_.push_back(std::move(cur));
            cur.clear();
        };
        auto append_doc = [&](std::size_t i, token_count n) {
            for (token_count t = 0; t < n; ++t)
                cur.push_back({static_cast<std::int64_t>(i), t});
        };

        for (std::size_t i = 0; i < docs_.size(); ++i) {
            const token_count len = docs_[i].length;
            const token_count room = L() - cur.size();
            if (len + sep_cost() <= room) {
                append_doc(i, len);
                if (sep_cost())
                    cur.push_back({sep_cell, 0});
            } else if (!pad && len == room) {
                append_doc(i, len);
            } else {
                if (!pad)
                    append_doc(i, room);
                close();
                append_doc(i, len);
                if (sep_cost())
                    cur.push_back({sep_cell, 0});
            }
            if (cur.size() == L())
                close();
        }
        if (!cur.empty()) {
            if (pad || !cfg_.drop_final_partial)
                close();
        }
    }

    void
    best_fit()
    {
        std::vector<std::size_t> order(docs_.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        if (!cfg_.online) {
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (docs_[a].length != docs_[b].length)
                    return docs_[a].length > docs_[b].length;
                return docs_[a].doc_id < docs_[b].doc_id;
            });
        }

        std::vector<sample> bins;
        for (std::size_t i : order) {
            const token_count need = docs_[i].length + sep_cost();
            std::size_t chosen = bins.size();
            token_count best_room = 0;
            for (std::size_t b = 0; b < bins.size(); ++b) {
                token_count room = L() - bins[b].size();
                if (room >= need && (chosen == bins.size() || room < best_room)) {
                    chosen = b;
                    best_room = room;
                }
            }
            if (chosen == bins.size())
                bins.emplace_back();
            for (token_count t = 0; t < docs_[i].length; ++t)
                bins[chosen].push_back({static_cast<std::int64_t>(i), t});
            if (sep_cost())
                bins[chosen].push_back({sep_cell, 0});
        }
        for (auto &b : bins) {
            b.resize(L(), {pad_cell, 0});
            samples_.push_back(std::move(b));
        }
    }

    packing_metrics
    tally() const
    {
        packing_metrics m;
        m.sample_count = samples_.size();
        m.total_training_tokens = samples_.size() * L();
        m.retained_doc_count = docs_.size();

        std::vector<bool> fragmented(docs_.size(), false);
        for (const auto &s : samples_) {
            std::map<std::int64_t, token_count> per_doc;
            for (const auto &c : s) {
                if (c.doc == pad_cell)
                    ++m.padding_token_count;
                else if (c.doc >= 0)
                    ++per_doc[c.doc];
            }
            // A doc restarted inside the same sample cannot happen, so a count
            // below the length means this sample holds only part of it.
            for (auto [doc, n] : per_doc)
                if (n < docs_[static_cast<std::size_t>(doc)].length)
                    fragmented[static_cast<std::size_t>(doc)] = true;
        }
        m.fragmented_doc_count =
            static_cast<std::uint64_t>(std::count(fragmented.begin(), fragmented.end(), true));
        return m;
    }

    const std::vector<document_record> &docs_;
    packing_config cfg_;
    std::vector<sample> samples_;
};

// Metrics of packing `docs` under `cfg` with strategy `s`, after the
// configured long-document policy.
inline packing_metrics
simulate_reference(const std::vector<document_record> &docs, const packing_config &cfg, strategy s)
{
    if (docs.size() > 1000)
        throw std::invalid_argument{"reference simulation is limited to 1000 documents"};
    auto items = reference_preprocess(docs, cfg);
    packing_config c = cfg;
    c.strategy = s;
    if (s != strategy::best_fit)
        c.online = false;
    return reference_simulator{items, c}.run(s);
}

}  // namespace seqpack::oracle
