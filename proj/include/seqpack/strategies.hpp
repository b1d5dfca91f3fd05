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
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqpack/error.hpp"
#include "seqpack/longdoc.hpp"
#include "seqpack/metrics.hpp"
#include "seqpack/types.hpp"

namespace seqpack {

namespace detail {

struct shard_output {
    std::vector<packed_sample> samples;
    std::uint64_t discarded_tokens = 0;
};

// Appends placements and separators to the open sample, left to right.
class sample_writer {
public:
    explicit sample_writer(token_count context_length) : capacity_{context_length} {}

    token_count residual() const noexcept { return capacity_ - pos_; }
    bool open() const noexcept { return pos_ != 0; }

    void
    place(const document_record &doc, token_count start, token_count end)
    {
        current_.placements.push_back(placement{doc.doc_id, doc.length, start, end, pos_});
        pos_ += end - start;
        close_if_full();
    }

    void
    separator()
    {
        current_.separator_positions.push_back(pos_);
        ++pos_;
        close_if_full();
    }

    // Pads the open sample to capacity and commits it.
    void
    close_padded()
    {
        current_.padding_begin = pos_;
        commit();
    }

    // Forgets the open sample; returns how many stream tokens it held.
    token_count
    discard()
    {
        token_count held = pos_;
        current_ = {};
        pos_ = 0;
        return held;
    }

    std::vector<packed_sample> take() { return std::move(samples_); }

private:
    void
    close_if_full()
    {
        if (pos_ == capacity_) {
            current_.padding_begin = capacity_;
            commit();
        }
    }

    void
    commit()
    {
        current_.sample_index = samples_.size();
        samples_.push_back(std::move(current_));
        current_ = {};
        pos_ = 0;
    }

    token_count capacity_;
    token_count pos_ = 0;
    packed_sample current_;
    std::vector<packed_sample> samples_;
};

inline void
check_item_fits(const document_record &doc, const packing_config &cfg)
{
    if (doc.length + cfg.separator_cost() > cfg.context_length)
        throw precondition_error{
            "document '" + doc.doc_id + "' (length " + std::to_string(doc.length) +
            ") exceeds sample capacity " + std::to_string(cfg.item_capacity()) +
            "; apply a long-document policy (--long-doc split|slide|drop)"};
}

inline shard_output
finish(sample_writer &w, bool drop_partial)
{
    shard_output out;
    if (w.open()) {
        if (drop_partial)
            out.discarded_tokens = w.discard();
        else
            w.close_padded();
    }
    out.samples = w.take();
    return out;
}

inline shard_output
concat_then_split(std::span<const document_record> docs, const packing_config &cfg)
{
    sample_writer w{cfg.context_length};
    for (const auto &doc : docs) {
        for (token_count start = 0; start < doc.length;) {
            token_count end = std::min(doc.length, start + w.residual());
            w.place(doc, start, end);
            start = end;
        }
        if (cfg.sep_after_every_doc)
            w.separator();
    }
    return finish(w, cfg.drop_final_partial);
}

inline shard_output
restart_last_document(std::span<const document_record> docs, const packing_config &cfg)
{
    sample_writer w{cfg.context_length};
    for (const auto &doc : docs) {
        check_item_fits(doc, cfg);

        const token_count residual = w.residual();
        if (doc.length + cfg.separator_cost() <= residual) {
            w.place(doc, 0, doc.length);
            if (cfg.sep_after_every_doc)
                w.separator();
            continue;
        }
        if (doc.length == residual) {
            // The document itself ends on the sample boundary; its separator is
            // elided rather than opening the next sample.
            w.place(doc, 0, doc.length);
            continue;
        }

        // Tail fragment, then restart from token 0 at the head of the next sample.
        w.place(doc, 0, residual);
        w.place(doc, 0, doc.length);
        if (cfg.sep_after_every_doc)
            w.separator();
    }
    return finish(w, cfg.drop_final_partial);
}

inline shard_output
pad_last_document(std::span<const document_record> docs, const packing_config &cfg)
{
    sample_writer w{cfg.context_length};
    for (const auto &doc : docs) {
        check_item_fits(doc, cfg);

        if (doc.length + cfg.separator_cost() > w.residual())
            w.close_padded();
        w.place(doc, 0, doc.length);
        if (cfg.sep_after_every_doc)
            w.separator();
    }
    return finish(w, false);
}

inline shard_output
best_fit(std::span<const document_record> docs, const packing_config &cfg)
{
    const token_count sep = cfg.separator_cost();
    for (const auto &doc : docs)
        check_item_fits(doc, cfg);

    std::vector<std::size_t> order(docs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!cfg.online) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (docs[a].length != docs[b].length)
                return docs[a].length > docs[b].length;
            return docs[a].doc_id < docs[b].doc_id;
        });
    }

    std::vector<packed_sample> bins;
    std::vector<token_count> fill;
    // (residual, bin index); lower_bound finds the tightest bin, lowest index on ties.
    std::set<std::pair<token_count, std::size_t>> open_bins;

    for (std::size_t i : order) {
        const document_record &doc = docs[i];
        const token_count need = doc.length + sep;

        std::size_t bin;
        auto it = open_bins.lower_bound({need, 0});
        if (it != open_bins.end()) {
            bin = it->second;
            open_bins.erase(it);
        } else {
            bin = bins.size();
            bins.emplace_back().sample_index = bin;
            fill.push_back(0);
        }

        packed_sample &s = bins[bin];
        s.placements.push_back(placement{doc.doc_id, doc.length, 0, doc.length, fill[bin]});
        fill[bin] += doc.length;
        if (sep) {
            s.separator_positions.push_back(fill[bin]);
            fill[bin] += sep;
        }

        if (fill[bin] < cfg.context_length)
            open_bins.emplace(cfg.context_length - fill[bin], bin);
    }

    for (std::size_t b = 0; b < bins.size(); ++b)
        bins[b].padding_begin = fill[b];

    return {std::move(bins), 0};
}

inline shard_output
pack_shard(std::span<const document_record> docs, const packing_config &cfg)
{
    switch (cfg.strategy) {
    case strategy::concat_then_split:
        return concat_then_split(docs, cfg);
    case strategy::restart_last_document:
        return restart_last_document(docs, cfg);
    case strategy::pad_last_document:
        return pad_last_document(docs, cfg);
    case strategy::best_fit:
        return best_fit(docs, cfg);
    }
    throw config_error{"unknown strategy"};
}

}  // namespace detail

// Packs an already preprocessed corpus with cfg.strategy. With shard_count > 1
// the corpus is cut into contiguous shards packed independently (concurrently)
// and concatenated in shard order; the result does not depend on scheduling.
inline packing_manifest
pack_prepared(const prepared_corpus &corpus, const packing_config &cfg)
{
    cfg.validate();

    packing_manifest m;
    m.config = cfg;
    m.documents.input_doc_count = corpus.input_doc_count;
    m.documents.input_tokens = corpus.input_tokens;
    m.documents.retained_doc_count = corpus.retained.size();
    for (const auto &doc : corpus.retained)
        m.documents.retained_tokens += doc.length;
    m.documents.dropped = corpus.dropped;

    const std::span<const document_record> all{corpus.retained};
    const std::uint64_t n = all.size();
    const std::uint64_t k = cfg.shard_count;

    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
    for (std::uint64_t i = 0, begin = 0; i < k; ++i) {
        std::uint64_t size = n / k + (i < n % k ? 1 : 0);
        ranges.emplace_back(begin, begin + size);
        begin += size;
    }

    std::vector<detail::shard_output> outputs(k);
    if (k == 1) {
        outputs[0] = detail::pack_shard(all, cfg);
    } else {
        std::vector<std::future<detail::shard_output>> futures;
        for (auto [b, e] : ranges)
            futures.push_back(std::async(std::launch::async, [&, b, e] {
                return detail::pack_shard(all.subspan(b, e - b), cfg);
            }));
        for (std::uint64_t i = 0; i < k; ++i)
            outputs[i] = futures[i].get();
    }

    for (std::uint64_t i = 0; i < k; ++i) {
        shard_info info;
        info.doc_begin = ranges[i].first;
        info.doc_end = ranges[i].second;
        info.sample_begin = m.samples.size();
        info.discarded_tokens = outputs[i].discarded_tokens;
        for (auto &s : outputs[i].samples) {
            s.sample_index = m.samples.size();
            m.samples.push_back(std::move(s));
        }
        info.sample_end = m.samples.size();
        m.shards.push_back(info);
    }

    m.metrics = compute_metrics(m.samples, corpus.retained.size(), cfg.context_length);
    return m;
}

// Applies the long-document policy, then packs.
inline packing_manifest
pack_corpus(const std::vector<document_record> &docs, const packing_config &cfg)
{
    return pack_prepared(prepare_corpus(docs, cfg), cfg);
}

namespace detail {

inline packing_manifest
pack_as_is(const std::vector<document_record> &docs, packing_config cfg, strategy s)
{
    cfg.strategy = s;
    if (s != strategy::best_fit)
        cfg.online = false;

    prepared_corpus corpus;
    corpus.retained = docs;
    corpus.input_doc_count = docs.size();
    for (const auto &d : docs)
        corpus.input_tokens += d.length;
    return pack_prepared(corpus, cfg);
}

}  // namespace detail

// Strategy entry points; `docs` are packed as given, with no long-document handling.

inline packing_manifest
pack_concat_then_split(const std::vector<document_record> &docs, const packing_config &cfg)
{
    return detail::pack_as_is(docs, cfg, strategy::concat_then_split);
}

inline packing_manifest
pack_restart_last_document(const std::vector<document_record> &docs, const packing_config &cfg)
{
    return detail::pack_as_is(docs, cfg, strategy::restart_last_document);
}

inline packing_manifest
pack_pad_last_document(const std::vector<document_record> &docs, const packing_config &cfg)
{
    return detail::pack_as_is(docs, cfg, strategy::pad_last_document);
}

inline packing_manifest
pack_best_fit(const std::vector<document_record> &docs, const packing_config &cfg)
{
    return detail::pack_as_is(docs, cfg, strategy::best_fit);
}

}  // namespace seqpack
