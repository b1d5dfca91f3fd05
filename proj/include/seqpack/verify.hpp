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
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqpack/longdoc.hpp"
#include "seqpack/metrics.hpp"
#include "seqpack/types.hpp"

namespace seqpack {

struct violation {
    std::string kind;
    std::optional<std::uint64_t> sample_index;
    std::string doc_id;
    std::string detail;

    std::string
    to_string() const
    {
        std::string s = kind;
        if (sample_index)
            s += " sample=" + std::to_string(*sample_index);
        if (!doc_id.empty())
            s += " doc_id=" + doc_id;
        if (!detail.empty())
            s += ": " + detail;
        return s;
    }
};

struct verification_report {
    std::vector<violation> violations;

    bool ok() const noexcept { return violations.empty(); }

    bool
    has(std::string_view kind) const
    {
        return std::any_of(violations.begin(), violations.end(),
                           [&](const violation &v) { return v.kind == kind; });
    }
};

namespace violation_kind {
inline constexpr std::string_view invalid_config = "invalid config";
inline constexpr std::string_view corpus_mismatch = "corpus mismatch";
inline constexpr std::string_view unknown_doc = "unknown doc_id";
inline constexpr std::string_view length_mismatch = "length mismatch";
inline constexpr std::string_view invalid_range = "invalid range";
inline constexpr std::string_view capacity_exceeded = "capacity exceeded";
inline constexpr std::string_view overlap = "overlapping placements";
inline constexpr std::string_view separator_inside = "separator inside placement";
inline constexpr std::string_view occupancy = "occupancy mismatch";
inline constexpr std::string_view head_rule = "head rule";
inline constexpr std::string_view duplicate_coverage = "duplicate coverage";
inline constexpr std::string_view missing_coverage = "missing coverage";
inline constexpr std::string_view shard_layout = "shard layout mismatch";
inline constexpr std::string_view token_accounting = "token accounting mismatch";
inline constexpr std::string_view metrics_mismatch = "metrics mismatch";
}  // namespace violation_kind

namespace detail {

struct piece {
    std::uint64_t sample;
    token_count start;
    token_count end;
    token_count offset;
};

class verifier {
public:
    verifier(const packing_manifest &m, const prepared_corpus &corpus) : m_{m}, corpus_{corpus}
    {
        index_.reserve(corpus.retained.size());
        for (std::size_t i = 0; i < corpus.retained.size(); ++i)
            index_.emplace(corpus.retained[i].doc_id, i);
        pieces_.resize(corpus.retained.size());
    }

    verification_report
    run()
    {
        check_summary();
        for (const auto &s : m_.samples)
            check_sample(s);
        check_shards();
        check_metrics();
        return std::move(report_);
    }

private:
    void
    add(std::string_view kind, std::optional<std::uint64_t> sample, std::string doc, std::string detail)
    {
        report_.violations.push_back({std::string{kind}, sample, std::move(doc), std::move(detail)});
    }

    void
    check_summary()
    {
        const corpus_summary &d = m_.documents;
        if (d.dropped != corpus_.dropped)
            add(violation_kind::corpus_mismatch, {}, {}, "dropped list differs from the corpus");
        if (d.retained_doc_count != corpus_.retained.size())
            add(violation_kind::corpus_mismatch, {}, {},
                "retained_doc_count " + std::to_string(d.retained_doc_count) + " but corpus yields " +
                    std::to_string(corpus_.retained.size()));

        token_count tokens = 0;
        for (const auto &doc : corpus_.retained)
            tokens += doc.length;
        if (d.retained_tokens != tokens)
            add(violation_kind::corpus_mismatch, {}, {}, "retained_tokens differs from the corpus");
    }

    void
    check_sample(const packed_sample &s)
    {
        const token_count cap = m_.config.context_length;
        const std::uint64_t si = s.sample_index;

        if (&s - m_.samples.data() != static_cast<std::ptrdiff_t>(si))
            add(violation_kind::occupancy, si, {}, "sample_index out of sequence");
        if (s.padding_begin > cap)
            add(violation_kind::capacity_exceeded, si, {}, "padding starts past the context length");

        struct span_t {
            token_count begin;
            token_count end;
            const placement *p;
        };
        std::vector<span_t> spans;

        for (const auto &p : s.placements) {
            auto it = index_.find(p.doc_id);
            if (it == index_.end()) {
                add(violation_kind::unknown_doc, si, p.doc_id, {});
                continue;
            }
            const document_record &doc = corpus_.retained[it->second];
            if (p.doc_length != doc.length)
                add(violation_kind::length_mismatch, si, p.doc_id,
                    "placement says " + std::to_string(p.doc_length) + ", corpus says " +
                        std::to_string(doc.length));
            if (!(p.start < p.end && p.end <= doc.length)) {
                add(violation_kind::invalid_range, si, p.doc_id,
                    "[" + std::to_string(p.start) + ", " + std::to_string(p.end) + ")");
                continue;
            }
            if (p.offset + p.size() > cap)
                add(violation_kind::capacity_exceeded, si, p.doc_id,
                    "offset " + std::to_string(p.offset) + " + " + std::to_string(p.size()) + " > " +
                        std::to_string(cap));

            spans.push_back({p.offset, p.offset + p.size(), &p});
            pieces_[it->second].push_back({si, p.start, p.end, p.offset});
        }
        for (token_count pos : s.separator_positions)
            spans.push_back({pos, pos + 1, nullptr});

        std::sort(spans.begin(), spans.end(),
                  [](const span_t &a, const span_t &b) { return a.begin < b.begin; });

        token_count cursor = 0;
        for (const auto &sp : spans) {
            if (sp.begin < cursor) {
                bool sep = sp.p == nullptr;
                add(sep ? violation_kind::separator_inside : violation_kind::overlap, si,
                    sep ? std::string{} : sp.p->doc_id, "at offset " + std::to_string(sp.begin));
            } else if (sp.begin > cursor) {
                add(violation_kind::occupancy, si, {}, "gap at offset " + std::to_string(cursor));
            }
            cursor = std::max(cursor, sp.end);
        }
        if (cursor > cap)
            add(violation_kind::capacity_exceeded, si, {}, "occupied tokens exceed the context length");
        if (cursor != s.padding_begin)
            add(violation_kind::occupancy, si, {},
                "occupied " + std::to_string(cursor) + " + padding " +
                    std::to_string(cap - std::min(cap, s.padding_begin)) + " != " + std::to_string(cap));

        if (m_.config.strategy != strategy::concat_then_split) {
            if (s.placements.empty() || s.placements.front().offset != 0 ||
                s.placements.front().start != 0)
                add(violation_kind::head_rule, si, {}, "sample does not start at a document start");
        }
    }

    void
    check_shards()
    {
        const auto &shards = m_.shards;
        std::uint64_t doc_cursor = 0, sample_cursor = 0;
        for (const auto &sh : shards) {
            if (sh.doc_begin != doc_cursor || sh.doc_end < sh.doc_begin ||
                sh.sample_begin != sample_cursor || sh.sample_end < sh.sample_begin) {
                add(violation_kind::shard_layout, {}, {}, "shards do not tile the corpus and samples");
                return;
            }
            doc_cursor = sh.doc_end;
            sample_cursor = sh.sample_end;
        }
        if (doc_cursor != corpus_.retained.size() || sample_cursor != m_.samples.size() ||
            shards.size() != m_.config.shard_count) {
            add(violation_kind::shard_layout, {}, {}, "shards do not tile the corpus and samples");
            return;
        }

        for (const auto &sh : shards)
            check_shard_coverage(sh);
    }

    void
    check_shard_coverage(const shard_info &sh)
    {
        const strategy strat = m_.config.strategy;
        const bool may_truncate = m_.config.drop_final_partial &&
                                  (strat == strategy::concat_then_split ||
                                   strat == strategy::restart_last_document);

        if (!may_truncate && sh.discarded_tokens != 0)
            add(violation_kind::token_accounting, {}, {}, "tokens discarded although nothing may be dropped");

        bool truncated = false;
        for (std::uint64_t d = sh.doc_begin; d < sh.doc_end; ++d) {
            const document_record &doc = corpus_.retained[d];
            auto &ps = pieces_[d];
            std::sort(ps.begin(), ps.end(), [](const piece &a, const piece &b) {
                return a.sample != b.sample ? a.sample < b.sample : a.offset < b.offset;
            });

            for (const auto &p : ps)
                if (p.sample < sh.sample_begin || p.sample >= sh.sample_end)
                    add(violation_kind::shard_layout, p.sample, doc.doc_id, "placed outside its shard");

            if (truncated) {
                if (!ps.empty())
                    add(violation_kind::missing_coverage, ps.front().sample, doc.doc_id,
                        "covered after an incompletely covered document");
                continue;
            }

            bool complete = false;
            switch (strat) {
            case strategy::pad_last_document:
            case strategy::best_fit:
                complete = check_whole_once(doc, ps);
                break;
            case strategy::concat_then_split:
                complete = check_partition_prefix(doc, ps);
                break;
            case strategy::restart_last_document:
                complete = check_restart(doc, ps);
                break;
            }

            if (!complete) {
                if (!may_truncate)
                    add(violation_kind::missing_coverage, {}, doc.doc_id, "document not fully covered");
                truncated = true;
            }
        }

        if (strat == strategy::concat_then_split) {
            std::uint64_t stream = 0;
            for (std::uint64_t d = sh.doc_begin; d < sh.doc_end; ++d)
                stream += corpus_.retained[d].length + m_.config.separator_cost();
            std::uint64_t packed = sh.discarded_tokens;
            for (std::uint64_t s = sh.sample_begin; s < sh.sample_end && s < m_.samples.size(); ++s)
                packed += m_.samples[s].padding_begin;
            if (stream != packed)
                add(violation_kind::token_accounting, {}, {},
                    "stream holds " + std::to_string(stream) + " tokens, samples and discarded tail hold " +
                        std::to_string(packed));
        }
    }

    // Exactly one placement covering the whole document.
    bool
    check_whole_once(const document_record &doc, const std::vector<piece> &ps)
    {
        if (ps.empty())
            return false;
        if (ps.size() > 1)
            add(violation_kind::duplicate_coverage, ps[1].sample, doc.doc_id, {});
        for (const auto &p : ps)
            if (p.start != 0 || p.end != doc.length)
                add(violation_kind::missing_coverage, p.sample, doc.doc_id, "document placed partially");
        return true;
    }

    // Disjoint consecutive pieces forming a prefix [0, k); complete iff k == length.
    bool
    check_partition_prefix(const document_record &doc, const std::vector<piece> &ps)
    {
        token_count covered = 0;
        for (const auto &p : ps) {
            if (p.start < covered)
                add(violation_kind::duplicate_coverage, p.sample, doc.doc_id,
                    "token " + std::to_string(p.start) + " covered twice");
            else if (p.start > covered)
                add(violation_kind::missing_coverage, p.sample, doc.doc_id,
                    "gap before token " + std::to_string(p.start));
            covered = std::max(covered, p.end);
        }
        return covered == doc.length;
    }

    // Either a whole placement, or a prefix ending its sample followed by a whole
    // placement at the head of the next sample. A lone prefix means truncation.
    bool
    check_restart(const document_record &doc, const std::vector<piece> &ps)
    {
        const token_count cap = m_.config.context_length;
        if (ps.empty())
            return false;
        if (ps.size() > 2) {
            add(violation_kind::duplicate_coverage, ps[2].sample, doc.doc_id, {});
            return true;
        }

        const piece &first = ps[0];
        const bool first_whole = first.start == 0 && first.end == doc.length;
        if (ps.size() == 1) {
            if (first.start != 0)
                add(violation_kind::missing_coverage, first.sample, doc.doc_id, "fragment is not a prefix");
            return first_whole;
        }

        const piece &second = ps[1];
        if (first_whole || first.start != 0 || first.offset + first.end != cap ||
            second.start != 0 || second.end != doc.length || second.offset != 0 ||
            second.sample != first.sample + 1)
            add(violation_kind::duplicate_coverage, second.sample, doc.doc_id,
                "placements do not form a tail fragment plus restart");
        return true;
    }

    void
    check_metrics()
    {
        packing_metrics fresh =
            compute_metrics(m_.samples, corpus_.retained.size(), m_.config.context_length);
        if (!(fresh == m_.metrics))
            add(violation_kind::metrics_mismatch, {}, {},
                "stored counters differ from counters recomputed from placements");
    }

    const packing_manifest &m_;
    const prepared_corpus &corpus_;
    std::unordered_map<std::string_view, std::size_t> index_;
    std::vector<std::vector<piece>> pieces_;
    verification_report report_;
};

}  // namespace detail

// Checks a manifest against the corpus it claims to pack. The configured
// long-document policy is re-applied to `documents` to obtain the retained set.
// Every violation is reported; none of them throws.
inline verification_report
verify_manifest(const packing_manifest &manifest, const std::vector<document_record> &documents)
{
    verification_report report;
    try {
        manifest.config.validate();
    } catch (const error &e) {
        report.violations.push_back({std::string{violation_kind::invalid_config}, {}, {}, e.what()});
        return report;
    }

    prepared_corpus corpus;
    try {
        corpus = prepare_corpus(documents, manifest.config);
    } catch (const error &e) {
        report.violations.push_back({std::string{violation_kind::corpus_mismatch}, {}, {}, e.what()});
        return report;
    }

    return detail::verifier{manifest, corpus}.run();
}

}  // namespace seqpack
