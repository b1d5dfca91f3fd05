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
#include <unordered_set>
#include <vector>

#include "seqpack/error.hpp"
#include "seqpack/types.hpp"

namespace seqpack {

namespace detail {

inline document_record
derive_part(const document_record &doc, std::size_t k, token_count start, token_count length)
{
    document_record part;
    part.doc_id = doc.doc_id + "#" + std::to_string(k);
    part.length = length;
    if (doc.tokens)
        part.tokens = token_ref{doc.tokens->file, doc.tokens->byte_offset + start * sizeof(token_id)};
    part.origin = source_span{doc.doc_id, start};
    return part;
}

}  // namespace detail

// Cuts a document longer than `max_length` into consecutive parts of exactly
// `max_length` tokens; the last part keeps whatever remains.
inline std::vector<document_record>
preprocess_split(const document_record &doc, token_count max_length)
{
    if (doc.length <= max_length)
        return {doc};

    std::vector<document_record> parts;
    parts.reserve((doc.length + max_length - 1) / max_length);
    for (token_count start = 0; start < doc.length; start += max_length)
        parts.push_back(detail::derive_part(doc, parts.size(), start,
                                            std::min(max_length, doc.length - start)));
    return parts;
}

// Covers a long document with windows of exactly `max_length` tokens, stride
// `max_length - overlap`. A window that would run past the end is moved back so
// it ends on the last token.
inline std::vector<document_record>
preprocess_slide(const document_record &doc, token_count max_length, token_count overlap)
{
    if (max_length < 2 || overlap < 1 || overlap >= max_length)
        throw config_error{"slide overlap " + std::to_string(overlap) + " out of range [1, " +
                           std::to_string(max_length > 0 ? max_length - 1 : 0) + "]"};

    if (doc.length <= max_length)
        return {doc};

    const token_count stride = max_length - overlap;

    std::vector<document_record> windows;
    for (token_count start = 0;; start += stride) {
        if (start + max_length >= doc.length) {
            windows.push_back(
                detail::derive_part(doc, windows.size(), doc.length - max_length, max_length));
            break;
        }
        windows.push_back(detail::derive_part(doc, windows.size(), start, max_length));
    }
    return windows;
}

inline std::optional<document_record>
preprocess_drop(const document_record &doc, token_count max_length)
{
    if (doc.length > max_length)
        return std::nullopt;
    return doc;
}

struct prepared_corpus {
    std::vector<document_record> retained;
    std::vector<std::string> dropped;
    std::uint64_t input_doc_count = 0;
    std::uint64_t input_tokens = 0;
};

// Applies the configured long-document policy, in input order. Documents are
// limited to item_capacity() so each one still fits a sample with its separator.
inline prepared_corpus
prepare_corpus(const std::vector<document_record> &docs, const packing_config &cfg)
{
    cfg.validate();

    const token_count limit = cfg.item_capacity();

    prepared_corpus out;
    out.input_doc_count = docs.size();
    out.retained.reserve(docs.size());

    for (const auto &doc : docs) {
        out.input_tokens += doc.length;

        switch (cfg.long_doc) {
        case long_doc_policy::split:
            for (auto &part : preprocess_split(doc, limit))
                out.retained.push_back(std::move(part));
            break;
        case long_doc_policy::slide:
            for (auto &window : preprocess_slide(doc, limit, cfg.slide_overlap))
                out.retained.push_back(std::move(window));
            break;
        case long_doc_policy::drop:
            if (auto kept = preprocess_drop(doc, limit))
                out.retained.push_back(std::move(*kept));
            else
                out.dropped.push_back(doc.doc_id);
            break;
        case long_doc_policy::none:
            out.retained.push_back(doc);
            break;
        }
    }

    if (out.retained.size() != docs.size()) {
        std::unordered_set<std::string_view> ids;
        ids.reserve(out.retained.size());
        for (const auto &doc : out.retained)
            if (!ids.insert(doc.doc_id).second)
                throw corpus_error{"derived doc_id '" + doc.doc_id + "' collides with another document"};
    }

    return out;
}

}  // namespace seqpack
