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

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "seqpack/error.hpp"
#include "seqpack/io.hpp"
#include "seqpack/types.hpp"

namespace seqpack {

// Manifest text format (schema in docs/manifest.md). Keys inside objects are
// sorted; each sample occupies one line as
//   [[[doc_id, doc_length, start, end, offset], ...], [separator offsets...], padding_begin]
// and each shard as [doc_begin, doc_end, sample_begin, sample_end, discarded_tokens].
inline constexpr std::string_view manifest_format = "seqpack-manifest";
inline constexpr int manifest_version = 1;

inline nlohmann::json
config_to_json(const packing_config &cfg)
{
    return {
        {"context_length", cfg.context_length},
        {"strategy", std::string{to_string(cfg.strategy)}},
        {"long_doc_policy", std::string{to_string(cfg.long_doc)}},
        {"slide_overlap", cfg.slide_overlap},
        {"separator_id", cfg.separator_id},
        {"padding_id", cfg.padding_id},
        {"sep_after_every_doc", cfg.sep_after_every_doc},
        {"drop_final_partial", cfg.drop_final_partial},
        {"online", cfg.online},
        {"shard_count", cfg.shard_count},
    };
}

// Missing keys keep `base` values, which lets a partial config file sit under
// command-line overrides.
inline packing_config
config_from_json(const nlohmann::json &j, packing_config base = {})
{
    if (!j.is_object())
        throw config_error{"config must be a JSON object"};

    try {
        if (auto it = j.find("context_length"); it != j.end())
            base.context_length = it->get<token_count>();
        if (auto it = j.find("strategy"); it != j.end())
            base.strategy = parse_strategy(it->get<std::string>());
        if (auto it = j.find("long_doc_policy"); it != j.end())
            base.long_doc = parse_long_doc_policy(it->get<std::string>());
        if (auto it = j.find("slide_overlap"); it != j.end())
            base.slide_overlap = it->get<token_count>();
        if (auto it = j.find("separator_id"); it != j.end())
            base.separator_id = it->get<token_id>();
        if (auto it = j.find("padding_id"); it != j.end())
            base.padding_id = it->get<token_id>();
        if (auto it = j.find("sep_after_every_doc"); it != j.end())
            base.sep_after_every_doc = it->get<bool>();
        if (auto it = j.find("drop_final_partial"); it != j.end())
            base.drop_final_partial = it->get<bool>();
        if (auto it = j.find("online"); it != j.end())
            base.online = it->get<bool>();
        if (auto it = j.find("shard_count"); it != j.end())
            base.shard_count = it->get<std::uint32_t>();
    } catch (const nlohmann::json::exception &e) {
        throw config_error{std::string{"invalid config value: "} + e.what()};
    }
    return base;
}

inline nlohmann::json
metrics_to_json(const packing_metrics &m)
{
    return {
        {"sample_count", m.sample_count},
        {"total_training_tokens", m.total_training_tokens},
        {"retained_doc_count", m.retained_doc_count},
        {"fragmented_doc_count", m.fragmented_doc_count},
        {"padding_token_count", m.padding_token_count},
        {"fragmentation_rate", m.fragmentation_rate().to_double()},
        {"padding_rate", m.padding_rate().to_double()},
    };
}

inline void
write_manifest(std::ostream &out, const packing_manifest &m)
{
    nlohmann::json docs = {
        {"input_doc_count", m.documents.input_doc_count},
        {"input_tokens", m.documents.input_tokens},
        {"retained_doc_count", m.documents.retained_doc_count},
        {"retained_tokens", m.documents.retained_tokens},
        {"dropped", m.documents.dropped},
        {"discarded_tail_tokens", m.discarded_tokens()},
    };

    nlohmann::json shards = nlohmann::json::array();
    for (const auto &s : m.shards)
        shards.push_back({s.doc_begin, s.doc_end, s.sample_begin, s.sample_end, s.discarded_tokens});

    out << "{\n";
    out << "\"format\": \"" << manifest_format << "\",\n";
    out << "\"version\": " << manifest_version << ",\n";
    out << "\"config\": " << config_to_json(m.config).dump() << ",\n";
    out << "\"documents\": " << docs.dump() << ",\n";
    out << "\"metrics\": " << metrics_to_json(m.metrics).dump() << ",\n";
    out << "\"shards\": " << shards.dump() << ",\n";
    out << "\"samples\": [";

    bool first = true;
    for (const auto &s : m.samples) {
        nlohmann::json placements = nlohmann::json::array();
        for (const auto &p : s.placements)
            placements.push_back({p.doc_id, p.doc_length, p.start, p.end, p.offset});
        nlohmann::json row = {placements, s.separator_positions, s.padding_begin};

        out << (first ? "\n" : ",\n") << row.dump();
        first = false;
    }
    out << (first ? "]\n" : "\n]\n") << "}\n";
}

inline std::string
manifest_to_string(const packing_manifest &m)
{
    std::ostringstream out;
    write_manifest(out, m);
    return out.str();
}

inline packing_manifest
read_manifest(std::istream &in)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw data_error{std::string{"malformed manifest: "} + e.what()};
    }

    packing_manifest m;
    try {
        if (j.at("format").get<std::string>() != manifest_format)
            throw data_error{"malformed manifest: unexpected format tag"};
        if (j.at("version").get<int>() != manifest_version)
            throw data_error{"unsupported manifest version " + j.at("version").dump()};

        m.config = config_from_json(j.at("config"));

        const auto &docs = j.at("documents");
        m.documents.input_doc_count = docs.at("input_doc_count").get<std::uint64_t>();
        m.documents.input_tokens = docs.at("input_tokens").get<std::uint64_t>();
        m.documents.retained_doc_count = docs.at("retained_doc_count").get<std::uint64_t>();
        m.documents.retained_tokens = docs.at("retained_tokens").get<std::uint64_t>();
        m.documents.dropped = docs.at("dropped").get<std::vector<std::string>>();

        const auto &met = j.at("metrics");
        m.metrics.sample_count = met.at("sample_count").get<std::uint64_t>();
        m.metrics.total_training_tokens = met.at("total_training_tokens").get<std::uint64_t>();
        m.metrics.retained_doc_count = met.at("retained_doc_count").get<std::uint64_t>();
        m.metrics.fragmented_doc_count = met.at("fragmented_doc_count").get<std::uint64_t>();
        m.metrics.padding_token_count = met.at("padding_token_count").get<std::uint64_t>();

        for (const auto &s : j.at("shards")) {
            shard_info info;
            info.doc_begin = s.at(0).get<std::uint64_t>();
            info.doc_end = s.at(1).get<std::uint64_t>();
            info.sample_begin = s.at(2).get<std::uint64_t>();
            info.sample_end = s.at(3).get<std::uint64_t>();
            info.discarded_tokens = s.at(4).get<std::uint64_t>();
            m.shards.push_back(info);
        }

        const auto &samples = j.at("samples");
        m.samples.reserve(samples.size());
        for (const auto &row : samples) {
            packed_sample s;
            s.sample_index = m.samples.size();
            for (const auto &p : row.at(0)) {
                s.placements.push_back(placement{
                    p.at(0).get<std::string>(),
                    p.at(1).get<token_count>(),
                    p.at(2).get<token_count>(),
                    p.at(3).get<token_count>(),
                    p.at(4).get<token_count>(),
                });
            }
            s.separator_positions = row.at(1).get<std::vector<token_count>>();
            s.padding_begin = row.at(2).get<token_count>();
            m.samples.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception &e) {
        throw data_error{std::string{"malformed manifest: "} + e.what()};
    } catch (const config_error &e) {
        throw data_error{std::string{"malformed manifest config: "} + e.what()};
    }
    return m;
}

inline packing_manifest
read_manifest_file(const std::filesystem::path &path)
{
    std::ifstream in{path};
    if (!in)
        throw io_error{"cannot open manifest '" + path.string() + "'"};
    return read_manifest(in);
}

inline void
write_manifest_file(const std::filesystem::path &path, const packing_manifest &m)
{
    write_file_atomic(path, [&](std::ostream &out) { write_manifest(out, m); });
}

}  // namespace seqpack
