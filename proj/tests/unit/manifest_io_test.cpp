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

#include <sstream>

#include <gtest/gtest.h>

#include "seqpack/manifest_io.hpp"
#include "seqpack/strategies.hpp"
#include "support/corpus_gen.hpp"

using namespace seqpack;

namespace {

packing_manifest
roundtrip(const packing_manifest &m)
{
    std::istringstream in{manifest_to_string(m)};
    return read_manifest(in);
}

}  // namespace

TEST(ManifestIo, ToyManifestLayout)
{
    packing_config cfg;
    cfg.context_length = 5;
    cfg.strategy = strategy::pad_last_document;
    auto text = manifest_to_string(pack_corpus(fixtures::lengths_corpus({3, 4, 2}), cfg));

    EXPECT_EQ(text.rfind("{\n\"format\": \"seqpack-manifest\",\n\"version\": 1,\n", 0), 0u) << text;
    EXPECT_NE(text.find("\n[[[\"d0\",3,0,3,0]],[3],4],\n"), std::string::npos) << text;
    EXPECT_NE(text.find("\n[[[\"d2\",2,0,2,0]],[2],3]\n]\n}\n"), std::string::npos) << text;
}

TEST(ManifestIo, RoundTripsEveryStrategyAndPolicy)
{
    fixtures::rng_t rng{31};
    for (int trial = 0; trial < 40; ++trial) {
        auto docs = fixtures::random_corpus(rng, fixtures::random_doc_count(rng, 200), 50);
        for (strategy s : all_strategies) {
            packing_config cfg;
            cfg.context_length = 12;
            cfg.strategy = s;
            cfg.long_doc = static_cast<long_doc_policy>(trial % 3);
            cfg.slide_overlap = 3;
            cfg.shard_count = 1 + trial % 4;
            cfg.drop_final_partial = trial % 2 == 0;
            auto m = pack_corpus(docs, cfg);
            auto back = roundtrip(m);
            ASSERT_EQ(back, m);
            ASSERT_EQ(manifest_to_string(back), manifest_to_string(m));
        }
    }
}

TEST(ManifestIo, EmptyManifest)
{
    packing_config cfg;
    cfg.context_length = 8;
    auto m = pack_corpus({}, cfg);
    EXPECT_EQ(roundtrip(m), m);
    EXPECT_NE(manifest_to_string(m).find("\"samples\": []\n"), std::string::npos);
}

TEST(ManifestIo, MalformedInputIsDataError)
{
    for (const char *bad : {"", "{", "{\"format\": \"other\", \"version\": 1}", "[1,2,3]",
                            "{\"format\": \"seqpack-manifest\", \"version\": 2}"}) {
        std::istringstream in{bad};
        EXPECT_THROW(read_manifest(in), data_error) << bad;
    }
}

TEST(ManifestIo, AtomicFileWrite)
{
    fixtures::temp_dir dir{"manifest"};
    packing_config cfg;
    cfg.context_length = 6;
    auto m = pack_corpus(fixtures::lengths_corpus({1, 2, 3, 4}), cfg);
    write_manifest_file(dir / "m.json", m);
    EXPECT_EQ(read_manifest_file(dir / "m.json"), m);

    std::size_t entries = 0;
    for ([[maybe_unused]] const auto &e : std::filesystem::directory_iterator{dir.path()})
        ++entries;
    EXPECT_EQ(entries, 1u);

    EXPECT_THROW(read_manifest_file(dir / "absent.json"), io_error);
    EXPECT_THROW(write_manifest_file(dir / "no" / "such" / "m.json", m), io_error);
}

TEST(ConfigJson, PartialOverride)
{
    packing_config base;
    base.context_length = 64;
    auto cfg = config_from_json(nlohmann::json{{"strategy", "pld"}, {"long_doc_policy", "drop"}}, base);
    EXPECT_EQ(cfg.context_length, 64u);
    EXPECT_EQ(cfg.strategy, strategy::pad_last_document);
    EXPECT_EQ(cfg.long_doc, long_doc_policy::drop);
    EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg);
    EXPECT_THROW(config_from_json(nlohmann::json{{"strategy", "nope"}}), config_error);
}
