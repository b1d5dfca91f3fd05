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

#include <gtest/gtest.h>

#include "seqpack/strategies.hpp"
#include "seqpack/verify.hpp"
#include "support/corpus_gen.hpp"

using namespace seqpack;

namespace {

packing_manifest
toy_manifest(strategy s)
{
    packing_config cfg;
    cfg.context_length = 5;
    cfg.strategy = s;
    return pack_corpus(fixtures::lengths_corpus({3, 4, 2}), cfg);
}

const std::vector<document_record> toy_docs = fixtures::lengths_corpus({3, 4, 2});

}  // namespace

TEST(Verify, EngineManifestsPass)
{
    for (strategy s : all_strategies) {
        auto report = verify_manifest(toy_manifest(s), toy_docs);
        EXPECT_TRUE(report.ok()) << to_string(s) << ": " << report.violations.front().to_string();
    }
}

TEST(Verify, DetectsCapacityExceeded)
{
    auto m = toy_manifest(strategy::pad_last_document);
    m.samples[1].placements[0].offset = 1;  // B now ends at 5, separator at 5
    m.samples[1].separator_positions = {5};
    auto report = verify_manifest(m, toy_docs);
    EXPECT_TRUE(report.has(violation_kind::capacity_exceeded));
}

TEST(Verify, DetectsDuplicateCoverage)
{
    auto m = toy_manifest(strategy::pad_last_document);
    m.samples[2].placements[0] = {"d0", 3, 0, 3, 0};
    m.samples[2].separator_positions = {3};
    m.samples[2].padding_begin = 4;
    auto report = verify_manifest(m, toy_docs);
    EXPECT_TRUE(report.has(violation_kind::duplicate_coverage));
    EXPECT_TRUE(report.has(violation_kind::missing_coverage));
}

TEST(Verify, DetectsHeadRuleViolation)
{
    auto m = toy_manifest(strategy::restart_last_document);
    m.samples[1].placements[0].start = 1;
    auto report = verify_manifest(m, toy_docs);
    EXPECT_TRUE(report.has(violation_kind::head_rule));
}

TEST(Verify, DetectsUnknownDocumentAndLengthMismatch)
{
    auto m = toy_manifest(strategy::best_fit);
    m.samples[0].placements[0].doc_id = "ghost";
    EXPECT_TRUE(verify_manifest(m, toy_docs).has(violation_kind::unknown_doc));

    m = toy_manifest(strategy::best_fit);
    m.samples[0].placements[0].doc_length += 1;
    EXPECT_TRUE(verify_manifest(m, toy_docs).has(violation_kind::length_mismatch));
}

TEST(Verify, DetectsMetricsTampering)
{
    auto m = toy_manifest(strategy::concat_then_split);
    m.metrics.fragmented_doc_count = 0;
    EXPECT_TRUE(verify_manifest(m, toy_docs).has(violation_kind::metrics_mismatch));
}

TEST(Verify, DetectsWrongCorpus)
{
    auto m = toy_manifest(strategy::best_fit);
    EXPECT_FALSE(verify_manifest(m, fixtures::lengths_corpus({3, 4, 2, 1})).ok());
}

TEST(Verify, DetectsOverlapAndSeparatorInsidePlacement)
{
    auto m = toy_manifest(strategy::concat_then_split);
    m.samples[0].placements[1].offset = 2;
    EXPECT_FALSE(verify_manifest(m, toy_docs).ok());

    m = toy_manifest(strategy::concat_then_split);
    m.samples[0].separator_positions = {1};
    EXPECT_FALSE(verify_manifest(m, toy_docs).ok());
}

TEST(Verify, ViolationToStringNamesSampleAndDocument)
{
    violation v{std::string{violation_kind::head_rule}, 3, "d1", "starts at token 2"};
    EXPECT_EQ(v.to_string(), "head rule sample=3 doc_id=d1: starts at token 2");
}
