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

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "seqpack/manifest_io.hpp"
#include "support/corpus_gen.hpp"

using namespace seqpack;

namespace {

struct run_result {
    int status = -1;
    std::string output;  // stdout and stderr interleaved
};

run_result
run(const std::string &args)
{
    run_result r;
    const std::string cmd = std::string{SEQPACK_CLI_PATH} + " " + args + " 2>&1";
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return r;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        r.output.append(buf, n);
    int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

const std::string toy = std::string{SEQPACK_SAMPLES_DIR} + "/toy.jsonl";

std::string
slurp(const std::filesystem::path &p)
{
    std::ifstream in{p, std::ios::binary};
    return {std::istreambuf_iterator<char>{in}, {}};
}

}  // namespace

TEST(Cli, PackPrintsSummaryLine)
{
    auto r = run("pack --context-length 5 --strategy pld " + toy);
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(r.output, "strategy=pad_last_document samples=3 frag=0.0000 pad=0.2000\n"
                        "dropped=0 discarded_tail_tokens=0\n");
}

TEST(Cli, PackWithDropReportsDroppedCount)
{
    fixtures::temp_dir dir{"cli_drop"};
    std::ofstream{dir / "c.jsonl"} << "{\"doc_id\":\"a\",\"length\":3}\n{\"doc_id\":\"b\",\"length\":9}\n";
    auto r = run("pack -L 5 --strategy best_fit --long-doc drop " + (dir / "c.jsonl").string());
    EXPECT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("dropped=1"), std::string::npos) << r.output;
}

TEST(Cli, ExitCodes)
{
    auto missing = run("pack -L 5 /nonexistent/corpus.jsonl");
    EXPECT_EQ(missing.status, 2);
    EXPECT_NE(missing.output.find("/nonexistent/corpus.jsonl"), std::string::npos);

    EXPECT_EQ(run("pack -L 5 --strategy nope " + toy).status, 1);
    EXPECT_EQ(run("pack -L 1 " + toy).status, 1);
    EXPECT_EQ(run("pack --bogus-flag " + toy).status, 1);
    EXPECT_EQ(run("").status, 1);

    auto pre = run("pack -L 4 --strategy rld --long-doc none " + toy);
    EXPECT_EQ(pre.status, 3);
    EXPECT_NE(pre.output.find("long-document policy"), std::string::npos) << pre.output;

    EXPECT_EQ(run("verify -m /nonexistent/m.json " + toy).status, 5);
}

TEST(Cli, CompareRows)
{
    auto all = run("compare -L 5 " + toy);
    ASSERT_EQ(all.status, 0) << all.output;
    for (const char *name : {"concat_then_split", "restart_last_document", "pad_last_document", "best_fit"})
        EXPECT_NE(all.output.find(name), std::string::npos) << name;
    EXPECT_NE(all.output.find("66.7"), std::string::npos);
    EXPECT_NE(all.output.find("33.3"), std::string::npos);
    EXPECT_NE(all.output.find("20.00"), std::string::npos);

    auto one = run("compare -L 5 --strategies pld " + toy);
    ASSERT_EQ(one.status, 0);
    EXPECT_EQ(one.output.find("best_fit"), std::string::npos);
    EXPECT_NE(one.output.find("pad_last_document"), std::string::npos);

    EXPECT_EQ(run("compare -L 5 --strategies pld --online " + toy).status, 1);

    auto json = run("compare -L 5 --json --strategies cts,bfp " + toy);
    ASSERT_EQ(json.status, 0);
    auto j = nlohmann::json::parse(json.output);
    ASSERT_EQ(j["rows"].size(), 2u);
    EXPECT_EQ(j["rows"][0]["strategy"], "concat_then_split");
}

TEST(Cli, StatsCountsOverLength)
{
    fixtures::temp_dir dir{"cli_stats"};
    std::ofstream{dir / "c.jsonl"} << "{\"doc_id\":\"a\",\"length\":3}\n{\"doc_id\":\"b\",\"length\":9}\n"
                                      "{\"doc_id\":\"c\",\"length\":4}\n";
    auto r = run("stats -L 4 " + (dir / "c.jsonl").string());
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.output.find("over_length=1 "), std::string::npos) << r.output;
}

TEST(Cli, VerifyOkAndViolations)
{
    fixtures::temp_dir dir{"cli_verify"};
    const auto manifest = (dir / "m.json").string();
    ASSERT_EQ(run("pack -L 5 --strategy rld -o " + manifest + " " + toy).status, 0);

    auto ok = run("verify -m " + manifest + " " + toy);
    EXPECT_EQ(ok.status, 0);
    EXPECT_EQ(ok.output, "ok\n");

    auto m = read_manifest_file(manifest);
    m.samples[1].placements[0].start = 1;
    write_manifest_file(manifest, m);
    auto bad = run("verify -m " + manifest + " " + toy);
    EXPECT_EQ(bad.status, 4);
    EXPECT_NE(bad.output.find("head rule sample=1"), std::string::npos) << bad.output;
}

TEST(Cli, ConfigFileUnderFlags)
{
    fixtures::temp_dir dir{"cli_config"};
    std::ofstream{dir / "cfg.json"} << R"({"context_length": 5, "strategy": "pld"})";
    const auto manifest = (dir / "m.json").string();

    ASSERT_EQ(run("pack --config " + (dir / "cfg.json").string() + " -L 7 -o " + manifest + " " + toy).status, 0);
    auto m = read_manifest_file(manifest);
    EXPECT_EQ(m.config.context_length, 7u);
    EXPECT_EQ(m.config.strategy, strategy::pad_last_document);

    EXPECT_EQ(run("pack --config " + (dir / "absent.json").string() + " " + toy).status, 1);
}

TEST(Cli, EmitDecodeCheckAndDeterminism)
{
    fixtures::temp_dir dir{"cli_emit"};
    fixtures::rng_t rng{11};
    auto fc = fixtures::write_full_corpus(dir.path(), {3, 4, 2, 17, 1, 8}, rng);
    const auto corpus = fc.corpus_file.string();

    std::string outputs[2];
    for (int i = 0; i < 2; ++i) {
        const auto manifest = (dir / ("m" + std::to_string(i) + ".json")).string();
        const auto samples = (dir / ("s" + std::to_string(i) + ".bin")).string();
        ASSERT_EQ(run("pack -L 6 --strategy bfp -o " + manifest + " " + corpus).status, 0);
        auto r = run("emit -m " + manifest + " -o " + samples + " --decode-check " + corpus);
        ASSERT_EQ(r.status, 0) << r.output;
        EXPECT_NE(r.output.find("decode-check ok documents="), std::string::npos) << r.output;
        outputs[i] = slurp(manifest) + slurp(samples);
    }
    EXPECT_EQ(outputs[0], outputs[1]);

    // A lengths-only corpus cannot back an emission.
    EXPECT_EQ(run("emit -m " + (dir / "m0.json").string() + " -o " + (dir / "x.bin").string() + " " + toy).status,
              2);
}
