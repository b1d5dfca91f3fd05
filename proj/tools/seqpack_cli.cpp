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

// seqpack: offline packing of tokenized corpora into fixed-length samples.
//
// Exit codes: 0 success, 1 config/usage error, 2 corpus error, 3 strategy
// precondition violated, 4 verification or decode failure, 5 I/O failure.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqpack/seqpack.hpp"

namespace fs = std::filesystem;

namespace {

using seqpack::packing_config;

// Packing flags shared by `pack` and `compare`. Flags given on the command
// line override values from --config.
struct config_flags {
    std::string config_file;
    seqpack::token_count context_length = seqpack::default_context_length;
    std::string strategy = "best_fit";
    std::string long_doc = "split";
    seqpack::token_count slide_overlap = 1;
    seqpack::token_id sep_id = 0;
    seqpack::token_id pad_id = 1;
    bool no_sep = false;
    bool no_final_drop = false;
    bool online = false;
    std::uint32_t shards = 1;

    CLI::Option *context_length_opt = nullptr;
    CLI::Option *strategy_opt = nullptr;
    CLI::Option *long_doc_opt = nullptr;
    CLI::Option *slide_overlap_opt = nullptr;
    CLI::Option *sep_id_opt = nullptr;
    CLI::Option *pad_id_opt = nullptr;
    CLI::Option *no_sep_opt = nullptr;
    CLI::Option *no_final_drop_opt = nullptr;
    CLI::Option *online_opt = nullptr;
    CLI::Option *shards_opt = nullptr;

    void
    attach(CLI::App &cmd, bool with_strategy)
    {
        cmd.add_option("--config", config_file, "JSON file with packing config; flags override it");
        context_length_opt = cmd.add_option("-L,--context-length", context_length, "Sample length in tokens");
        if (with_strategy)
            strategy_opt = cmd.add_option("--strategy", strategy,
                                          "concat_then_split|restart_last_document|pad_last_document|best_fit "
                                          "(or cts|rld|pld|bfp)");
        long_doc_opt = cmd.add_option("--long-doc", long_doc, "Long-document policy: split|slide|drop|none");
        slide_overlap_opt = cmd.add_option("--slide-overlap", slide_overlap, "Window overlap in tokens (slide)");
        sep_id_opt = cmd.add_option("--sep-id", sep_id, "Separator token id");
        pad_id_opt = cmd.add_option("--pad-id", pad_id, "Padding token id");
        no_sep_opt = cmd.add_flag("--no-sep", no_sep, "Do not insert a separator after each document");
        no_final_drop_opt = cmd.add_flag("--no-final-drop", no_final_drop,
                                         "Pad the final partial sample instead of dropping it");
        online_opt = cmd.add_flag("--online", online, "Best-fit in input order (no decreasing sort)");
        shards_opt = cmd.add_option("--shards", shards, "Pack this many contiguous corpus shards independently");
    }

    packing_config
    resolve() const
    {
        packing_config cfg;
        if (!config_file.empty()) {
            std::ifstream in{config_file};
            if (!in)
                throw seqpack::config_error{"cannot open config file '" + config_file + "'"};
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error &e) {
                throw seqpack::config_error{"malformed config file '" + config_file + "': " + e.what()};
            }
            cfg = seqpack::config_from_json(j, cfg);
        }

        if (context_length_opt->count())
            cfg.context_length = context_length;
        if (strategy_opt && strategy_opt->count())
            cfg.strategy = seqpack::parse_strategy(strategy);
        if (long_doc_opt->count())
            cfg.long_doc = seqpack::parse_long_doc_policy(long_doc);
        if (slide_overlap_opt->count())
            cfg.slide_overlap = slide_overlap;
        if (sep_id_opt->count())
            cfg.separator_id = sep_id;
        if (pad_id_opt->count())
            cfg.padding_id = pad_id;
        if (no_sep_opt->count())
            cfg.sep_after_every_doc = false;
        if (no_final_drop_opt->count())
            cfg.drop_final_partial = false;
        if (online_opt->count())
            cfg.online = true;
        if (shards_opt->count())
            cfg.shard_count = shards;
        return cfg;
    }
};

std::vector<fs::path>
as_paths(const std::vector<std::string> &names)
{
    return {names.begin(), names.end()};
}

std::string
hex64(std::uint64_t v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%016" PRIx64, v);
    return buf;
}

int
run_pack(const config_flags &flags, const std::vector<std::string> &corpus, const std::string &out)
{
    packing_config cfg = flags.resolve();
    cfg.validate();

    auto docs = seqpack::ingest_corpus_files(as_paths(corpus), seqpack::ingest_mode::lengths_only);
    auto manifest = seqpack::pack_corpus(docs, cfg);

    if (!out.empty())
        seqpack::write_manifest_file(out, manifest);

    std::cout << seqpack::summary_line(manifest) << "\n";
    std::cout << "dropped=" << manifest.documents.dropped.size()
              << " discarded_tail_tokens=" << manifest.discarded_tokens() << "\n";
    return 0;
}

int
run_compare(const config_flags &flags,
            const std::vector<std::string> &corpus,
            const std::vector<std::string> &names,
            bool as_json)
{
    packing_config cfg = flags.resolve();

    std::vector<seqpack::strategy> strategies;
    for (const auto &n : names)
        strategies.push_back(seqpack::parse_strategy(n));
    if (strategies.empty())
        strategies.assign(seqpack::all_strategies.begin(), seqpack::all_strategies.end());

    if (cfg.online) {
        for (auto s : strategies)
            if (s != seqpack::strategy::best_fit)
                throw seqpack::config_error{"--online conflicts with strategy " +
                                            std::string{seqpack::to_string(s)} +
                                            "; it applies only to best_fit"};
    }
    // Validate everything but the strategy/online pairing, which is per row.
    packing_config probe = cfg;
    probe.strategy = seqpack::strategy::best_fit;
    probe.validate();

    auto docs = seqpack::ingest_corpus_files(as_paths(corpus), seqpack::ingest_mode::lengths_only);
    auto cmp = seqpack::compare_strategies(docs, cfg, strategies);

    if (as_json)
        std::cout << seqpack::comparison_to_json(cmp).dump(2) << "\n";
    else
        std::cout << seqpack::render_comparison_table(cmp);

    int status = 0;
    for (const auto &row : cmp.rows)
        if (!row.ok() && status == 0)
            status = static_cast<int>(*row.failure);
    return status;
}

int
run_verify(const std::string &manifest_path, const std::vector<std::string> &corpus)
{
    auto manifest = seqpack::read_manifest_file(manifest_path);
    auto docs = seqpack::ingest_corpus_files(as_paths(corpus), seqpack::ingest_mode::lengths_only);

    auto report = seqpack::verify_manifest(manifest, docs);
    if (report.ok()) {
        std::cout << "ok\n";
        return 0;
    }
    for (const auto &v : report.violations)
        std::cout << v.to_string() << "\n";
    return static_cast<int>(seqpack::error_kind::data);
}

int
run_emit(const std::string &manifest_path,
         const std::vector<std::string> &corpus,
         const std::string &out,
         bool decode_check,
         bool mask_separators)
{
    auto manifest = seqpack::read_manifest_file(manifest_path);
    auto docs = seqpack::ingest_corpus_files(as_paths(corpus), seqpack::ingest_mode::full);
    if (auto report = seqpack::verify_manifest(manifest, docs); !report.ok())
        throw seqpack::data_error{"manifest does not verify against the corpus: " +
                                  report.violations.front().to_string()};
    auto prepared = seqpack::prepare_corpus(docs, manifest.config);

    seqpack::file_token_store store;
    seqpack::emit_options opts;
    opts.train_separators = !mask_separators;

    seqpack::emission_summary summary;
    seqpack::write_file_atomic(out, [&](std::ostream &sink) {
        summary = seqpack::emit_samples(manifest, prepared.retained, store, sink, opts);
    });

    std::cout << "samples=" << summary.samples_written << " tokens=" << summary.tokens_written
              << " bytes=" << summary.bytes_written << " masked=" << summary.masked_tokens
              << " checksum=" << hex64(summary.checksum) << "\n";

    if (!decode_check)
        return 0;

    std::ifstream in{out, std::ios::binary};
    if (!in)
        throw seqpack::io_error{"cannot reopen '" + out + "'"};
    auto decoded = seqpack::decode_samples(in, manifest);

    std::unordered_map<std::string_view, const seqpack::document_record *> by_id;
    for (const auto &d : prepared.retained)
        by_id.emplace(d.doc_id, &d);

    std::uint64_t complete = 0;
    for (const auto &d : decoded.documents) {
        auto it = by_id.find(d.doc_id);
        if (it == by_id.end() || !it->second->tokens)
            throw seqpack::data_error{"decode-check: unknown doc_id '" + d.doc_id + "'"};
        auto expected = store.read(*it->second->tokens, 0, d.tokens.size());
        if (expected != d.tokens)
            throw seqpack::data_error{"decode-check: tokens differ for doc_id '" + d.doc_id + "'"};
        complete += d.complete() ? 1 : 0;
    }
    if (!mask_separators && decoded.masked_tokens != manifest.metrics.padding_token_count)
        throw seqpack::data_error{"decode-check: masked token count differs from padding count"};

    std::cout << "decode-check ok documents=" << decoded.documents.size() << " complete=" << complete << "\n";
    return 0;
}

int
run_stats(const std::vector<std::string> &corpus, seqpack::token_count context_length, bool no_sep)
{
    auto docs = seqpack::ingest_corpus_files(as_paths(corpus), seqpack::ingest_mode::lengths_only);
    auto st = seqpack::compute_corpus_stats(docs, context_length, no_sep ? 0 : 1);
    std::cout << seqpack::render_corpus_stats(st, context_length);
    return 0;
}

}  // namespace

int
main(int argc, char **argv)
{
    CLI::App app{"seqpack: pack tokenized documents into fixed-length training samples"};
    app.require_subcommand(1);

    config_flags pack_flags;
    std::vector<std::string> pack_corpus;
    std::string pack_out;
    auto *pack = app.add_subcommand("pack", "Pack a corpus and write a manifest");
    pack_flags.attach(*pack, true);
    pack->add_option("corpus", pack_corpus, "Corpus JSONL file(s)")->required();
    pack->add_option("-o,--out", pack_out, "Manifest output path");

    config_flags cmp_flags;
    std::vector<std::string> cmp_corpus;
    std::vector<std::string> cmp_strategies;
    bool cmp_json = false;
    auto *compare = app.add_subcommand("compare", "Compare strategies on one corpus");
    cmp_flags.attach(*compare, false);
    compare->add_option("corpus", cmp_corpus, "Corpus JSONL file(s)")->required();
    compare->add_option("--strategies", cmp_strategies, "Strategies to compare (default: all)")->delimiter(',');
    compare->add_flag("--json", cmp_json, "Print machine-readable rows");

    std::string verify_manifest;
    std::vector<std::string> verify_corpus;
    auto *verify = app.add_subcommand("verify", "Check a manifest against its corpus");
    verify->add_option("-m,--manifest", verify_manifest, "Manifest path")->required();
    verify->add_option("corpus", verify_corpus, "Corpus JSONL file(s)")->required();

    std::string emit_manifest, emit_out;
    std::vector<std::string> emit_corpus;
    bool emit_check = false, emit_mask_sep = false;
    auto *emit = app.add_subcommand("emit", "Write packed token samples for a manifest");
    emit->add_option("-m,--manifest", emit_manifest, "Manifest path")->required();
    emit->add_option("corpus", emit_corpus, "Full-mode corpus JSONL file(s)")->required();
    emit->add_option("-o,--out", emit_out, "Sample file output path")->required();
    emit->add_flag("--decode-check", emit_check, "Decode the written file and compare with the token store");
    emit->add_flag("--mask-separators", emit_mask_sep, "Give separator tokens loss mask 0");

    std::vector<std::string> stats_corpus;
    seqpack::token_count stats_length = seqpack::default_context_length;
    bool stats_no_sep = false;
    auto *stats = app.add_subcommand("stats", "Corpus length statistics");
    stats->add_option("corpus", stats_corpus, "Corpus JSONL file(s)")->required();
    stats->add_option("-L,--context-length", stats_length, "Context length for over-length counts");
    stats->add_flag("--no-sep", stats_no_sep, "Do not charge a separator per document");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*pack)
            return run_pack(pack_flags, pack_corpus, pack_out);
        if (*compare)
            return run_compare(cmp_flags, cmp_corpus, cmp_strategies, cmp_json);
        if (*verify)
            return run_verify(verify_manifest, verify_corpus);
        if (*emit)
            return run_emit(emit_manifest, emit_corpus, emit_out, emit_check, emit_mask_sep);
        if (*stats)
            return run_stats(stats_corpus, stats_length, stats_no_sep);
    } catch (const seqpack::error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(seqpack::error_kind::io);
    }
    return 1;
}
