// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0
//
// openpub CLI: orchestrates the dual-path audit pipeline over a bundle
// directory. Subcommands: run, check, notebook, annotate, coverage.

#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"
#include "openpub/pipeline.hpp"
#include "openpub/version.hpp"

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct CliOptions {
    std::string bundle_dir;
    std::string out_dir;
    std::string prompts_dir = "prompts";
    std::string backend = "mock";
    std::string cassette;
    std::string script;
    std::string consolidation = "union";
    std::string reference_file;
    int runs = 5;
    int workers = 4;
    bool record = false;
    bool offline = false;
    bool no_findings = false;
    std::uint64_t seed = 0;
    std::int64_t clock_epoch = -1;
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--bundle", opts.bundle_dir, "Bundle directory (contains openpub.json)")
        ->required();
    cmd->add_option("--out", opts.out_dir, "Output directory (default: openpub-out beside the bundle)");
    cmd->add_option("--runs", opts.runs, "Checker repetitions per kind")->default_val(5);
    cmd->add_option("--backend", opts.backend, "Backend mode")
        ->check(CLI::IsMember({"live", "replay", "mock"}))
        ->default_val("mock");
    cmd->add_option("--cassette", opts.cassette, "Cassette file (replay source / record target)");
    cmd->add_flag("--record", opts.record, "Record backend responses into the cassette");
    cmd->add_flag("--offline", opts.offline, "Skip dataset link reachability checks");
    cmd->add_option("--consolidation", opts.consolidation, "Consolidation mode")
        ->check(CLI::IsMember({"union", "llm"}))
        ->default_val("union");
    cmd->add_option("--seed", opts.seed, "Random seed recorded in the run manifest");
    cmd->add_option("--clock-epoch", opts.clock_epoch,
                    "Fixed clock (epoch seconds) for deterministic output");
    cmd->add_option("--workers", opts.workers, "Concurrent checker workers")->default_val(4);
    cmd->add_option("--prompts", opts.prompts_dir, "Prompt template directory")
        ->default_val("prompts");
    cmd->add_option("--script", opts.script, "Scripted responses for the mock backend");
    cmd->add_option("--reference", opts.reference_file,
                    "JSON array of target ids covered by a reference notebook");
}

openpub::PipelineOptions to_pipeline_options(const CliOptions& opts) {
    openpub::PipelineOptions p;
    p.bundle_dir = opts.bundle_dir;
    if (!opts.out_dir.empty()) {
        p.out_dir = opts.out_dir;
    }
    p.prompts_dir = opts.prompts_dir;
    if (!opts.cassette.empty()) {
        p.cassette_path = opts.cassette;
    }
    if (!opts.script.empty()) {
        p.script_path = opts.script;
    }
    p.record = opts.record;
    p.no_findings = opts.no_findings;
    if (opts.clock_epoch >= 0) {
        p.clock_epoch = opts.clock_epoch;
    }
    p.seed = opts.seed;
    p.config.runs = opts.runs;
    p.config.mode = *openpub::backend_mode_from_string(opts.backend);
    p.config.consolidation = opts.consolidation == "llm"
                                 ? openpub::ConsolidationMode::llm_assisted
                                 : openpub::ConsolidationMode::deterministic_union;
    p.config.workers = opts.workers;
    p.config.offline = opts.offline || p.config.mode != openpub::BackendMode::live;

    if (!opts.reference_file.empty()) {
        const std::string text = openpub::read_file(opts.reference_file);
        nlohmann::json j = nlohmann::json::parse(text);
        if (!j.is_array()) {
            throw openpub::Error(openpub::ErrorCode::InvalidArgument,
                                 "--reference must point at a JSON array of target ids");
        }
        for (const auto& id : j) {
            p.reference_covered.push_back(id.get<std::string>());
        }
    }
    return p;
}

int run_stage(const std::string& stage, const CliOptions& opts) {
    if (opts.backend == "replay" && opts.cassette.empty()) {
        std::cerr << "error: --backend replay requires --cassette\n";
        return 1;
    }
    try {
        const openpub::PipelineOptions pipeline = to_pipeline_options(opts);
        openpub::StageResult result;
        if (stage == "run") {
            result = openpub::cmd_run(pipeline);
        } else if (stage == "check") {
            result = openpub::cmd_check(pipeline);
        } else if (stage == "notebook") {
            result = openpub::cmd_notebook(pipeline);
        } else if (stage == "annotate") {
            result = openpub::cmd_annotate(pipeline);
        } else {
            result = openpub::cmd_coverage(pipeline);
        }
        for (const auto& warning : result.warnings) {
            std::cerr << "warning: " << warning << "\n";
        }
        const auto out_dir =
            pipeline.out_dir.empty() ? openpub::default_out_dir(pipeline.bundle_dir)
                                     : pipeline.out_dir;
        for (const auto& file : result.outputs) {
            std::cout << "wrote " << (out_dir / file).generic_string() << "\n";
        }
        return 0;
    } catch (const openpub::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == openpub::ErrorCode::AllRunsFailed ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"openpub — reproducibility audit pipeline"};
    app.set_version_flag("--version", std::string(openpub::kToolVersion));
    app.require_subcommand(1);

    CliOptions opts;
    CLI::App* cmd_run = app.add_subcommand("run", "Full pipeline: audit, notebook, annotations, coverage");
    CLI::App* cmd_check = app.add_subcommand("check", "Run the four checkers and write findings.jsonl");
    CLI::App* cmd_notebook = app.add_subcommand("notebook", "Generate the reader notebook scaffold");
    CLI::App* cmd_annotate = app.add_subcommand("annotate", "Write the author review report and annotated code");
    CLI::App* cmd_coverage = app.add_subcommand("coverage", "Compare notebook coverage against ground truth");
    for (CLI::App* cmd : {cmd_run, cmd_check, cmd_notebook, cmd_annotate, cmd_coverage}) {
        add_common_flags(cmd, opts);
    }
    cmd_notebook->add_flag("--no-findings", opts.no_findings,
                           "Build the scaffold without a findings file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    for (const auto& [stage, cmd] :
         std::initializer_list<std::pair<const char*, CLI::App*>>{{"run", cmd_run},
                                                                  {"check", cmd_check},
                                                                  {"notebook", cmd_notebook},
                                                                  {"annotate", cmd_annotate},
                                                                  {"coverage", cmd_coverage}}) {
        if (cmd->parsed()) {
            return run_stage(stage, opts);
        }
    }
    return 1;
}
