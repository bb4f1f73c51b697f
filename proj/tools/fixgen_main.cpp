// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0
//
// Developer tool: records a replay cassette for a fixture bundle by
// running the checker pipeline against its scripted-mock response table.
// Committed cassettes are regenerated with this tool whenever a fixture
// manuscript, code file, or prompt template changes.

#include "openpub/bundle.hpp"
#include "openpub/checkers.hpp"
#include "openpub/error.hpp"
#include "openpub/llmgate.hpp"
#include "openpub/prompts.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"openpub-fixgen — record fixture cassettes from mock scripts"};
    std::string fixture_dir;
    std::string prompts_dir = "prompts";
    std::string script_path;
    std::string out_path;
    int runs = 5;
    app.add_option("--fixture", fixture_dir, "Fixture bundle directory")->required();
    app.add_option("--prompts", prompts_dir, "Prompt template directory")->default_val("prompts");
    app.add_option("--script", script_path, "Mock script (default: <fixture>/mock/script.json)");
    app.add_option("--out", out_path, "Cassette output (default: <fixture>/cassettes/run.json)");
    app.add_option("--runs", runs, "Repetitions per checker")->default_val(5);
    CLI11_PARSE(app, argc, argv);

    namespace fs = std::filesystem;
    if (script_path.empty()) {
        script_path = (fs::path(fixture_dir) / "mock" / "script.json").string();
    }
    if (out_path.empty()) {
        out_path = (fs::path(fixture_dir) / "cassettes" / "run.json").string();
    }

    try {
        const openpub::ResearchBundle bundle = openpub::ingest_bundle(fixture_dir);
        const openpub::PromptLibrary prompts = openpub::PromptLibrary::load_dir(prompts_dir);

        openpub::LlmGateway gateway = openpub::LlmGateway::mock(openpub::load_script(script_path));
        gateway.enable_recording();

        openpub::PipelineConfig config;
        config.runs = runs;
        config.mode = openpub::BackendMode::mock;
        config.workers = 1; // keep cassette entry order stable
        openpub::CheckerEngine engine(prompts, gateway, config);

        for (const openpub::CheckerKind kind : openpub::kAllCheckerKinds) {
            const auto outcomes = engine.run_checker(kind, bundle);
            for (const auto& outcome : outcomes) {
                std::cout << openpub::to_string(kind) << " run " << outcome.run_index << ": ";
                if (!outcome.ok) {
                    std::cout << "FAILED (" << outcome.error << ")\n";
                    continue;
                }
                std::cout << outcome.findings.size() << " findings\n";
                for (const auto& f : outcome.findings) {
                    std::cout << "    " << f.id << "\n";
                }
            }
        }
        for (const auto& warning : engine.warnings()) {
            std::cerr << "warning: " << warning << "\n";
        }

        gateway.recorded().save(out_path);
        std::cout << "recorded " << gateway.recorded().size() << " entries -> " << out_path
                  << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
