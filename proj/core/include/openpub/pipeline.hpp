// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "openpub/annotate.hpp"
#include "openpub/bundle.hpp"
#include "openpub/checkers.hpp"
#include "openpub/coverage.hpp"
#include "openpub/notebook.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace openpub {

// Output file names inside the run directory.
inline constexpr const char* kFindingsFile = "findings.jsonl";
inline constexpr const char* kNotebookFile = "notebook.ipynb";
inline constexpr const char* kSidecarFile = "annotations.json";
inline constexpr const char* kReviewFile = "review.md";
inline constexpr const char* kCoverageJsonFile = "coverage.json";
inline constexpr const char* kCoverageMarkdownFile = "coverage.md";
inline constexpr const char* kAnnotatedDir = "annotated";
inline constexpr const char* kRunManifestFile = "run_manifest.json";

struct PipelineOptions {
    std::filesystem::path bundle_dir;
    std::filesystem::path out_dir;       // empty -> sibling "openpub-out" of the bundle
    std::filesystem::path prompts_dir;   // required by check/run
    std::filesystem::path cassette_path; // replay source, record destination
    std::filesystem::path script_path;   // optional scripted-mock table
    bool record = false;
    bool no_findings = false; // notebook stage without a findings file
    std::vector<std::string> reference_covered;
    std::optional<std::int64_t> clock_epoch; // injectable clock (epoch seconds)
    std::uint64_t seed = 0;
    PipelineConfig config;
    std::shared_ptr<Transport> transport; // injected in tests; live default on demand
};

struct StageResult {
    std::vector<std::string> outputs; // files written, relative to out dir
    std::vector<std::string> warnings;
};

std::filesystem::path default_out_dir(const std::filesystem::path& bundle_dir);

// Stage entry points. Each stage re-derives bundle state (ingestion is
// deterministic) and reads prior stage outputs from the out directory;
// missing prerequisites raise Error(MissingStageInput) naming the file.
StageResult cmd_check(const PipelineOptions& options);
StageResult cmd_notebook(const PipelineOptions& options);
StageResult cmd_annotate(const PipelineOptions& options);
StageResult cmd_coverage(const PipelineOptions& options);

// Full pipeline: ingest -> targets -> 4 checkers x K runs -> consolidate
// -> notebook (reader path) -> annotations + report (author path) ->
// coverage when ground truth is present -> run manifest. Partial outputs
// are removed on failure.
StageResult cmd_run(const PipelineOptions& options);

} // namespace openpub
