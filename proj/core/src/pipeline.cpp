// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/pipeline.hpp"

#include "openpub/docmodel.hpp"
#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"
#include "openpub/prompts.hpp"
#include "openpub/version.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <ctime>
#include <thread>

namespace openpub {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::int64_t resolve_clock(const PipelineOptions& options) {
    if (options.clock_epoch) {
        return *options.clock_epoch;
    }
    return static_cast<std::int64_t>(std::time(nullptr));
}

fs::path resolve_out_dir(const PipelineOptions& options) {
    return options.out_dir.empty() ? default_out_dir(options.bundle_dir) : options.out_dir;
}

LlmGateway make_gateway(const PipelineOptions& options) {
    switch (options.config.mode) {
    case BackendMode::replay: {
        if (options.cassette_path.empty()) {
            throw Error(ErrorCode::InvalidArgument, "replay backend requires a cassette path");
        }
        return LlmGateway::replay(Cassette::load(options.cassette_path));
    }
    case BackendMode::mock: {
        ScriptedResponder responder;
        if (!options.script_path.empty()) {
            responder = load_script(options.script_path);
        }
        return LlmGateway::mock(std::move(responder));
    }
    case BackendMode::live: {
        auto transport = options.transport ? options.transport : make_httplib_transport();
        return LlmGateway::live(live_config_from_env(), std::move(transport));
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown backend mode");
}

struct CheckerStageOutput {
    std::vector<Finding> consolidated; // all kinds, sorted by (checker, id)
    std::map<std::string, std::vector<RunOutcome>> outcomes_by_kind;
    std::vector<std::string> warnings;
};

CheckerStageOutput run_checker_stage(const ResearchBundle& bundle,
                                     const PipelineOptions& options, LlmGateway& gateway) {
    const PromptLibrary prompts = PromptLibrary::load_dir(options.prompts_dir);

    // Dataset link verification may only reach the network in live mode.
    std::shared_ptr<Transport> reachability;
    if (options.config.mode == BackendMode::live && !options.config.offline) {
        reachability = options.transport ? options.transport : make_httplib_transport();
    }
    CheckerEngine engine(prompts, gateway, options.config, reachability);

    std::array<std::vector<RunOutcome>, kAllCheckerKinds.size()> outcomes;
    std::array<std::exception_ptr, kAllCheckerKinds.size()> failures;
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= kAllCheckerKinds.size()) {
                return;
            }
            try {
                outcomes[i] = engine.run_checker(kAllCheckerKinds[i], bundle);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const int thread_count =
        std::clamp(options.config.workers, 1, static_cast<int>(kAllCheckerKinds.size()));
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(thread_count));
        for (int i = 0; i < thread_count; ++i) {
            threads.emplace_back(worker);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    CheckerStageOutput out;
    for (std::size_t i = 0; i < kAllCheckerKinds.size(); ++i) {
        const CheckerKind kind = kAllCheckerKinds[i];
        auto consolidated = engine.consolidate(successful_runs(outcomes[i]));
        out.consolidated.insert(out.consolidated.end(),
                                std::make_move_iterator(consolidated.begin()),
                                std::make_move_iterator(consolidated.end()));
        out.outcomes_by_kind.emplace(std::string(to_string(kind)), std::move(outcomes[i]));
    }
    out.warnings = engine.warnings();

    if (options.record && !options.cassette_path.empty() &&
        options.config.mode != BackendMode::replay) {
        Cassette merged;
        if (fs::exists(options.cassette_path)) {
            merged = Cassette::load(options.cassette_path);
        }
        for (const auto& entry : gateway.recorded().entries()) {
            merged.append_entry(entry);
        }
        merged.save(options.cassette_path);
    }
    return out;
}

std::vector<ReproTarget> derive_targets(const ResearchBundle& bundle) {
    return match_targets_to_code(extract_targets(bundle), bundle);
}

std::vector<std::string> ground_truth_or_self(const ResearchBundle& bundle,
                                              const std::vector<ReproTarget>& targets) {
    if (bundle.manifest.ground_truth_targets) {
        return *bundle.manifest.ground_truth_targets;
    }
    std::vector<std::string> self;
    self.reserve(targets.size());
    for (const auto& t : targets) {
        self.push_back(t.id);
    }
    return self;
}

// Removes everything this invocation wrote, for failure cleanup.
class OutputTracker {
public:
    explicit OutputTracker(fs::path out_dir) : out_dir_(std::move(out_dir)) {}

    fs::path track(const char* name) {
        written_.push_back(name);
        return out_dir_ / name;
    }

    void track_dir(const char* name) { dirs_.push_back(name); }

    void cleanup() noexcept {
        std::error_code ec;
        for (const auto& name : written_) {
            fs::remove(out_dir_ / name, ec);
        }
        for (const auto& name : dirs_) {
            fs::remove_all(out_dir_ / name, ec);
        }
    }

    const std::vector<std::string>& files() const { return written_; }

private:
    fs::path out_dir_;
    std::vector<std::string> written_;
    std::vector<std::string> dirs_;
};

StageResult write_annotation_outputs(const ResearchBundle& bundle,
                                     const std::vector<Finding>& findings,
                                     const fs::path& out_dir, OutputTracker& tracker) {
    StageResult result;
    AnnotationSet set = build_annotations(findings, bundle);
    result.warnings.insert(result.warnings.end(), set.warnings.begin(), set.warnings.end());

    write_annotation_sidecar(tracker.track(kSidecarFile), set);
    result.outputs.push_back(kSidecarFile);

    write_file_atomic(tracker.track(kReviewFile), render_review_report(set, findings, bundle));
    result.outputs.push_back(kReviewFile);

    // The annotated tree belongs to this run; clear any previous copy.
    tracker.track_dir(kAnnotatedDir);
    std::error_code ec;
    fs::remove_all(out_dir / kAnnotatedDir, ec);
    const auto injection = inject_code_comments(set, bundle, out_dir / kAnnotatedDir);
    result.warnings.insert(result.warnings.end(), injection.warnings.begin(),
                           injection.warnings.end());
    for (const auto& rel : injection.written_files) {
        result.outputs.push_back(std::string(kAnnotatedDir) + "/" + rel);
    }
    return result;
}

StageResult write_coverage_outputs(const NotebookScaffold& scaffold,
                                   const std::vector<std::string>& ground_truth,
                                   const std::vector<std::string>& reference,
                                   OutputTracker& tracker) {
    StageResult result;
    const CoverageReport report = compute_coverage(scaffold, ground_truth, reference);
    write_file_atomic(tracker.track(kCoverageJsonFile), coverage_to_json(report));
    result.outputs.push_back(kCoverageJsonFile);
    write_file_atomic(tracker.track(kCoverageMarkdownFile), coverage_to_markdown(report));
    result.outputs.push_back(kCoverageMarkdownFile);
    return result;
}

ordered_json config_to_json(const PipelineOptions& options) {
    ordered_json cfg;
    cfg["runs"] = options.config.runs;
    cfg["backend"] = std::string(to_string(options.config.mode));
    cfg["consolidation"] = options.config.consolidation == ConsolidationMode::llm_assisted
                               ? "llm"
                               : "union";
    cfg["offline"] = options.config.offline;
    cfg["workers"] = options.config.workers;
    cfg["manuscript_budget"] = options.config.manuscript_budget;
    cfg["code_budget"] = options.config.code_budget;
    cfg["temperature"] = options.config.temperature;
    return cfg;
}

} // namespace

fs::path default_out_dir(const fs::path& bundle_dir) {
    // Beside the bundle, never inside it.
    const fs::path normalized = bundle_dir.lexically_normal();
    return normalized.parent_path() / "openpub-out";
}

StageResult cmd_check(const PipelineOptions& options) {
    const fs::path out_dir = resolve_out_dir(options);
    fs::create_directories(out_dir);
    OutputTracker tracker(out_dir);

    const ResearchBundle bundle = ingest_bundle(options.bundle_dir);
    LlmGateway gateway = make_gateway(options);

    StageResult result;
    try {
        CheckerStageOutput stage = run_checker_stage(bundle, options, gateway);
        write_findings_jsonl(tracker.track(kFindingsFile), stage.consolidated);
        result.outputs.push_back(kFindingsFile);
        result.warnings = std::move(stage.warnings);
    } catch (...) {
        tracker.cleanup();
        throw;
    }
    return result;
}

StageResult cmd_notebook(const PipelineOptions& options) {
    const fs::path out_dir = resolve_out_dir(options);
    fs::create_directories(out_dir);
    OutputTracker tracker(out_dir);

    const ResearchBundle bundle = ingest_bundle(options.bundle_dir);
    const auto targets = derive_targets(bundle);

    std::vector<Finding> findings;
    if (!options.no_findings) {
        const fs::path findings_path = out_dir / kFindingsFile;
        if (!fs::exists(findings_path)) {
            throw Error(ErrorCode::MissingStageInput,
                        std::string(kFindingsFile) + " (run the check stage or pass --no-findings)");
        }
        findings = read_findings_jsonl(findings_path);
    }

    StageResult result;
    try {
        const NotebookScaffold scaffold =
            build_scaffold(targets, findings, bundle, resolve_clock(options));
        emit_notebook(scaffold, tracker.track(kNotebookFile));
        result.outputs.push_back(kNotebookFile);
    } catch (...) {
        tracker.cleanup();
        throw;
    }
    return result;
}

StageResult cmd_annotate(const PipelineOptions& options) {
    const fs::path out_dir = resolve_out_dir(options);
    fs::create_directories(out_dir);
    OutputTracker tracker(out_dir);

    const ResearchBundle bundle = ingest_bundle(options.bundle_dir);
    const fs::path findings_path = out_dir / kFindingsFile;
    if (!fs::exists(findings_path)) {
        throw Error(ErrorCode::MissingStageInput, kFindingsFile);
    }
    const std::vector<Finding> findings = read_findings_jsonl(findings_path);

    try {
        return write_annotation_outputs(bundle, findings, out_dir, tracker);
    } catch (...) {
        tracker.cleanup();
        throw;
    }
}

StageResult cmd_coverage(const PipelineOptions& options) {
    const fs::path out_dir = resolve_out_dir(options);
    fs::create_directories(out_dir);
    OutputTracker tracker(out_dir);

    const ResearchBundle bundle = ingest_bundle(options.bundle_dir);
    const fs::path notebook_path = out_dir / kNotebookFile;
    if (!fs::exists(notebook_path)) {
        throw Error(ErrorCode::MissingStageInput, kNotebookFile);
    }
    const NotebookScaffold scaffold = read_notebook(notebook_path);
    const auto targets = derive_targets(bundle);

    try {
        return write_coverage_outputs(scaffold, ground_truth_or_self(bundle, targets),
                                      options.reference_covered, tracker);
    } catch (...) {
        tracker.cleanup();
        throw;
    }
}

StageResult cmd_run(const PipelineOptions& options) {
    const fs::path out_dir = resolve_out_dir(options);
    fs::create_directories(out_dir);
    OutputTracker tracker(out_dir);

    StageResult result;
    try {
        const ResearchBundle bundle = ingest_bundle(options.bundle_dir);
        const auto targets = derive_targets(bundle);

        LlmGateway gateway = make_gateway(options);
        CheckerStageOutput stage = run_checker_stage(bundle, options, gateway);
        result.warnings = std::move(stage.warnings);

        write_findings_jsonl(tracker.track(kFindingsFile), stage.consolidated);
        result.outputs.push_back(kFindingsFile);

        const NotebookScaffold scaffold =
            build_scaffold(targets, stage.consolidated, bundle, resolve_clock(options));
        emit_notebook(scaffold, tracker.track(kNotebookFile));
        result.outputs.push_back(kNotebookFile);

        StageResult annotation =
            write_annotation_outputs(bundle, stage.consolidated, out_dir, tracker);
        result.outputs.insert(result.outputs.end(), annotation.outputs.begin(),
                              annotation.outputs.end());
        result.warnings.insert(result.warnings.end(), annotation.warnings.begin(),
                               annotation.warnings.end());

        if (bundle.manifest.ground_truth_targets) {
            StageResult coverage = write_coverage_outputs(
                scaffold, *bundle.manifest.ground_truth_targets, options.reference_covered,
                tracker);
            result.outputs.insert(result.outputs.end(), coverage.outputs.begin(),
                                  coverage.outputs.end());
        }

        // Provenance manifest, written last: every listed output exists.
        ordered_json manifest;
        manifest["bundle_digest"] = bundle.content_digest;
        manifest["tool_version"] = kToolVersion;
        manifest["clock_epoch"] = resolve_clock(options);
        manifest["seed"] = options.seed;
        manifest["config"] = config_to_json(options);
        if (!options.prompts_dir.empty()) {
            const PromptLibrary prompts = PromptLibrary::load_dir(options.prompts_dir);
            ordered_json digests = ordered_json::object();
            for (const auto& [id, digest] : prompts.digests()) {
                digests[id] = digest;
            }
            manifest["prompt_digests"] = std::move(digests);
        }
        ordered_json runs = ordered_json::object();
        for (const auto& [kind, outcomes] : stage.outcomes_by_kind) {
            ordered_json list = ordered_json::array();
            for (const auto& o : outcomes) {
                ordered_json entry;
                entry["run_index"] = o.run_index;
                entry["ok"] = o.ok;
                if (!o.ok) {
                    entry["error"] = o.error;
                }
                list.push_back(std::move(entry));
            }
            runs[kind] = std::move(list);
        }
        manifest["checker_runs"] = std::move(runs);

        std::vector<std::string> artifact_files;
        std::vector<std::string> annotated_files;
        for (const auto& name : result.outputs) {
            if (name.rfind(std::string(kAnnotatedDir) + "/", 0) == 0) {
                annotated_files.push_back(name);
            } else {
                artifact_files.push_back(name);
            }
        }
        std::sort(annotated_files.begin(), annotated_files.end());
        manifest["outputs"] = artifact_files;
        manifest["annotated_files"] = annotated_files;

        write_file_atomic(tracker.track(kRunManifestFile), manifest.dump(2) + "\n");
        result.outputs.push_back(kRunManifestFile);
    } catch (...) {
        tracker.cleanup();
        throw;
    }
    return result;
}

} // namespace openpub
