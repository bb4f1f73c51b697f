// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "openpub/bundle.hpp"
#include "openpub/docmodel.hpp"
#include "openpub/llmgate.hpp"
#include "openpub/prompts.hpp"

#include <array>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace openpub {

// The four audit passes. Exactly these kinds exist.
enum class CheckerKind { hyperparameter, dataset, code, documentation };

inline constexpr std::array<CheckerKind, 4> kAllCheckerKinds = {
    CheckerKind::hyperparameter, CheckerKind::dataset, CheckerKind::code,
    CheckerKind::documentation};

std::string_view to_string(CheckerKind kind);
std::optional<CheckerKind> checker_kind_from_string(std::string_view name);

enum class Severity { critical, major, minor };

std::string_view to_string(Severity severity);
std::optional<Severity> severity_from_string(std::string_view name);

// An anchor points either into a code file (1-based line range) or into a
// manuscript file (byte span).
struct Anchor {
    std::string file;
    std::variant<ByteSpan, LineRange> loc;

    bool operator==(const Anchor&) const = default;
};

// Stable textual rendering used inside finding ids:
// "<file>:B<begin>-<end>", "<file>:L<first>-<last>", or "global".
std::string anchor_key(const std::optional<Anchor>& anchor);

// Lowercases, maps punctuation to spaces, collapses whitespace runs, and
// trims — so "d_c" and "d_c " unify to the same finding id.
std::string normalize_name(std::string_view name);

std::string finding_id(CheckerKind kind, std::string_view name,
                       const std::optional<Anchor>& anchor);

// A step-1 enumeration item before filtering.
struct Candidate {
    CheckerKind checker = CheckerKind::hyperparameter;
    std::string name;
    std::string context; // quoted evidence, capped at 500 chars
    std::optional<Anchor> anchor;

    bool operator==(const Candidate&) const = default;
};

inline constexpr std::size_t kContextCap = 500;
inline constexpr std::size_t kRecommendationCap = 280;

// A consolidated, anchored reproducibility issue.
struct Finding {
    std::string id;
    CheckerKind checker = CheckerKind::hyperparameter;
    Severity severity = Severity::major;
    std::optional<Anchor> anchor;
    std::string message;
    std::string recommendation; // capped at 280 chars
    std::set<int> supporting_runs;

    bool operator==(const Finding&) const = default;
};

enum class ConsolidationMode { deterministic_union, llm_assisted };

struct PipelineConfig {
    int runs = 5; // the default repetition count
    BackendMode mode = BackendMode::mock;
    ConsolidationMode consolidation = ConsolidationMode::deterministic_union;
    double temperature = 0.7;
    std::size_t manuscript_budget = 12000; // characters per call
    std::size_t code_budget = 12000;
    bool offline = true; // reachability checks only run in live online mode
    int workers = 4;
};

struct RunOutcome {
    int run_index = 0;
    bool ok = false;
    std::string error; // set when !ok
    std::vector<Finding> findings;
};

// Deterministic union over finding ids: merged findings keep the
// lexicographically-smallest message and recommendation among duplicates,
// the highest severity, and the union of supporting runs. Output is
// sorted by (checker, id). Idempotent, order-insensitive, and monotone.
std::vector<Finding> consolidate_union(
    const std::vector<std::pair<int, std::vector<Finding>>>& per_run);

// Prompt-context excerpting. Manuscripts reduce to headings + captions +
// as much body text as the budget allows; code files over budget reduce
// to comments and signature-like lines.
std::string build_manuscript_excerpt(const ResearchBundle& bundle, std::size_t budget);
std::string build_code_excerpt(const ResearchBundle& bundle, std::size_t budget);

// Runs the two-step checker pipelines over one gateway.
class CheckerEngine {
public:
    CheckerEngine(const PromptLibrary& prompts, LlmGateway& gateway, PipelineConfig config,
                  std::shared_ptr<Transport> reachability_transport = nullptr);

    // Step 1: enumerate candidates. A response that stays unparsable
    // after one repair prompt throws Error(ResponseUnparsable).
    std::vector<Candidate> run_step1(CheckerKind kind, const ResearchBundle& bundle,
                                     int run_index);

    // Step 2: filter candidates into findings. Output is a subset of the
    // input candidates by id; unknown names are dropped with a warning.
    // An empty candidate list short-circuits without a backend call.
    std::vector<Finding> run_step2(CheckerKind kind, const std::vector<Candidate>& candidates,
                                   const ResearchBundle& bundle, int run_index);

    // Executes step1 -> step2 for run_index 0..K-1. Failed runs are
    // recorded but not fatal; throws Error(AllRunsFailed) if none succeed.
    std::vector<RunOutcome> run_checker(CheckerKind kind, const ResearchBundle& bundle);

    // Consolidates successful runs per the configured mode. llm_assisted
    // starts from the deterministic union and may fuse near-duplicates
    // through the "consolidate" template; output ids stay a subset of the
    // union's.
    std::vector<Finding> consolidate(
        const std::vector<std::pair<int, std::vector<Finding>>>& per_run);

    std::vector<std::string> warnings() const;

private:
    std::string send_with_repair(const std::string& template_id, const std::string& prompt,
                                 int run_index, std::string* raw_out);
    void verify_dataset_links(std::vector<Finding>& findings, const ResearchBundle& bundle);
    void warn(std::string message);

    const PromptLibrary& prompts_;
    LlmGateway& gateway_;
    PipelineConfig config_;
    std::shared_ptr<Transport> reachability_;
    mutable std::mutex warn_mutex_;
    std::vector<std::string> warnings_;
};

// Keeps only successful runs, as (run_index, findings) pairs.
std::vector<std::pair<int, std::vector<Finding>>> successful_runs(
    const std::vector<RunOutcome>& outcomes);

// Findings are exchanged as JSON Lines with fields exactly
// {id, checker, severity, anchor, message, recommendation, supporting_runs}.
std::string findings_to_jsonl(const std::vector<Finding>& findings);
std::vector<Finding> findings_from_jsonl(std::string_view text);
void write_findings_jsonl(const std::filesystem::path& path,
                          const std::vector<Finding>& findings);
std::vector<Finding> read_findings_jsonl(const std::filesystem::path& path);

// Extracts the first balanced JSON array embedded in free-form text.
std::optional<std::string> extract_json_array(std::string_view text);

} // namespace openpub
