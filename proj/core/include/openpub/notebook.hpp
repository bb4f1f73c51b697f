// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "openpub/bundle.hpp"
#include "openpub/checkers.hpp"
#include "openpub/docmodel.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace openpub {

struct ScaffoldMetadata {
    std::string bundle_digest;
    std::string tool_version;
    std::int64_t generated_at = 0; // epoch seconds from the injected clock

    bool operator==(const ScaffoldMetadata&) const = default;
};

// One notebook section per reproduction target: a narrative markdown cell
// followed by a code cell (either quoted source or a placeholder).
struct TargetSection {
    std::string target_id;
    std::string narrative_markdown;
    std::string code_source;
    bool placeholder = false;

    bool operator==(const TargetSection&) const = default;
};

struct NotebookScaffold {
    std::string title_markdown; // header cell 1
    std::string setup_code;     // header cell 2
    std::vector<TargetSection> sections;
    ScaffoldMetadata metadata;

    bool operator==(const NotebookScaffold&) const = default;
};

// Placeholder code cells carry this visible first line plus the
// machine-readable metadata tag {"openpub": {"placeholder": true, "target": id}}.
std::string placeholder_marker(std::string_view target_id);

// Builds the scaffold: one section per target in extraction order. Targets
// with matched code get the region quoted in; unmatched targets (and
// matched targets carrying an empty-anchor code finding) get placeholders.
// Findings anchored to a target are summarized in its narrative cell;
// global findings land in the title cell.
NotebookScaffold build_scaffold(const std::vector<ReproTarget>& targets,
                                const std::vector<Finding>& findings,
                                const ResearchBundle& bundle, std::int64_t clock_epoch);

// Serializes to Jupyter notebook JSON (nbformat 4, nbformat_minor 5) with
// canonical key order, LF endings, and fixed indentation, so emitting the
// same scaffold twice is byte-identical.
std::string notebook_to_json(const NotebookScaffold& scaffold);
void emit_notebook(const NotebookScaffold& scaffold, const std::filesystem::path& out_path);

// Inverse of notebook_to_json: parse(emit(s)) == s.
NotebookScaffold parse_notebook(const std::string& text);
NotebookScaffold read_notebook(const std::filesystem::path& path);

// Structural contract check: required top-level keys, nbformat 4/5, the
// header/section cell layout, and code-cell fields (outputs: [],
// execution_count: null). Returns human-readable violations, empty = ok.
std::vector<std::string> notebook_contract_violations(const nlohmann::json& doc);

} // namespace openpub
