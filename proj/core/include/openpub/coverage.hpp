// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "openpub/notebook.hpp"

#include <string>
#include <vector>

namespace openpub {

enum class CoverageStatus { both, ours_only, reference_only, neither };

std::string_view to_string(CoverageStatus status);

struct CoverageRow {
    std::string target_id;
    bool ours = false;      // the scaffold has a section for this target
    bool reference = false; // the reference notebook covered it
    CoverageStatus status = CoverageStatus::neither;

    bool operator==(const CoverageRow&) const = default;
};

// Three-way coverage of a scaffold against a ground-truth target list.
// Placeholder sections count as covered: coverage is about identifying
// and scaffolding targets, not supplying working code.
struct CoverageReport {
    std::vector<CoverageRow> rows; // ground-truth order = appearance order
    std::size_t covered = 0;       // rows with ours = true
    std::size_t total = 0;         // |ground_truth|
    double ratio = 0.0;            // covered / total

    bool operator==(const CoverageReport&) const = default;
};

// ground_truth must be nonempty (Error(InvalidArgument)) and
// reference_covered a subset of it (Error(UnknownTarget) otherwise).
CoverageReport compute_coverage(const NotebookScaffold& scaffold,
                                const std::vector<std::string>& ground_truth,
                                const std::vector<std::string>& reference_covered);

std::string coverage_to_json(const CoverageReport& report);
CoverageReport coverage_from_json(const std::string& text);

// Markdown table with a status column standing in for row colors.
std::string coverage_to_markdown(const CoverageReport& report);

} // namespace openpub
