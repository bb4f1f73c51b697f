// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "openpub/bundle.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace openpub {

// Machine-readable expectations shipped next to each fixture bundle, so
// the test harness can read them without running the pipeline.
struct FixtureExpectations {
    std::vector<std::string> ground_truth_targets;
    std::vector<std::string> extracted_targets;
    // checker kind -> expected consolidated findings (id + supporting runs).
    struct ExpectedFinding {
        std::string id;
        std::set<int> supporting_runs;

        bool operator==(const ExpectedFinding&) const = default;
    };
    std::map<std::string, std::vector<ExpectedFinding>> findings_by_checker;
    std::vector<std::string> reference_covered;
    struct CoverageRowExpectation {
        std::string target_id;
        std::string status;

        bool operator==(const CoverageRowExpectation&) const = default;
    };
    std::vector<CoverageRowExpectation> coverage_rows;
    std::size_t coverage_covered = 0;
    std::size_t coverage_total = 0;
    std::vector<std::string> placeholders; // target ids expected to be placeholders
};

struct Fixture {
    std::string name;
    std::filesystem::path dir;
    ResearchBundle bundle;
    FixtureExpectations expectations;
    std::filesystem::path cassette; // empty when the fixture records none
};

// Fixture names this corpus registers.
const std::vector<std::string>& registered_fixtures();

// Loads a fixture bundle plus its expectations from
// <fixtures_root>/<name>/. Throws Error(UnknownFixture) for unregistered
// names.
Fixture load_fixture(std::string_view name, const std::filesystem::path& fixtures_root);

} // namespace openpub
