// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/fixtures.hpp"

#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace openpub {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& registered_fixtures() {
    static const std::vector<std::string> kNames = {"delong11", "laio-missing-fig4", "empty"};
    return kNames;
}

namespace {

std::vector<std::string> string_list(const json& j) {
    std::vector<std::string> out;
    for (const auto& e : j) {
        out.push_back(e.get<std::string>());
    }
    return out;
}

FixtureExpectations parse_expectations(const json& j) {
    FixtureExpectations e;
    if (j.contains("ground_truth_targets")) {
        e.ground_truth_targets = string_list(j["ground_truth_targets"]);
    }
    if (j.contains("extracted_targets")) {
        e.extracted_targets = string_list(j["extracted_targets"]);
    }
    if (j.contains("findings")) {
        for (const auto& [kind, list] : j["findings"].items()) {
            std::vector<FixtureExpectations::ExpectedFinding> findings;
            for (const auto& f : list) {
                FixtureExpectations::ExpectedFinding expected;
                expected.id = f.at("id").get<std::string>();
                if (f.contains("supporting_runs")) {
                    for (const auto& r : f["supporting_runs"]) {
                        expected.supporting_runs.insert(r.get<int>());
                    }
                }
                findings.push_back(std::move(expected));
            }
            e.findings_by_checker.emplace(kind, std::move(findings));
        }
    }
    if (j.contains("reference_covered")) {
        e.reference_covered = string_list(j["reference_covered"]);
    }
    if (j.contains("coverage")) {
        const json& c = j["coverage"];
        e.coverage_covered = c.at("covered").get<std::size_t>();
        e.coverage_total = c.at("total").get<std::size_t>();
        for (const auto& row : c.at("rows")) {
            e.coverage_rows.push_back(
                {row.at("target_id").get<std::string>(), row.at("status").get<std::string>()});
        }
    }
    if (j.contains("placeholders")) {
        e.placeholders = string_list(j["placeholders"]);
    }
    return e;
}

} // namespace

Fixture load_fixture(std::string_view name, const fs::path& fixtures_root) {
    const auto& names = registered_fixtures();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw Error(ErrorCode::UnknownFixture, std::string(name));
    }
    Fixture fixture;
    fixture.name = std::string(name);
    fixture.dir = fixtures_root / fixture.name;
    fixture.bundle = ingest_bundle(fixture.dir);

    const fs::path expectations_path = fixture.dir / "expected" / "expectations.json";
    if (fs::exists(expectations_path)) {
        json j;
        try {
            j = json::parse(read_file(expectations_path));
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ManifestInvalid,
                        expectations_path.generic_string() + ": " + e.what());
        }
        fixture.expectations = parse_expectations(j);
    }

    const fs::path cassette = fixture.dir / "cassettes" / "run.json";
    if (fs::exists(cassette)) {
        fixture.cassette = cassette;
    }
    return fixture;
}

} // namespace openpub
