// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/coverage.hpp"

#include "openpub/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace openpub {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(CoverageStatus status) {
    switch (status) {
    case CoverageStatus::both: return "both";
    case CoverageStatus::ours_only: return "ours_only";
    case CoverageStatus::reference_only: return "reference_only";
    case CoverageStatus::neither: return "neither";
    }
    return "unknown";
}

namespace {

std::optional<CoverageStatus> status_from_string(std::string_view name) {
    for (const auto s : {CoverageStatus::both, CoverageStatus::ours_only,
                         CoverageStatus::reference_only, CoverageStatus::neither}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

} // namespace

CoverageReport compute_coverage(const NotebookScaffold& scaffold,
                                const std::vector<std::string>& ground_truth,
                                const std::vector<std::string>& reference_covered) {
    if (ground_truth.empty()) {
        throw Error(ErrorCode::InvalidArgument, "ground truth target list is empty");
    }
    const std::set<std::string> truth(ground_truth.begin(), ground_truth.end());
    for (const auto& id : reference_covered) {
        if (!truth.contains(id)) {
            throw Error(ErrorCode::UnknownTarget,
                        "reference-covered target not in ground truth: " + id);
        }
    }
    const std::set<std::string> reference(reference_covered.begin(), reference_covered.end());
    std::set<std::string> ours;
    for (const auto& section : scaffold.sections) {
        ours.insert(section.target_id);
    }

    CoverageReport report;
    std::set<std::string> emitted;
    for (const auto& id : ground_truth) {
        if (!emitted.insert(id).second) {
            continue; // ignore duplicate ground-truth entries
        }
        CoverageRow row;
        row.target_id = id;
        row.ours = ours.contains(id);
        row.reference = reference.contains(id);
        if (row.ours && row.reference) {
            row.status = CoverageStatus::both;
        } else if (row.ours) {
            row.status = CoverageStatus::ours_only;
        } else if (row.reference) {
            row.status = CoverageStatus::reference_only;
        } else {
            row.status = CoverageStatus::neither;
        }
        if (row.ours) {
            ++report.covered;
        }
        report.rows.push_back(std::move(row));
    }
    report.total = report.rows.size();
    report.ratio = static_cast<double>(report.covered) / static_cast<double>(report.total);
    return report;
}

std::string coverage_to_json(const CoverageReport& report) {
    ordered_json doc;
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
        ordered_json r;
        r["target_id"] = row.target_id;
        r["ours"] = row.ours;
        r["reference"] = row.reference;
        r["status"] = std::string(to_string(row.status));
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    doc["covered"] = report.covered;
    doc["total"] = report.total;
    doc["ratio"] = report.ratio;
    return doc.dump(2) + "\n";
}

CoverageReport coverage_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ManifestInvalid, std::string("coverage.json: ") + e.what());
    }
    CoverageReport report;
    report.covered = doc.at("covered").get<std::size_t>();
    report.total = doc.at("total").get<std::size_t>();
    report.ratio = doc.at("ratio").get<double>();
    for (const auto& r : doc.at("rows")) {
        CoverageRow row;
        row.target_id = r.at("target_id").get<std::string>();
        row.ours = r.at("ours").get<bool>();
        row.reference = r.at("reference").get<bool>();
        const auto status = status_from_string(r.at("status").get<std::string>());
        if (!status) {
            throw Error(ErrorCode::ManifestInvalid, "coverage.json: unknown status");
        }
        row.status = *status;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string coverage_to_markdown(const CoverageReport& report) {
    std::string out = "# Coverage report\n\n";
    out += "Covered " + std::to_string(report.covered) + " of " + std::to_string(report.total) +
           " ground-truth targets.\n\n";
    out += "| Target | Ours | Reference | Status |\n| --- | --- | --- | --- |\n";
    for (const auto& row : report.rows) {
        out += "| " + row.target_id + " | " + (row.ours ? "yes" : "no") + " | " +
               (row.reference ? "yes" : "no") + " | " + std::string(to_string(row.status)) +
               " |\n";
    }
    return out;
}

} // namespace openpub
