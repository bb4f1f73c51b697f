// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/notebook.hpp"

#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"
#include "openpub/version.hpp"

#include <algorithm>
#include <sstream>

namespace openpub {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool spans_overlap(const ByteSpan& a, const ByteSpan& b) {
    return a.begin < b.end && b.begin < a.end;
}

bool ranges_overlap(const LineRange& a, const LineRange& b) {
    return a.first <= b.last && b.first <= a.last;
}

// Maps a finding to the first target it anchors into, if any.
std::optional<std::size_t> target_for_finding(const Finding& f,
                                              const std::vector<ReproTarget>& targets) {
    if (!f.anchor) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const ReproTarget& t = targets[i];
        if (std::holds_alternative<ByteSpan>(f.anchor->loc)) {
            if (f.anchor->file == t.file &&
                spans_overlap(std::get<ByteSpan>(f.anchor->loc), t.span)) {
                return i;
            }
        } else if (t.matched_code && f.anchor->file == t.matched_code->file &&
                   ranges_overlap(std::get<LineRange>(f.anchor->loc), t.matched_code->lines)) {
            return i;
        }
    }
    return std::nullopt;
}

bool anchor_region_empty(const Finding& f) {
    if (!f.anchor) {
        return false;
    }
    if (std::holds_alternative<ByteSpan>(f.anchor->loc)) {
        const auto& s = std::get<ByteSpan>(f.anchor->loc);
        return s.begin == s.end;
    }
    return false; // line ranges are inclusive and never empty
}

std::string finding_bullet(const Finding& f) {
    std::string out = "- **";
    out += to_string(f.severity);
    out += "** [";
    out += to_string(f.checker);
    out += "] ";
    out += f.message;
    if (!f.recommendation.empty() && f.recommendation != f.message) {
        out += " — *";
        out += f.recommendation;
        out += "*";
    }
    return out;
}

// Quotes the matched region out of the bundle's copy of the file.
std::string quote_code_region(const ResearchBundle& bundle, const CodeMatch& match) {
    std::string text;
    try {
        text = read_file(bundle.root_dir / match.file);
    } catch (const Error&) {
        return "";
    }
    std::istringstream in(text);
    std::string line;
    std::string out;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no > match.lines.last) {
            break;
        }
        if (line_no >= match.lines.first) {
            out += line;
            out += '\n';
        }
    }
    if (!out.empty() && out.back() == '\n') {
        out.pop_back();
    }
    return out;
}

std::vector<std::string> split_source_lines(const std::string& text) {
    std::vector<std::string> lines;
    if (text.empty()) {
        return lines;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) {
            lines.push_back(text.substr(pos));
            return lines;
        }
        lines.push_back(text.substr(pos, end - pos + 1));
        pos = end + 1;
    }
    return lines;
}

std::string join_source(const json& source) {
    if (source.is_string()) {
        return source.get<std::string>();
    }
    std::string out;
    for (const auto& part : source) {
        out += part.get<std::string>();
    }
    return out;
}

ordered_json make_cell(const std::string& type, int index, const std::string& source,
                       ordered_json metadata) {
    ordered_json cell;
    cell["cell_type"] = type;
    if (type == "code") {
        cell["execution_count"] = nullptr;
    }
    cell["id"] = "cell-" + std::to_string(index);
    cell["metadata"] = std::move(metadata);
    if (type == "code") {
        cell["outputs"] = ordered_json::array();
    }
    cell["source"] = split_source_lines(source);
    return cell;
}

} // namespace

std::string placeholder_marker(std::string_view target_id) {
    return "# TODO(author): provide code for " + std::string(target_id);
}

NotebookScaffold build_scaffold(const std::vector<ReproTarget>& targets,
                                const std::vector<Finding>& findings,
                                const ResearchBundle& bundle, std::int64_t clock_epoch) {
    NotebookScaffold scaffold;
    scaffold.metadata = {bundle.content_digest, kToolVersion, clock_epoch};

    // Partition findings: per-target vs global.
    std::vector<std::vector<const Finding*>> per_target(targets.size());
    std::vector<const Finding*> global;
    std::vector<bool> empty_code_finding(targets.size(), false);
    for (const Finding& f : findings) {
        const auto idx = target_for_finding(f, targets);
        if (!idx) {
            global.push_back(&f);
            continue;
        }
        per_target[*idx].push_back(&f);
        if (f.checker == CheckerKind::code && anchor_region_empty(f)) {
            empty_code_finding[*idx] = true;
        }
    }

    std::string title = "# Reproducibility Notebook\n\n";
    title += "Generated from bundle `" + bundle.content_digest + "` — " +
             std::to_string(targets.size()) +
             (targets.size() == 1 ? " reproduction target." : " reproduction targets.");
    if (!global.empty()) {
        title += "\n\n**Bundle-wide findings:**\n";
        for (const Finding* f : global) {
            title += "\n" + finding_bullet(*f);
        }
    }
    scaffold.title_markdown = std::move(title);

    scaffold.setup_code =
        "# Shared setup for every reproduction section.\n"
        "import numpy as np\n"
        "import pandas as pd\n"
        "import matplotlib.pyplot as plt";

    for (std::size_t i = 0; i < targets.size(); ++i) {
        const ReproTarget& t = targets[i];
        TargetSection section;
        section.target_id = t.id;
        section.placeholder = !t.matched_code || empty_code_finding[i];

        std::string narrative = "## " + t.id + "\n";
        if (!t.caption.empty()) {
            narrative += "\n**Caption:** " + t.caption + "\n";
        }
        if (section.placeholder) {
            narrative += "\nNo implementation was found for this target. "
                         "The code cell below is a placeholder to complete.";
        } else {
            narrative += "\nThe cell below quotes the implementation from `" +
                         t.matched_code->file + "` (lines " +
                         std::to_string(t.matched_code->lines.first) + "-" +
                         std::to_string(t.matched_code->lines.last) + ").";
        }
        if (!per_target[i].empty()) {
            narrative += "\n\n**Audit findings:**\n";
            for (const Finding* f : per_target[i]) {
                narrative += "\n" + finding_bullet(*f);
            }
        }
        section.narrative_markdown = std::move(narrative);

        if (section.placeholder) {
            section.code_source = placeholder_marker(t.id);
        } else {
            section.code_source = "# Source: " + t.matched_code->file + ", lines " +
                                  std::to_string(t.matched_code->lines.first) + "-" +
                                  std::to_string(t.matched_code->lines.last) + "\n" +
                                  quote_code_region(bundle, *t.matched_code);
        }
        scaffold.sections.push_back(std::move(section));
    }
    return scaffold;
}

std::string notebook_to_json(const NotebookScaffold& scaffold) {
    ordered_json doc;
    ordered_json cells = ordered_json::array();

    int index = 0;
    cells.push_back(make_cell("markdown", index++, scaffold.title_markdown, ordered_json::object()));
    cells.push_back(make_cell("code", index++, scaffold.setup_code, ordered_json::object()));
    for (const auto& section : scaffold.sections) {
        cells.push_back(
            make_cell("markdown", index++, section.narrative_markdown, ordered_json::object()));
        ordered_json tag;
        tag["openpub"]["placeholder"] = section.placeholder;
        tag["openpub"]["target"] = section.target_id;
        cells.push_back(make_cell("code", index++, section.code_source, std::move(tag)));
    }

    doc["cells"] = std::move(cells);
    doc["metadata"]["openpub"]["bundle_digest"] = scaffold.metadata.bundle_digest;
    doc["metadata"]["openpub"]["generated_at"] = scaffold.metadata.generated_at;
    doc["metadata"]["openpub"]["tool_version"] = scaffold.metadata.tool_version;
    doc["nbformat"] = 4;
    doc["nbformat_minor"] = 5;
    return doc.dump(1, ' ') + "\n";
}

void emit_notebook(const NotebookScaffold& scaffold, const std::filesystem::path& out_path) {
    write_file_atomic(out_path, notebook_to_json(scaffold));
}

std::vector<std::string> notebook_contract_violations(const json& doc) {
    std::vector<std::string> problems;
    if (!doc.is_object()) {
        return {"document is not a JSON object"};
    }
    for (const char* key : {"cells", "metadata", "nbformat", "nbformat_minor"}) {
        if (!doc.contains(key)) {
            problems.push_back(std::string("missing top-level key: ") + key);
        }
    }
    if (!problems.empty()) {
        return problems;
    }
    if (doc["nbformat"] != 4) {
        problems.push_back("nbformat must be 4");
    }
    if (doc["nbformat_minor"] != 5) {
        problems.push_back("nbformat_minor must be 5");
    }
    const json& cells = doc["cells"];
    if (!cells.is_array()) {
        problems.push_back("cells must be an array");
        return problems;
    }
    if (cells.size() < 2) {
        problems.push_back("notebook needs the 2 header cells");
    }
    if (cells.size() % 2 != 0) {
        problems.push_back("cell count must be 2 + 2 x sections");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const json& cell = cells[i];
        const std::string at = "cells[" + std::to_string(i) + "]";
        if (!cell.is_object() || !cell.contains("cell_type") || !cell.contains("source") ||
            !cell.contains("metadata") || !cell.contains("id")) {
            problems.push_back(at + ": missing required cell field");
            continue;
        }
        const std::string type = cell["cell_type"].get<std::string>();
        const bool expect_markdown = i % 2 == 0;
        if (expect_markdown && type != "markdown") {
            problems.push_back(at + ": expected a markdown cell");
        }
        if (!expect_markdown && type != "code") {
            problems.push_back(at + ": expected a code cell");
        }
        if (type == "code") {
            if (!cell.contains("outputs") || !cell["outputs"].is_array() ||
                !cell["outputs"].empty()) {
                problems.push_back(at + ": code cell must have outputs: []");
            }
            if (!cell.contains("execution_count") || !cell["execution_count"].is_null()) {
                problems.push_back(at + ": code cell must have execution_count: null");
            }
        }
        if (i >= 2 && type == "code") {
            if (!cell["metadata"].contains("openpub") ||
                !cell["metadata"]["openpub"].contains("placeholder") ||
                !cell["metadata"]["openpub"].contains("target")) {
                problems.push_back(at + ": section code cell missing the openpub tag");
            }
        }
    }
    return problems;
}

NotebookScaffold parse_notebook(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ManifestInvalid, std::string("notebook: ") + e.what());
    }
    const auto problems = notebook_contract_violations(doc);
    if (!problems.empty()) {
        throw Error(ErrorCode::ManifestInvalid, "notebook: " + problems.front());
    }

    NotebookScaffold scaffold;
    const json& meta = doc["metadata"];
    if (meta.contains("openpub")) {
        const json& m = meta["openpub"];
        scaffold.metadata.bundle_digest = m.value("bundle_digest", "");
        scaffold.metadata.generated_at = m.value("generated_at", std::int64_t{0});
        scaffold.metadata.tool_version = m.value("tool_version", "");
    }
    const json& cells = doc["cells"];
    scaffold.title_markdown = join_source(cells[0]["source"]);
    scaffold.setup_code = join_source(cells[1]["source"]);
    for (std::size_t i = 2; i + 1 < cells.size(); i += 2) {
        TargetSection section;
        section.narrative_markdown = join_source(cells[i]["source"]);
        section.code_source = join_source(cells[i + 1]["source"]);
        const json& tag = cells[i + 1]["metadata"]["openpub"];
        section.placeholder = tag["placeholder"].get<bool>();
        section.target_id = tag["target"].get<std::string>();
        scaffold.sections.push_back(std::move(section));
    }
    return scaffold;
}

NotebookScaffold read_notebook(const std::filesystem::path& path) {
    return parse_notebook(read_file(path));
}

} // namespace openpub
