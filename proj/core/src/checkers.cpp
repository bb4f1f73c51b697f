// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/checkers.hpp"

#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace openpub {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(CheckerKind kind) {
    switch (kind) {
    case CheckerKind::hyperparameter: return "hyperparameter";
    case CheckerKind::dataset: return "dataset";
    case CheckerKind::code: return "code";
    case CheckerKind::documentation: return "documentation";
    }
    return "unknown";
}

std::optional<CheckerKind> checker_kind_from_string(std::string_view name) {
    for (const CheckerKind kind : kAllCheckerKinds) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Severity severity) {
    switch (severity) {
    case Severity::critical: return "critical";
    case Severity::major: return "major";
    case Severity::minor: return "minor";
    }
    return "unknown";
}

std::optional<Severity> severity_from_string(std::string_view name) {
    if (name == "critical") {
        return Severity::critical;
    }
    if (name == "major") {
        return Severity::major;
    }
    if (name == "minor") {
        return Severity::minor;
    }
    return std::nullopt;
}

namespace {

int severity_rank(Severity s) {
    switch (s) {
    case Severity::critical: return 2;
    case Severity::major: return 1;
    case Severity::minor: return 0;
    }
    return 0;
}

std::string truncate_with_ellipsis(std::string text, std::size_t cap) {
    if (text.size() <= cap) {
        return text;
    }
    std::size_t cut = cap - 3;
    // Do not split a UTF-8 sequence.
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xc0) == 0x80) {
        --cut;
    }
    return text.substr(0, cut) + "...";
}

} // namespace

std::string anchor_key(const std::optional<Anchor>& anchor) {
    if (!anchor) {
        return "global";
    }
    std::ostringstream out;
    out << anchor->file << ':';
    if (std::holds_alternative<ByteSpan>(anchor->loc)) {
        const auto& s = std::get<ByteSpan>(anchor->loc);
        out << 'B' << s.begin << '-' << s.end;
    } else {
        const auto& l = std::get<LineRange>(anchor->loc);
        out << 'L' << l.first << '-' << l.last;
    }
    return out.str();
}

std::string normalize_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    bool pending_space = false;
    for (const char c : name) {
        const unsigned char uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            if (pending_space && !out.empty()) {
                out.push_back(' ');
            }
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(uc)));
        } else {
            pending_space = true;
        }
    }
    return out;
}

std::string finding_id(CheckerKind kind, std::string_view name,
                       const std::optional<Anchor>& anchor) {
    return std::string(to_string(kind)) + ":" + normalize_name(name) + ":" + anchor_key(anchor);
}

std::optional<std::string> extract_json_array(std::string_view text) {
    for (std::size_t start = 0; start < text.size(); ++start) {
        if (text[start] != '[') {
            continue;
        }
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (c == '\\') {
                    ++i;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '[' || c == '{') {
                ++depth;
            } else if (c == ']' || c == '}') {
                --depth;
                if (depth == 0) {
                    std::string slice(text.substr(start, i - start + 1));
                    if (json::accept(slice)) {
                        return slice;
                    }
                    break;
                }
            }
        }
    }
    return std::nullopt;
}

std::vector<Finding> consolidate_union(
    const std::vector<std::pair<int, std::vector<Finding>>>& per_run) {
    std::map<std::string, Finding> merged;
    for (const auto& [run_index, findings] : per_run) {
        (void)run_index; // supporting_runs already live inside the findings
        for (const Finding& f : findings) {
            auto [it, inserted] = merged.try_emplace(f.id, f);
            if (inserted) {
                continue;
            }
            Finding& m = it->second;
            m.message = std::min(m.message, f.message);
            m.recommendation = std::min(m.recommendation, f.recommendation);
            if (severity_rank(f.severity) > severity_rank(m.severity)) {
                m.severity = f.severity;
            }
            m.supporting_runs.insert(f.supporting_runs.begin(), f.supporting_runs.end());
        }
    }
    std::vector<Finding> out;
    out.reserve(merged.size());
    for (auto& [id, f] : merged) {
        out.push_back(std::move(f));
    }
    std::sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
        if (a.checker != b.checker) {
            return static_cast<int>(a.checker) < static_cast<int>(b.checker);
        }
        return a.id < b.id;
    });
    return out;
}

std::string build_manuscript_excerpt(const ResearchBundle& bundle, std::size_t budget) {
    std::string out;
    for (const auto& m : bundle.manuscript_texts) {
        out += "== manuscript: " + m.path + " ==\n";
        StructuredDoc doc;
        try {
            doc = parse_manuscript(m.text, m.format);
        } catch (const Error&) {
            // Non-UTF-8 input degrades to a raw excerpt below.
        }
        if (!doc.sections.empty()) {
            out += "[sections]\n";
            for (const auto& s : doc.sections) {
                out += "- " + s.heading + "\n";
            }
        }
        if (!doc.float_blocks.empty()) {
            out += "[captions]\n";
            for (const auto& f : doc.float_blocks) {
                out += std::string("- ") +
                       (f.kind == FloatKind::figure ? "figure: " : "table: ") + f.caption + "\n";
            }
        }
        out += "[text]\n";
        const std::size_t remaining = budget > out.size() ? budget - out.size() : 0;
        if (m.text.size() <= remaining) {
            out += m.text;
        } else {
            out += m.text.substr(0, remaining);
        }
        if (out.empty() || out.back() != '\n') {
            out += '\n';
        }
    }
    return out;
}

namespace {

bool is_skeleton_line(std::string_view line) {
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
        line.remove_prefix(1);
    }
    if (line.empty()) {
        return false;
    }
    static constexpr std::string_view kPrefixes[] = {
        "#", "//", "%", "--", "/*", "*", "def ", "class ", "function", "fn ",
        "func ", "struct ", "template", "import ", "from ", "library(", "source(",
        "use ", "require", "public ", "static ",
    };
    for (const auto& p : kPrefixes) {
        if (line.substr(0, p.size()) == p) {
            return true;
        }
    }
    return line.back() == '{';
}

std::string code_skeleton(std::string_view text) {
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(pos, end - pos);
        if (is_skeleton_line(line)) {
            out.append(line);
            out.push_back('\n');
        }
        pos = end + 1;
    }
    return out;
}

} // namespace

std::string build_code_excerpt(const ResearchBundle& bundle, std::size_t budget) {
    std::string out;
    if (bundle.code_files.empty()) {
        return "(no code files in bundle)\n";
    }
    for (const auto& c : bundle.code_files) {
        out += "== code: " + c.path + " (" + c.language + ", " +
               std::to_string(c.line_count) + " lines) ==\n";
        std::string text;
        try {
            text = read_file(bundle.root_dir / c.path);
        } catch (const Error&) {
            continue;
        }
        const std::size_t remaining = budget > out.size() ? budget - out.size() : 0;
        if (text.size() <= remaining) {
            out += text;
        } else {
            // Over budget: keep comments and signature-like lines only.
            std::string skeleton = code_skeleton(text);
            if (skeleton.size() > remaining) {
                skeleton.resize(remaining);
            }
            out += skeleton;
        }
        if (out.empty() || out.back() != '\n') {
            out += '\n';
        }
    }
    return out;
}

CheckerEngine::CheckerEngine(const PromptLibrary& prompts, LlmGateway& gateway,
                             PipelineConfig config,
                             std::shared_ptr<Transport> reachability_transport)
    : prompts_(prompts), gateway_(gateway), config_(std::move(config)),
      reachability_(std::move(reachability_transport)) {}

void CheckerEngine::warn(std::string message) {
    std::lock_guard<std::mutex> lock(warn_mutex_);
    warnings_.push_back(std::move(message));
}

std::vector<std::string> CheckerEngine::warnings() const {
    std::lock_guard<std::mutex> lock(warn_mutex_);
    return warnings_;
}

std::string CheckerEngine::send_with_repair(const std::string& template_id,
                                            const std::string& prompt, int run_index,
                                            std::string* raw_out) {
    PromptRequest request{template_id, prompt, config_.temperature, run_index};
    const std::string response = gateway_.send(request);
    if (raw_out) {
        *raw_out = response;
    }
    if (auto arr = extract_json_array(response)) {
        return *arr;
    }
    // One repair attempt: restate the format contract alongside the
    // original request and the reply that failed to parse.
    PromptRequest repair = request;
    repair.filled_prompt =
        "The previous reply could not be parsed as a JSON array.\n"
        "Reply with ONLY a JSON array in the required schema.\n\n"
        "Original request:\n" + prompt + "\n\nPrevious reply:\n" + response;
    const std::string second = gateway_.send(repair);
    if (auto arr = extract_json_array(second)) {
        return *arr;
    }
    throw Error(ErrorCode::ResponseUnparsable,
                "template " + template_id + " run " + std::to_string(run_index) +
                    ": no JSON array in response after repair attempt");
}

namespace {

// Parses and validates an anchor object against the bundle. Line anchors
// must land inside a code file, byte spans inside a manuscript.
std::optional<Anchor> parse_anchor(const json& j, const ResearchBundle& bundle,
                                   std::string* problem) {
    if (j.is_null()) {
        return std::nullopt;
    }
    if (!j.is_object() || !j.contains("file")) {
        *problem = "anchor must be an object with a file";
        return std::nullopt;
    }
    Anchor anchor;
    anchor.file = j["file"].get<std::string>();
    if (j.contains("lines") && j["lines"].is_array() && j["lines"].size() == 2) {
        const int first = j["lines"][0].get<int>();
        const int last = j["lines"][1].get<int>();
        const auto it = std::find_if(bundle.code_files.begin(), bundle.code_files.end(),
                                     [&](const CodeFile& c) { return c.path == anchor.file; });
        if (it == bundle.code_files.end()) {
            *problem = "anchor file not in code inventory: " + anchor.file;
            return std::nullopt;
        }
        if (first < 1 || last < first || static_cast<std::size_t>(last) > it->line_count) {
            *problem = "line range out of bounds for " + anchor.file;
            return std::nullopt;
        }
        anchor.loc = LineRange{first, last};
        return anchor;
    }
    if (j.contains("span") && j["span"].is_array() && j["span"].size() == 2) {
        const auto begin = j["span"][0].get<std::int64_t>();
        const auto end = j["span"][1].get<std::int64_t>();
        const auto it = std::find_if(bundle.manuscript_texts.begin(),
                                     bundle.manuscript_texts.end(),
                                     [&](const ManuscriptText& m) { return m.path == anchor.file; });
        if (it == bundle.manuscript_texts.end()) {
            *problem = "anchor file not a manuscript: " + anchor.file;
            return std::nullopt;
        }
        if (begin < 0 || end < begin || static_cast<std::size_t>(end) > it->text.size()) {
            *problem = "byte span out of bounds for " + anchor.file;
            return std::nullopt;
        }
        anchor.loc = ByteSpan{static_cast<std::size_t>(begin), static_cast<std::size_t>(end)};
        return anchor;
    }
    *problem = "anchor needs a 2-element lines or span array";
    return std::nullopt;
}

json candidates_to_json(const std::vector<Candidate>& candidates) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : candidates) {
        ordered_json o;
        o["name"] = c.name;
        o["context"] = c.context;
        if (c.anchor) {
            ordered_json a;
            a["file"] = c.anchor->file;
            if (std::holds_alternative<ByteSpan>(c.anchor->loc)) {
                const auto& s = std::get<ByteSpan>(c.anchor->loc);
                a["span"] = {s.begin, s.end};
            } else {
                const auto& l = std::get<LineRange>(c.anchor->loc);
                a["lines"] = {l.first, l.last};
            }
            o["anchor"] = std::move(a);
        } else {
            o["anchor"] = nullptr;
        }
        arr.push_back(std::move(o));
    }
    return arr;
}

} // namespace

std::vector<Candidate> CheckerEngine::run_step1(CheckerKind kind, const ResearchBundle& bundle,
                                                int run_index) {
    const std::string template_id = std::string(to_string(kind)) + ".step1";
    const PromptTemplate& tmpl = prompts_.get(template_id);
    const std::string prompt = PromptLibrary::fill(
        tmpl.text, {{"manuscript", build_manuscript_excerpt(bundle, config_.manuscript_budget)},
                    {"code", build_code_excerpt(bundle, config_.code_budget)}});

    const std::string array_text = send_with_repair(template_id, prompt, run_index, nullptr);
    const json arr = json::parse(array_text);

    std::vector<Candidate> candidates;
    for (const auto& item : arr) {
        if (!item.is_object() || !item.contains("name") || !item["name"].is_string()) {
            warn(template_id + " run " + std::to_string(run_index) + ": skipped malformed item");
            continue;
        }
        Candidate c;
        c.checker = kind;
        c.name = item["name"].get<std::string>();
        if (c.name.empty()) {
            continue;
        }
        if (item.contains("context") && item["context"].is_string()) {
            c.context = truncate_with_ellipsis(item["context"].get<std::string>(), kContextCap);
        }
        if (item.contains("anchor")) {
            std::string problem;
            c.anchor = parse_anchor(item["anchor"], bundle, &problem);
            if (!c.anchor && !problem.empty()) {
                warn(template_id + " run " + std::to_string(run_index) + ": dropped anchor for \"" +
                     c.name + "\" (" + problem + ")");
            }
        }
        candidates.push_back(std::move(c));
    }
    return candidates;
}

std::vector<Finding> CheckerEngine::run_step2(CheckerKind kind,
                                              const std::vector<Candidate>& candidates,
                                              const ResearchBundle& bundle, int run_index) {
    if (candidates.empty()) {
        return {}; // vacuous: no backend call
    }
    const std::string template_id = std::string(to_string(kind)) + ".step2";
    const PromptTemplate& tmpl = prompts_.get(template_id);
    const std::string prompt = PromptLibrary::fill(
        tmpl.text, {{"candidates", candidates_to_json(candidates).dump(2)},
                    {"manuscript", build_manuscript_excerpt(bundle, config_.manuscript_budget)},
                    {"code", build_code_excerpt(bundle, config_.code_budget)}});

    const std::string array_text = send_with_repair(template_id, prompt, run_index, nullptr);
    const json arr = json::parse(array_text);

    // The step only filters and annotates: response items must name an
    // existing candidate, matched through normalized names.
    std::unordered_map<std::string, std::size_t> by_name;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        by_name.try_emplace(normalize_name(candidates[i].name), i);
    }

    std::vector<Finding> findings;
    std::unordered_set<std::string> seen_ids;
    for (const auto& item : arr) {
        if (!item.is_object() || !item.contains("name") || !item["name"].is_string()) {
            warn(template_id + " run " + std::to_string(run_index) + ": skipped malformed item");
            continue;
        }
        const std::string name = item["name"].get<std::string>();
        const auto it = by_name.find(normalize_name(name));
        if (it == by_name.end()) {
            warn(template_id + " run " + std::to_string(run_index) + ": subset violation, \"" +
                 name + "\" is not among step-1 candidates; dropped");
            continue;
        }
        const Candidate& c = candidates[it->second];
        Finding f;
        f.checker = kind;
        f.anchor = c.anchor;
        f.id = finding_id(kind, c.name, c.anchor);
        if (!seen_ids.insert(f.id).second) {
            continue; // duplicate mention within one run
        }
        f.severity = Severity::major;
        if (item.contains("severity") && item["severity"].is_string()) {
            if (const auto sev = severity_from_string(item["severity"].get<std::string>())) {
                f.severity = *sev;
            }
        }
        if (item.contains("message") && item["message"].is_string()) {
            f.message = item["message"].get<std::string>();
        }
        if (f.message.empty()) {
            f.message = !c.context.empty() ? c.context : c.name;
        }
        std::string recommendation;
        if (item.contains("recommendation") && item["recommendation"].is_string()) {
            recommendation = item["recommendation"].get<std::string>();
        }
        if (recommendation.empty()) {
            recommendation = f.message;
        }
        f.recommendation = truncate_with_ellipsis(std::move(recommendation), kRecommendationCap);
        f.supporting_runs = {run_index};

        if (kind == CheckerKind::dataset) {
            // Link verification for findings that name a URL data entry.
            for (const auto& entry : bundle.manifest.data_entries) {
                if (!entry.url || normalize_name(entry.name) != normalize_name(c.name)) {
                    continue;
                }
                if (config_.offline || !reachability_) {
                    f.message += " [link unverified: offline]";
                    break;
                }
                const auto deadline = std::chrono::seconds(10);
                auto resp = reachability_->head(*entry.url, deadline);
                bool reachable = resp.status >= 200 && resp.status < 400;
                if (!reachable) {
                    resp = reachability_->get(*entry.url, deadline);
                    reachable = resp.status >= 200 && resp.status < 400;
                }
                if (reachable) {
                    f.message += " [link reachable]";
                    if (severity_rank(f.severity) > severity_rank(Severity::major)) {
                        f.severity = Severity::major;
                    }
                } else {
                    f.message += " [link unreachable]";
                }
                break;
            }
        }
        findings.push_back(std::move(f));
    }
    return findings;
}

std::vector<RunOutcome> CheckerEngine::run_checker(CheckerKind kind,
                                                   const ResearchBundle& bundle) {
    if (config_.runs < 1) {
        throw Error(ErrorCode::InvalidArgument, "runs must be >= 1");
    }
    std::vector<RunOutcome> outcomes;
    outcomes.reserve(static_cast<std::size_t>(config_.runs));
    for (int run = 0; run < config_.runs; ++run) {
        RunOutcome outcome;
        outcome.run_index = run;
        try {
            const auto candidates = run_step1(kind, bundle, run);
            outcome.findings = run_step2(kind, candidates, bundle, run);
            outcome.ok = true;
        } catch (const Error& e) {
            outcome.ok = false;
            outcome.error = e.what();
            warn(std::string(to_string(kind)) + " run " + std::to_string(run) +
                 " failed: " + e.what());
        }
        outcomes.push_back(std::move(outcome));
    }
    if (std::none_of(outcomes.begin(), outcomes.end(),
                     [](const RunOutcome& o) { return o.ok; })) {
        throw Error(ErrorCode::AllRunsFailed,
                    std::string(to_string(kind)) + ": all " + std::to_string(config_.runs) +
                        " runs failed (" + outcomes.back().error + ")");
    }
    return outcomes;
}

std::vector<std::pair<int, std::vector<Finding>>> successful_runs(
    const std::vector<RunOutcome>& outcomes) {
    std::vector<std::pair<int, std::vector<Finding>>> out;
    for (const auto& o : outcomes) {
        if (o.ok) {
            out.emplace_back(o.run_index, o.findings);
        }
    }
    return out;
}

std::vector<Finding> CheckerEngine::consolidate(
    const std::vector<std::pair<int, std::vector<Finding>>>& per_run) {
    std::vector<Finding> merged = consolidate_union(per_run);
    if (config_.consolidation != ConsolidationMode::llm_assisted || merged.empty()) {
        return merged;
    }
    if (!prompts_.has("consolidate")) {
        warn("llm_assisted consolidation requested but no consolidate template; using union");
        return merged;
    }

    ordered_json listing = ordered_json::array();
    for (const auto& f : merged) {
        listing.push_back(ordered_json{{"id", f.id}, {"message", f.message}});
    }
    const std::string prompt =
        PromptLibrary::fill(prompts_.get("consolidate").text, {{"candidates", listing.dump(2)}});

    std::string array_text;
    try {
        array_text = send_with_repair("consolidate", prompt, 0, nullptr);
    } catch (const Error& e) {
        warn(std::string("consolidation prompt failed, falling back to union: ") + e.what());
        return merged;
    }

    // Response: an array of id groups to fuse. Every id must exist in the
    // union and appear in at most one group; offending groups are skipped.
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        by_id.emplace(merged[i].id, i);
    }
    std::unordered_set<std::string> used;
    std::vector<bool> removed(merged.size(), false);

    const json groups = json::parse(array_text);
    for (const auto& group : groups) {
        if (!group.is_array() || group.size() < 2) {
            continue;
        }
        std::vector<std::string> ids;
        bool valid = true;
        for (const auto& idj : group) {
            if (!idj.is_string()) {
                valid = false;
                break;
            }
            const std::string id = idj.get<std::string>();
            if (!by_id.contains(id) || used.contains(id)) {
                valid = false;
                break;
            }
            ids.push_back(id);
        }
        if (!valid) {
            warn("consolidation group skipped: unknown or reused id");
            continue;
        }
        const std::string rep = *std::min_element(ids.begin(), ids.end());
        Finding& target = merged[by_id.at(rep)];
        for (const auto& id : ids) {
            used.insert(id);
            if (id == rep) {
                continue;
            }
            Finding& source = merged[by_id.at(id)];
            target.message = std::min(target.message, source.message);
            target.recommendation = std::min(target.recommendation, source.recommendation);
            if (severity_rank(source.severity) > severity_rank(target.severity)) {
                target.severity = source.severity;
            }
            target.supporting_runs.insert(source.supporting_runs.begin(),
                                          source.supporting_runs.end());
            removed[by_id.at(id)] = true;
        }
    }

    std::vector<Finding> out;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        if (!removed[i]) {
            out.push_back(std::move(merged[i]));
        }
    }
    return out;
}

namespace {

ordered_json finding_to_json(const Finding& f) {
    ordered_json o;
    o["id"] = f.id;
    o["checker"] = std::string(to_string(f.checker));
    o["severity"] = std::string(to_string(f.severity));
    if (f.anchor) {
        ordered_json a;
        a["file"] = f.anchor->file;
        if (std::holds_alternative<ByteSpan>(f.anchor->loc)) {
            const auto& s = std::get<ByteSpan>(f.anchor->loc);
            a["span"] = {s.begin, s.end};
        } else {
            const auto& l = std::get<LineRange>(f.anchor->loc);
            a["lines"] = {l.first, l.last};
        }
        o["anchor"] = std::move(a);
    } else {
        o["anchor"] = nullptr;
    }
    o["message"] = f.message;
    o["recommendation"] = f.recommendation;
    o["supporting_runs"] = f.supporting_runs;
    return o;
}

Finding finding_from_json(const json& o, const std::string& at) {
    if (!o.is_object() || !o.contains("id") || !o.contains("checker") ||
        !o.contains("severity") || !o.contains("message") || !o.contains("recommendation") ||
        !o.contains("supporting_runs")) {
        throw Error(ErrorCode::ManifestInvalid, at + ": finding record missing field");
    }
    Finding f;
    f.id = o["id"].get<std::string>();
    const auto kind = checker_kind_from_string(o["checker"].get<std::string>());
    if (!kind) {
        throw Error(ErrorCode::ManifestInvalid, at + ": unknown checker kind");
    }
    f.checker = *kind;
    const auto sev = severity_from_string(o["severity"].get<std::string>());
    if (!sev) {
        throw Error(ErrorCode::ManifestInvalid, at + ": unknown severity");
    }
    f.severity = *sev;
    if (o.contains("anchor") && !o["anchor"].is_null()) {
        const json& a = o["anchor"];
        Anchor anchor;
        anchor.file = a.at("file").get<std::string>();
        if (a.contains("span")) {
            anchor.loc = ByteSpan{a["span"][0].get<std::size_t>(), a["span"][1].get<std::size_t>()};
        } else if (a.contains("lines")) {
            anchor.loc = LineRange{a["lines"][0].get<int>(), a["lines"][1].get<int>()};
        } else {
            throw Error(ErrorCode::ManifestInvalid, at + ": anchor missing span/lines");
        }
        f.anchor = std::move(anchor);
    }
    f.message = o["message"].get<std::string>();
    f.recommendation = o["recommendation"].get<std::string>();
    for (const auto& r : o["supporting_runs"]) {
        f.supporting_runs.insert(r.get<int>());
    }
    return f;
}

} // namespace

std::string findings_to_jsonl(const std::vector<Finding>& findings) {
    std::string out;
    for (const auto& f : findings) {
        out += finding_to_json(f).dump();
        out += '\n';
    }
    return out;
}

std::vector<Finding> findings_from_jsonl(std::string_view text) {
    std::vector<Finding> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        if (line.empty()) {
            continue;
        }
        json o;
        try {
            o = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ManifestInvalid,
                        "findings line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(finding_from_json(o, "findings line " + std::to_string(line_no)));
    }
    return out;
}

void write_findings_jsonl(const std::filesystem::path& path,
                          const std::vector<Finding>& findings) {
    write_file_atomic(path, findings_to_jsonl(findings));
}

std::vector<Finding> read_findings_jsonl(const std::filesystem::path& path) {
    return findings_from_jsonl(read_file(path));
}

} // namespace openpub
