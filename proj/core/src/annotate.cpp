// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/annotate.hpp"

#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <map>

namespace openpub {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string single_line(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (const char c : text) {
        if (c == '\n' || c == '\r' || c == '\t') {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) {
            out.push_back(' ');
        }
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::string cap_comment(std::string text) {
    if (text.size() <= kCommentCap) {
        return text;
    }
    std::size_t cut = kCommentCap - 3;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xc0) == 0x80) {
        --cut;
    }
    return text.substr(0, cut) + "...";
}

std::string comment_for(const Finding& f) {
    std::string text = "(" + std::string(to_string(f.severity)) + "/" +
                       std::string(to_string(f.checker)) + ") " + f.message;
    if (!f.recommendation.empty() && f.recommendation != f.message) {
        text += " Recommendation: " + f.recommendation;
    }
    return cap_comment(single_line(text));
}

struct LocationKey {
    std::size_t primary;
    std::size_t secondary;
};

LocationKey location_key(const Annotation& a) {
    if (std::holds_alternative<ByteSpan>(a.location)) {
        const auto& s = std::get<ByteSpan>(a.location);
        return {s.begin, s.end};
    }
    const int line = std::get<int>(a.location);
    return {static_cast<std::size_t>(line), static_cast<std::size_t>(line)};
}

// Splits into lines, each keeping its terminator bytes.
std::vector<std::string> split_keep_endings(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            lines.emplace_back(text.substr(pos));
            break;
        }
        lines.emplace_back(text.substr(pos, end - pos + 1));
        pos = end + 1;
    }
    return lines;
}

std::string find_line(std::string_view text, int line_no) {
    int current = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++current;
        if (current == line_no) {
            return std::string(text.substr(pos, end - pos));
        }
        if (end == text.size()) {
            break;
        }
        pos = end + 1;
    }
    return "";
}

std::string clamp_excerpt(std::string_view text, std::size_t cap = 200) {
    std::string line = single_line(text);
    if (line.size() > cap) {
        std::size_t cut = cap - 3;
        while (cut > 0 && (static_cast<unsigned char>(line[cut]) & 0xc0) == 0x80) {
            --cut;
        }
        line = line.substr(0, cut) + "...";
    }
    return line;
}

} // namespace

AnnotationSet build_annotations(const std::vector<Finding>& findings,
                                const ResearchBundle& bundle) {
    AnnotationSet set;
    set.bundle_digest = bundle.content_digest;

    for (const Finding& f : findings) {
        if (!f.anchor) {
            set.global_findings.push_back(f);
            continue;
        }
        const Anchor& anchor = *f.anchor;
        bool valid = false;
        Annotation a;
        a.finding_id = f.id;
        a.file = anchor.file;
        a.comment = comment_for(f);

        if (std::holds_alternative<ByteSpan>(anchor.loc)) {
            const auto& span = std::get<ByteSpan>(anchor.loc);
            const auto it = std::find_if(
                bundle.manuscript_texts.begin(), bundle.manuscript_texts.end(),
                [&](const ManuscriptText& m) { return m.path == anchor.file; });
            valid = it != bundle.manuscript_texts.end() && span.begin <= span.end &&
                    span.end <= it->text.size();
            a.location = span;
        } else {
            const auto& lines = std::get<LineRange>(anchor.loc);
            const auto it = std::find_if(bundle.code_files.begin(), bundle.code_files.end(),
                                         [&](const CodeFile& c) { return c.path == anchor.file; });
            valid = it != bundle.code_files.end() && lines.first >= 1 &&
                    lines.first <= lines.last &&
                    static_cast<std::size_t>(lines.last) <= it->line_count;
            a.location = lines.first;
        }

        if (!valid) {
            set.warnings.push_back("AnchorInvalid: finding " + f.id +
                                   " anchors outside " + anchor.file + "; demoted to global");
            set.global_findings.push_back(f);
            continue;
        }
        set.annotations.push_back(std::move(a));
    }

    std::sort(set.annotations.begin(), set.annotations.end(),
              [](const Annotation& a, const Annotation& b) {
                  const auto ka = location_key(a);
                  const auto kb = location_key(b);
                  return std::tie(a.file, ka.primary, ka.secondary, a.finding_id) <
                         std::tie(b.file, kb.primary, kb.secondary, b.finding_id);
              });
    return set;
}

std::string strip_annotations(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const auto& line : split_keep_endings(text)) {
        if (line.find(kAnnotationSentinel) == std::string::npos) {
            out += line;
        }
    }
    return out;
}

InjectionResult inject_code_comments(const AnnotationSet& annotations,
                                     const ResearchBundle& bundle,
                                     const fs::path& out_dir) {
    std::error_code ec;
    if (fs::exists(out_dir, ec)) {
        if (!fs::is_directory(out_dir, ec) || !fs::is_empty(out_dir, ec)) {
            throw Error(ErrorCode::InvalidArgument,
                        "output directory must be empty or absent: " + out_dir.generic_string());
        }
    }

    // Line annotations per code file.
    std::map<std::string, std::map<int, std::vector<const Annotation*>>> by_file;
    for (const auto& a : annotations.annotations) {
        if (std::holds_alternative<int>(a.location)) {
            by_file[a.file][std::get<int>(a.location)].push_back(&a);
        }
    }

    InjectionResult result;
    for (const auto& code : bundle.code_files) {
        const std::string text = read_file(bundle.root_dir / code.path);
        const fs::path dest = out_dir / code.path;

        const auto annots = by_file.find(code.path);
        if (annots == by_file.end()) {
            write_file_atomic(dest, text);
            result.written_files.push_back(code.path);
            continue;
        }

        if (text.find(kAnnotationSentinel) != std::string::npos) {
            throw Error(ErrorCode::AlreadyAnnotated,
                        code.path + " already contains " + std::string(kAnnotationSentinel));
        }

        const std::size_t dot = code.path.rfind('.');
        const auto lang =
            language_for_extension(dot == std::string::npos ? "" : code.path.substr(dot));
        if (!lang) {
            result.warnings.push_back("UnknownCommentSyntax: " + code.path +
                                      " copied verbatim; annotations appear only in the report");
            write_file_atomic(dest, text);
            result.written_files.push_back(code.path);
            continue;
        }

        const auto lines = split_keep_endings(text);
        std::string out;
        out.reserve(text.size() + 128);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const int line_no = static_cast<int>(i) + 1;
            const auto at = annots->second.find(line_no);
            if (at != annots->second.end()) {
                // One block above the line; one comment line per annotation.
                for (const Annotation* a : at->second) {
                    out += std::string(lang->line_comment) + " " +
                           std::string(kAnnotationSentinel) + " " + a->comment + "\n";
                }
            }
            out += lines[i];
        }
        write_file_atomic(dest, out);
        result.written_files.push_back(code.path);
    }
    return result;
}

std::string render_review_report(const AnnotationSet& annotations,
                                 const std::vector<Finding>& findings,
                                 const ResearchBundle& bundle) {
    std::string out = "# Reproducibility review\n\n";
    out += "Bundle `" + annotations.bundle_digest + "`.\n\n";

    std::array<std::size_t, 4> by_kind{};
    std::size_t critical = 0, major = 0, minor = 0;
    for (const auto& f : findings) {
        ++by_kind[static_cast<std::size_t>(f.checker)];
        switch (f.severity) {
        case Severity::critical: ++critical; break;
        case Severity::major: ++major; break;
        case Severity::minor: ++minor; break;
        }
    }
    if (findings.empty()) {
        out += "No issues found.\n";
    } else {
        out += std::to_string(findings.size()) + " finding" +
               (findings.size() == 1 ? "" : "s") + ": " + std::to_string(critical) +
               " critical, " + std::to_string(major) + " major, " + std::to_string(minor) +
               " minor.\n";
    }

    out += "\n## Summary\n\n| Checker | Findings |\n| --- | --- |\n";
    for (const CheckerKind kind : kAllCheckerKinds) {
        out += "| " + std::string(to_string(kind)) + " | " +
               std::to_string(by_kind[static_cast<std::size_t>(kind)]) + " |\n";
    }

    if (!annotations.global_findings.empty()) {
        out += "\n## Global findings\n\n";
        for (const auto& f : annotations.global_findings) {
            out += "- **" + std::string(to_string(f.severity)) + "** [" +
                   std::string(to_string(f.checker)) + "] " + f.message;
            if (!f.recommendation.empty() && f.recommendation != f.message) {
                out += " — *" + f.recommendation + "*";
            }
            out += "\n";
        }
    }

    // Per-file sections in sorted order; annotations are already sorted.
    std::string current_file;
    for (const auto& a : annotations.annotations) {
        if (a.file != current_file) {
            current_file = a.file;
            out += "\n## `" + a.file + "`\n\n";
        }
        std::string excerpt;
        if (std::holds_alternative<ByteSpan>(a.location)) {
            const auto& span = std::get<ByteSpan>(a.location);
            const auto it = std::find_if(
                bundle.manuscript_texts.begin(), bundle.manuscript_texts.end(),
                [&](const ManuscriptText& m) { return m.path == a.file; });
            if (it != bundle.manuscript_texts.end() && span.end <= it->text.size()) {
                excerpt = clamp_excerpt(
                    std::string_view(it->text).substr(span.begin, span.end - span.begin));
            }
            out += "- **bytes " + std::to_string(span.begin) + "-" + std::to_string(span.end) +
                   "** — " + a.comment + "\n";
        } else {
            const int line = std::get<int>(a.location);
            try {
                excerpt = clamp_excerpt(find_line(read_file(bundle.root_dir / a.file), line));
            } catch (const Error&) {
                excerpt.clear();
            }
            out += "- **line " + std::to_string(line) + "** — " + a.comment + "\n";
        }
        if (!excerpt.empty()) {
            out += "  > " + excerpt + "\n";
        }
    }
    return out;
}

std::string annotations_to_json(const AnnotationSet& annotations) {
    ordered_json arr = ordered_json::array();
    for (const auto& a : annotations.annotations) {
        ordered_json o;
        o["finding_id"] = a.finding_id;
        o["file"] = a.file;
        if (std::holds_alternative<ByteSpan>(a.location)) {
            const auto& s = std::get<ByteSpan>(a.location);
            o["span"] = {s.begin, s.end};
        } else {
            o["line"] = std::get<int>(a.location);
        }
        o["comment"] = a.comment;
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

void write_annotation_sidecar(const fs::path& path, const AnnotationSet& annotations) {
    write_file_atomic(path, annotations_to_json(annotations));
}

} // namespace openpub
