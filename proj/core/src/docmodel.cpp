// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/docmodel.hpp"

#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace openpub {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

bool is_blank(std::string_view s) {
    return trim(s).empty();
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Returns the span of the balanced {...} group starting at `open` (which
// must point at '{'), or npos when unbalanced. Skips escaped braces.
std::size_t find_matching_brace(std::string_view text, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\\' && i + 1 < text.size()) {
            ++i;
            continue;
        }
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0) {
                return i;
            }
        }
    }
    return std::string_view::npos;
}

// Extracts the argument of the first `\<command>{...}` inside `body`.
std::optional<std::string> latex_command_arg(std::string_view body, std::string_view command) {
    const std::string needle = "\\" + std::string(command) + "{";
    const std::size_t pos = body.find(needle);
    if (pos == std::string_view::npos) {
        return std::nullopt;
    }
    const std::size_t open = pos + needle.size() - 1;
    const std::size_t close = find_matching_brace(body, open);
    if (close == std::string_view::npos) {
        return std::nullopt;
    }
    return std::string(trim(body.substr(open + 1, close - open - 1)));
}

struct LineIndex {
    // Byte offset of the start of each line; lines exclude the '\n'.
    std::vector<std::size_t> starts;
    std::vector<std::string_view> lines;
};

LineIndex index_lines(std::string_view text) {
    LineIndex idx;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            if (pos < text.size()) {
                idx.starts.push_back(pos);
                idx.lines.push_back(text.substr(pos));
            }
            break;
        }
        idx.starts.push_back(pos);
        idx.lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    return idx;
}

void parse_latex(std::string_view text, StructuredDoc& doc) {
    // Float environments.
    static constexpr std::array<std::pair<std::string_view, FloatKind>, 4> kEnvs = {{
        {"figure*", FloatKind::figure},
        {"figure", FloatKind::figure},
        {"table*", FloatKind::table},
        {"table", FloatKind::table},
    }};
    std::size_t pos = 0;
    while ((pos = text.find("\\begin{", pos)) != std::string_view::npos) {
        const std::size_t name_start = pos + 7;
        const std::size_t name_end = text.find('}', name_start);
        if (name_end == std::string_view::npos) {
            break;
        }
        const std::string_view env = text.substr(name_start, name_end - name_start);
        const auto it =
            std::find_if(kEnvs.begin(), kEnvs.end(), [&](const auto& e) { return e.first == env; });
        if (it == kEnvs.end()) {
            pos = name_end + 1;
            continue;
        }
        const std::string closer = "\\end{" + std::string(env) + "}";
        const std::size_t close = text.find(closer, name_end);
        if (close == std::string_view::npos) {
            pos = name_end + 1;
            continue;
        }
        const std::size_t span_end = close + closer.size();
        const std::string_view body = text.substr(name_end + 1, close - name_end - 1);

        FloatBlock block;
        block.kind = it->second;
        block.caption = latex_command_arg(body, "caption").value_or("");
        block.label = latex_command_arg(body, "label");
        block.span = {pos, span_end};
        doc.float_blocks.push_back(std::move(block));
        pos = span_end;
    }

    // Sectioning commands.
    static constexpr std::array<std::string_view, 6> kSections = {
        "\\section*{", "\\section{", "\\subsection*{", "\\subsection{",
        "\\subsubsection*{", "\\subsubsection{"};
    std::vector<Section> sections;
    for (const auto& cmd : kSections) {
        std::size_t p = 0;
        while ((p = text.find(cmd, p)) != std::string_view::npos) {
            const std::size_t open = p + cmd.size() - 1;
            const std::size_t close = find_matching_brace(text, open);
            if (close == std::string_view::npos) {
                break;
            }
            sections.push_back(
                {std::string(trim(text.substr(open + 1, close - open - 1))), {p, close + 1}});
            p = close + 1;
        }
    }
    std::sort(sections.begin(), sections.end(),
              [](const Section& a, const Section& b) { return a.span.begin < b.span.begin; });
    doc.sections = std::move(sections);

    // Citations.
    std::size_t c = 0;
    while ((c = text.find("\\cite{", c)) != std::string_view::npos) {
        const std::size_t open = c + 5;
        const std::size_t close = find_matching_brace(text, open);
        if (close == std::string_view::npos) {
            break;
        }
        const ByteSpan span{c, close + 1};
        std::string_view keys = text.substr(open + 1, close - open - 1);
        std::size_t start = 0;
        while (start <= keys.size()) {
            std::size_t comma = keys.find(',', start);
            if (comma == std::string_view::npos) {
                comma = keys.size();
            }
            const std::string_view key = trim(keys.substr(start, comma - start));
            if (!key.empty()) {
                doc.citations.push_back({std::string(key), span});
            }
            if (comma == keys.size()) {
                break;
            }
            start = comma + 1;
        }
        c = close + 1;
    }
}

bool is_table_separator(std::string_view line) {
    const std::string_view t = trim(line);
    if (t.empty() || t.find('-') == std::string_view::npos) {
        return false;
    }
    return t.find_first_not_of("|-: \t") == std::string_view::npos;
}

bool starts_with_table_word(std::string_view line) {
    std::string_view t = trim(line);
    while (!t.empty() && (t.front() == '*' || t.front() == '_')) {
        t.remove_prefix(1);
    }
    return t.size() >= 5 && lowercase(t.substr(0, 5)) == "table";
}

void parse_markdown(std::string_view text, StructuredDoc& doc) {
    const LineIndex idx = index_lines(text);
    const auto line_end = [&](std::size_t i) {
        return idx.starts[i] + idx.lines[i].size();
    };

    for (std::size_t i = 0; i < idx.lines.size(); ++i) {
        const std::string_view line = idx.lines[i];
        const std::string_view t = trim(line);

        // ATX headings.
        if (!t.empty() && t.front() == '#') {
            std::size_t level = 0;
            while (level < t.size() && t[level] == '#') {
                ++level;
            }
            if (level <= 6 && level < t.size() && t[level] == ' ') {
                doc.sections.push_back(
                    {std::string(trim(t.substr(level))), {idx.starts[i], line_end(i)}});
            }
        }

        // Images become figure blocks; the alt text is the caption.
        const std::size_t bang = line.find("![");
        if (bang != std::string_view::npos) {
            const std::size_t alt_end = line.find(']', bang + 2);
            if (alt_end != std::string_view::npos && alt_end + 1 < line.size() &&
                line[alt_end + 1] == '(') {
                FloatBlock block;
                block.kind = FloatKind::figure;
                block.caption = std::string(trim(line.substr(bang + 2, alt_end - bang - 2)));
                block.span = {idx.starts[i], line_end(i)};
                doc.float_blocks.push_back(std::move(block));
            }
        }

        // Pipe tables: header row followed by a separator row.
        if (!t.empty() && t.front() == '|' && i + 1 < idx.lines.size() &&
            is_table_separator(idx.lines[i + 1])) {
            std::size_t last = i + 1;
            while (last + 1 < idx.lines.size() && !trim(idx.lines[last + 1]).empty() &&
                   trim(idx.lines[last + 1]).front() == '|') {
                ++last;
            }
            std::size_t span_begin = idx.starts[i];
            std::size_t span_end = line_end(last);
            std::string caption;
            // Caption line: nearest non-blank neighbor starting with "table".
            if (i > 0 && !is_blank(idx.lines[i - 1]) && starts_with_table_word(idx.lines[i - 1])) {
                caption = std::string(trim(idx.lines[i - 1]));
                span_begin = idx.starts[i - 1];
            } else if (last + 1 < idx.lines.size() && starts_with_table_word(idx.lines[last + 1])) {
                caption = std::string(trim(idx.lines[last + 1]));
                span_end = line_end(last + 1);
            }
            FloatBlock block;
            block.kind = FloatKind::table;
            block.caption = std::move(caption);
            block.span = {span_begin, span_end};
            doc.float_blocks.push_back(std::move(block));
            i = last;
        }
    }

    std::sort(doc.float_blocks.begin(), doc.float_blocks.end(),
              [](const FloatBlock& a, const FloatBlock& b) { return a.span.begin < b.span.begin; });

    // Pandoc-style citations.
    std::size_t pos = 0;
    while ((pos = text.find("[@", pos)) != std::string_view::npos) {
        const std::size_t close = text.find(']', pos + 2);
        if (close == std::string_view::npos) {
            break;
        }
        const std::string_view key = trim(text.substr(pos + 2, close - pos - 2));
        if (!key.empty() && key.find(' ') == std::string_view::npos) {
            doc.citations.push_back({std::string(key), {pos, close + 1}});
        }
        pos = close + 1;
    }
}

// "Figure 3:" / "Table 12." at the start of a line marks a plain-text float.
std::optional<std::pair<FloatKind, int>> plain_float_prefix(std::string_view line) {
    const std::string low = lowercase(trim(line));
    FloatKind kind;
    std::size_t after = 0;
    if (low.rfind("figure", 0) == 0) {
        kind = FloatKind::figure;
        after = 6;
    } else if (low.rfind("fig.", 0) == 0) {
        kind = FloatKind::figure;
        after = 4;
    } else if (low.rfind("fig ", 0) == 0) {
        kind = FloatKind::figure;
        after = 3;
    } else if (low.rfind("table", 0) == 0) {
        kind = FloatKind::table;
        after = 5;
    } else {
        return std::nullopt;
    }
    std::size_t i = after;
    while (i < low.size() && (low[i] == ' ' || low[i] == '~')) {
        ++i;
    }
    std::size_t digits = 0;
    int number = 0;
    while (i < low.size() && std::isdigit(static_cast<unsigned char>(low[i]))) {
        number = number * 10 + (low[i] - '0');
        ++i;
        ++digits;
    }
    if (digits == 0 || i >= low.size() || (low[i] != ':' && low[i] != '.')) {
        return std::nullopt;
    }
    return std::make_pair(kind, number);
}

void parse_plain(std::string_view text, StructuredDoc& doc) {
    const LineIndex idx = index_lines(text);
    for (std::size_t i = 0; i < idx.lines.size(); ++i) {
        const auto prefix = plain_float_prefix(idx.lines[i]);
        if (!prefix) {
            continue;
        }
        FloatBlock block;
        block.kind = prefix->first;
        block.caption = std::string(trim(idx.lines[i]));
        block.span = {idx.starts[i], idx.starts[i] + idx.lines[i].size()};
        doc.float_blocks.push_back(std::move(block));
    }
}

// Numeric id carried by the caption prefix ("Figure 4: ...") when it agrees
// with the float kind.
std::optional<int> caption_prefix_number(std::string_view caption, FloatKind kind) {
    while (!caption.empty() &&
           (caption.front() == '*' || caption.front() == '_' || caption.front() == ' ')) {
        caption.remove_prefix(1);
    }
    const std::string low = lowercase(caption);
    std::size_t after = std::string::npos;
    if (kind == FloatKind::figure) {
        if (low.rfind("figure", 0) == 0) {
            after = 6;
        } else if (low.rfind("fig.", 0) == 0) {
            after = 4;
        } else if (low.rfind("fig ", 0) == 0) {
            after = 3;
        }
    } else {
        if (low.rfind("table", 0) == 0) {
            after = 5;
        } else if (low.rfind("tab.", 0) == 0) {
            after = 4;
        }
    }
    if (after == std::string::npos) {
        return std::nullopt;
    }
    std::size_t i = after;
    while (i < low.size() && (low[i] == ' ' || low[i] == '~')) {
        ++i;
    }
    int number = 0;
    std::size_t digits = 0;
    while (i < low.size() && std::isdigit(static_cast<unsigned char>(low[i]))) {
        number = number * 10 + (low[i] - '0');
        ++i;
        ++digits;
    }
    if (digits == 0) {
        return std::nullopt;
    }
    return number;
}

std::optional<int> label_trailing_number(const std::optional<std::string>& label) {
    if (!label) {
        return std::nullopt;
    }
    const std::string_view t = trim(*label);
    std::size_t end = t.size();
    while (end > 0 && std::isdigit(static_cast<unsigned char>(t[end - 1]))) {
        --end;
    }
    if (end == t.size()) {
        return std::nullopt;
    }
    int number = 0;
    for (std::size_t i = end; i < t.size(); ++i) {
        number = number * 10 + (t[i] - '0');
    }
    return number;
}

// Appends " (b)", " (c)", ... to the 2nd, 3rd, ... occurrence of an id.
void disambiguate_ids(std::vector<ReproTarget>& targets) {
    std::unordered_map<std::string, int> seen;
    for (auto& t : targets) {
        const int occurrence = ++seen[t.id];
        if (occurrence > 1) {
            if (occurrence <= 26) {
                t.id += std::string(" (") + static_cast<char>('a' + occurrence - 1) + ")";
            } else {
                t.id += " (" + std::to_string(occurrence) + ")";
            }
        }
    }
}

std::vector<ReproTarget> extract_targets_raw(const StructuredDoc& doc, std::string_view file) {
    std::vector<ReproTarget> targets;
    targets.reserve(doc.float_blocks.size());
    for (const auto& block : doc.float_blocks) {
        std::optional<int> number = caption_prefix_number(block.caption, block.kind);
        if (!number) {
            number = label_trailing_number(block.label);
        }
        const int id_number = number.value_or(block.ordinal);
        ReproTarget t;
        t.id = (block.kind == FloatKind::figure ? "Figure " : "Table ") + std::to_string(id_number);
        t.caption = block.caption;
        t.file = std::string(file);
        t.span = block.span;
        targets.push_back(std::move(t));
    }
    return targets;
}

const std::unordered_set<std::string_view>& stop_words() {
    static const std::unordered_set<std::string_view> kStop = {
        "this",  "that",   "with",   "from",    "each",   "between", "using",  "into",
        "over",  "under",  "these",  "those",   "versus", "within",  "among",  "their",
        "which", "where",  "when",   "also",    "both",   "shown",   "based",  "against",
        "across","through","during", "after",   "before", "other",   "than",   "then",
        "them",  "they",   "have",   "been",    "were",   "will",    "would",  "could",
        "should","about",  "such",   "only",    "very",   "more",    "most",   "some",
        "same",  "figure", "figures","table",   "tables", "panel",   "panels", "left",
        "right", "respectively",
    };
    return kStop;
}

const std::unordered_set<std::string_view>& plotting_tokens() {
    static const std::unordered_set<std::string_view> kPlot = {
        "plot",    "plots",   "plotting", "savefig", "pyplot",  "plt",     "ggplot",
        "ggsave",  "subplot", "subplots", "hist",    "histogram","scatter", "imshow",
        "boxplot", "barplot", "heatmap",  "errorbar","contour", "tabulate","figure",
        "fig",     "table",   "chart",    "draw",    "render",
    };
    return kPlot;
}

struct LineTokens {
    std::vector<std::string> tokens;          // lowercased alpha and digit runs, in order
    std::vector<bool> is_digits;
};

LineTokens tokenize_line(std::string_view line) {
    LineTokens out;
    std::size_t i = 0;
    while (i < line.size()) {
        const unsigned char c = static_cast<unsigned char>(line[i]);
        if (std::isalpha(c)) {
            std::size_t j = i;
            while (j < line.size() && std::isalpha(static_cast<unsigned char>(line[j]))) {
                ++j;
            }
            out.tokens.push_back(lowercase(line.substr(i, j - i)));
            out.is_digits.push_back(false);
            i = j;
        } else if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) {
                ++j;
            }
            out.tokens.push_back(std::string(line.substr(i, j - i)));
            out.is_digits.push_back(true);
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

} // namespace

std::vector<std::string> caption_keywords(std::string_view caption) {
    // Drop latex command names before tokenizing.
    std::string cleaned;
    cleaned.reserve(caption.size());
    for (std::size_t i = 0; i < caption.size(); ++i) {
        if (caption[i] == '\\') {
            std::size_t j = i + 1;
            while (j < caption.size() && std::isalpha(static_cast<unsigned char>(caption[j]))) {
                ++j;
            }
            cleaned.push_back(' ');
            i = j - 1;
            continue;
        }
        cleaned.push_back(caption[i]);
    }

    std::vector<std::string> keywords;
    std::unordered_set<std::string> seen;
    std::size_t i = 0;
    while (i < cleaned.size()) {
        if (!std::isalpha(static_cast<unsigned char>(cleaned[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < cleaned.size() && std::isalpha(static_cast<unsigned char>(cleaned[j]))) {
            ++j;
        }
        std::string token = lowercase(std::string_view(cleaned).substr(i, j - i));
        i = j;
        if (token.size() < 4 || stop_words().contains(token)) {
            continue;
        }
        if (seen.insert(token).second) {
            keywords.push_back(std::move(token));
        }
    }
    return keywords;
}

StructuredDoc parse_manuscript(std::string_view text, ManuscriptFormat format) {
    if (!is_valid_utf8(text)) {
        throw Error(ErrorCode::EncodingError, "manuscript is not valid UTF-8");
    }
    StructuredDoc doc;
    if (text.empty()) {
        return doc;
    }
    switch (format) {
    case ManuscriptFormat::latex:
        parse_latex(text, doc);
        break;
    case ManuscriptFormat::markdown:
        parse_markdown(text, doc);
        break;
    case ManuscriptFormat::plain:
        parse_plain(text, doc);
        break;
    }
    // Ordinals run 1,2,3,... per kind in document order.
    int figures = 0;
    int tables = 0;
    for (auto& block : doc.float_blocks) {
        block.ordinal = block.kind == FloatKind::figure ? ++figures : ++tables;
    }
    return doc;
}

std::vector<ReproTarget> extract_targets(const StructuredDoc& doc, std::string_view file) {
    std::vector<ReproTarget> targets = extract_targets_raw(doc, file);
    disambiguate_ids(targets);
    return targets;
}

std::vector<ReproTarget> extract_targets(const ResearchBundle& bundle) {
    std::vector<ReproTarget> merged;
    for (const auto& m : bundle.manuscript_texts) {
        const StructuredDoc doc = parse_manuscript(m.text, m.format);
        auto targets = extract_targets_raw(doc, m.path);
        merged.insert(merged.end(), std::make_move_iterator(targets.begin()),
                      std::make_move_iterator(targets.end()));
    }
    disambiguate_ids(merged);
    return merged;
}

std::vector<ReproTarget> match_targets_to_code(std::vector<ReproTarget> targets,
                                               const ResearchBundle& bundle) {
    if (targets.empty() || bundle.code_files.empty()) {
        return targets;
    }

    struct TargetInfo {
        std::vector<std::string> keywords;
    };
    std::vector<TargetInfo> info(targets.size());
    std::unordered_map<std::string, std::size_t> explicit_ids; // base id -> first target
    for (std::size_t t = 0; t < targets.size(); ++t) {
        info[t].keywords = caption_keywords(targets[t].caption);
        explicit_ids.try_emplace(targets[t].id, t);
    }

    // code_files are already in lexicographic path order, so the first
    // candidate found per target is the stated earliest-site winner.
    for (const auto& code : bundle.code_files) {
        std::string text;
        try {
            text = read_file(bundle.root_dir / code.path);
        } catch (const Error&) {
            continue;
        }
        const LineIndex idx = index_lines(text);
        const std::size_t n = idx.lines.size();

        std::vector<LineTokens> tokens(n);
        std::vector<std::vector<std::string>> line_keywords(n);
        for (std::size_t i = 0; i < n; ++i) {
            tokens[i] = tokenize_line(idx.lines[i]);
            for (std::size_t k = 0; k < tokens[i].tokens.size(); ++k) {
                const std::string& tok = tokens[i].tokens[k];
                if (!tokens[i].is_digits[k] && tok.size() >= 4 && !stop_words().contains(tok)) {
                    line_keywords[i].push_back(tok);
                }
            }
        }

        const auto block_around = [&](std::size_t line0) {
            std::size_t first = line0;
            while (first > 0 && !is_blank(idx.lines[first - 1])) {
                --first;
            }
            std::size_t last = line0;
            while (last + 1 < n && !is_blank(idx.lines[last + 1])) {
                ++last;
            }
            return LineRange{static_cast<int>(first) + 1, static_cast<int>(last) + 1};
        };

        for (std::size_t i = 0; i < n; ++i) {
            const LineTokens& lt = tokens[i];

            // Explicit "figure N" / "fig N" / "table N" references.
            for (std::size_t k = 0; k + 1 < lt.tokens.size(); ++k) {
                if (lt.is_digits[k] || !lt.is_digits[k + 1]) {
                    continue;
                }
                const std::string& word = lt.tokens[k];
                std::string base;
                if (word == "figure" || word == "fig") {
                    base = "Figure " + lt.tokens[k + 1];
                } else if (word == "table") {
                    base = "Table " + lt.tokens[k + 1];
                } else {
                    continue;
                }
                const auto it = explicit_ids.find(base);
                if (it != explicit_ids.end() && !targets[it->second].matched_code) {
                    targets[it->second].matched_code = CodeMatch{code.path, block_around(i)};
                }
            }

            // Plotting/tabulation sites matched through caption keywords.
            const bool plotting = std::any_of(lt.tokens.begin(), lt.tokens.end(), [&](const auto& t) {
                return plotting_tokens().contains(std::string_view(t));
            });
            if (!plotting) {
                continue;
            }
            std::unordered_set<std::string_view> window;
            const std::size_t lo = i >= 2 ? i - 2 : 0;
            const std::size_t hi = std::min(i + 2, n - 1);
            for (std::size_t w = lo; w <= hi; ++w) {
                for (const auto& kw : line_keywords[w]) {
                    window.insert(kw);
                }
            }
            for (std::size_t t = 0; t < targets.size(); ++t) {
                if (targets[t].matched_code) {
                    continue;
                }
                const bool hit = std::any_of(info[t].keywords.begin(), info[t].keywords.end(),
                                             [&](const std::string& kw) { return window.contains(kw); });
                if (hit) {
                    targets[t].matched_code = CodeMatch{code.path, block_around(i)};
                }
            }
        }
    }
    return targets;
}

} // namespace openpub
