// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "openpub/bundle.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace openpub {

// Half-open byte range [begin, end) within one source file.
struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const ByteSpan&) const = default;
};

// 1-based inclusive line range.
struct LineRange {
    int first = 0;
    int last = 0;

    bool operator==(const LineRange&) const = default;
};

struct Section {
    std::string heading;
    ByteSpan span;

    bool operator==(const Section&) const = default;
};

struct Citation {
    std::string key;
    ByteSpan span;

    bool operator==(const Citation&) const = default;
};

enum class FloatKind { figure, table };

struct FloatBlock {
    FloatKind kind = FloatKind::figure;
    std::optional<std::string> label; // source label, e.g. a latex \label key
    std::string caption;              // raw caption text, whitespace-trimmed
    int ordinal = 0;                  // 1-based per-kind counter in document order
    ByteSpan span;                    // the whole float construct

    bool operator==(const FloatBlock&) const = default;
};

struct StructuredDoc {
    std::vector<Section> sections;
    std::vector<FloatBlock> float_blocks;
    std::vector<Citation> citations;

    bool operator==(const StructuredDoc&) const = default;
};

struct CodeMatch {
    std::string file;
    LineRange lines;

    bool operator==(const CodeMatch&) const = default;
};

// One reproducible unit (a figure or a table) in manuscript order.
struct ReproTarget {
    std::string id;      // "Figure N" / "Table N", disambiguated when labels collide
    std::string caption;
    std::string file;    // manuscript file the float came from
    ByteSpan span;
    std::optional<CodeMatch> matched_code;

    bool operator==(const ReproTarget&) const = default;
};

// Parses one manuscript source. Unrecognized constructs are ignored, never
// fatal. Throws Error(EncodingError) for non-UTF-8 input.
StructuredDoc parse_manuscript(std::string_view text, ManuscriptFormat format);

// Extracts one target per float block, in document order. Ids come from
// numeric labels when present, otherwise from per-kind ordinals. Duplicate
// ids get an ordinal letter suffix (" (b)", " (c)", ...) on later targets.
std::vector<ReproTarget> extract_targets(const StructuredDoc& doc, std::string_view file);

// Bundle-level extraction: parses every manuscript in manifest order and
// merges the per-document lists, deduplicating ids across files.
std::vector<ReproTarget> extract_targets(const ResearchBundle& bundle);

// Lexical matcher. A target is matched to the earliest code site (file
// lexicographic, then line) that either names it explicitly ("figure 4",
// "fig 4", "table 2") or is a plotting/tabulation call whose surrounding
// lines share at least one caption keyword. Unmatched targets are left
// untouched; their absence later becomes a notebook placeholder.
std::vector<ReproTarget> match_targets_to_code(std::vector<ReproTarget> targets,
                                               const ResearchBundle& bundle);

// Caption keyword = lowercased alphabetic token, length >= 4, stop words
// removed. Latex command names are stripped before tokenizing.
std::vector<std::string> caption_keywords(std::string_view caption);

} // namespace openpub
