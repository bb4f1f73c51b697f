// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "openpub/bundle.hpp"
#include "openpub/checkers.hpp"

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace openpub {

// Every injected comment line carries this token, which makes injection
// refusable on already-annotated inputs and strip-and-compare testable.
inline constexpr std::string_view kAnnotationSentinel = "[openpub]";

inline constexpr std::size_t kCommentCap = 280;

struct Annotation {
    std::string finding_id;
    std::string file;
    // Byte span for manuscript anchors, 1-based line for code anchors.
    std::variant<ByteSpan, int> location;
    std::string comment; // single line, <= 280 chars

    bool operator==(const Annotation&) const = default;
};

struct AnnotationSet {
    std::string bundle_digest;
    std::vector<Annotation> annotations; // sorted by (file, location, finding_id)
    // Findings without an anchor, plus findings whose anchor failed to
    // resolve (demoted with a warning). These appear only in the report
    // preamble.
    std::vector<Finding> global_findings;
    std::vector<std::string> warnings;
};

// Maps anchored findings to annotations. Anchors that fall outside their
// file demote the finding to global with an AnchorInvalid warning.
AnnotationSet build_annotations(const std::vector<Finding>& findings,
                                const ResearchBundle& bundle);

struct InjectionResult {
    std::vector<std::string> written_files; // bundle-relative paths
    std::vector<std::string> warnings;      // e.g. unknown comment syntax
};

// Writes annotated copies of every bundle code file into out_dir
// (mirroring relative paths). One comment block goes directly above each
// annotated line; annotations sharing a line merge into one block.
// Unannotated files are copied verbatim. Never writes into the bundle.
// Throws Error(InvalidArgument) when out_dir is non-empty and
// Error(AlreadyAnnotated) when a source already contains the sentinel.
InjectionResult inject_code_comments(const AnnotationSet& annotations,
                                     const ResearchBundle& bundle,
                                     const std::filesystem::path& out_dir);

// Removes every line containing the sentinel token; inverse of injection.
std::string strip_annotations(std::string_view text);

// Markdown review report: summary table of finding counts per checker,
// global findings, then per-file sections quoting each highlighted source
// excerpt with its margin comment.
std::string render_review_report(const AnnotationSet& annotations,
                                 const std::vector<Finding>& findings,
                                 const ResearchBundle& bundle);

// Sidecar format: a JSON array of {finding_id, file, span|line, comment}.
std::string annotations_to_json(const AnnotationSet& annotations);
void write_annotation_sidecar(const std::filesystem::path& path,
                              const AnnotationSet& annotations);

} // namespace openpub
