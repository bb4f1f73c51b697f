// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace openpub {

inline constexpr const char* kManifestFileName = "openpub.json";

// One dataset reference from the manifest. Exactly one of `path` (a
// bundle-relative file) or `url` is set.
struct DataEntry {
    std::string name;
    std::optional<std::string> path;
    std::optional<std::string> url;
    std::string expected_format; // free-text note, may be empty

    bool operator==(const DataEntry&) const = default;
};

struct BundleManifest {
    std::vector<std::string> manuscript_paths;
    std::vector<std::string> code_globs;
    std::vector<DataEntry> data_entries;
    std::vector<std::string> supplementary_paths;
    std::optional<std::vector<std::string>> ground_truth_targets;

    bool operator==(const BundleManifest&) const = default;
};

enum class ManuscriptFormat { latex, markdown, plain };

struct CodeFile {
    std::string path; // bundle-relative, '/' separators
    std::string language;
    std::size_t line_count = 0;

    bool operator==(const CodeFile&) const = default;
};

struct ManuscriptText {
    std::string path;
    std::string text; // raw bytes as stored on disk
    ManuscriptFormat format = ManuscriptFormat::plain;

    bool operator==(const ManuscriptText&) const = default;
};

// Immutable view of an ingested bundle. Safe to share across threads.
struct ResearchBundle {
    std::filesystem::path root_dir;
    BundleManifest manifest;
    std::vector<CodeFile> code_files;
    std::vector<ManuscriptText> manuscript_texts;
    std::string content_digest; // 64-char lowercase hex
};

// Loads and validates the bundle rooted at `root_dir`. The manifest must
// exist at the well-known name; code globs are expanded to concrete files
// in lexicographic path order; languages are detected by extension.
// Throws Error with ManifestMissing / ManifestInvalid / FileMissing.
ResearchBundle ingest_bundle(const std::filesystem::path& root_dir);

// Recomputes the content digest over (sorted path, file bytes) pairs.
// Throws Error(IoError) if a file vanished since ingestion.
std::string fingerprint(const ResearchBundle& bundle);

struct LanguageInfo {
    std::string_view name;
    std::string_view line_comment;
};

// Extension table used for language detection and comment syntax. `ext`
// includes the leading dot. Empty result means unknown language.
std::optional<LanguageInfo> language_for_extension(std::string_view ext);

ManuscriptFormat manuscript_format_for_path(std::string_view path);

// Glob matching for manifest `code` patterns: `*` and `?` stay within a
// path segment, `**` crosses segments. Paths use '/' separators.
bool glob_match(std::string_view pattern, std::string_view path);

} // namespace openpub
