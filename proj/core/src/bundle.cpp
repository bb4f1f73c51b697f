// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/bundle.hpp"

#include "openpub/digest.hpp"
#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace openpub {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_relative_and_contained(std::string_view p) {
    if (p.empty() || p.front() == '/' || p.front() == '\\') {
        return false;
    }
    if (p.size() >= 2 && p[1] == ':') { // windows drive
        return false;
    }
    // Reject any `..` segment.
    std::size_t start = 0;
    while (start <= p.size()) {
        std::size_t end = p.find('/', start);
        if (end == std::string_view::npos) {
            end = p.size();
        }
        if (p.substr(start, end - start) == "..") {
            return false;
        }
        if (end == p.size()) {
            break;
        }
        start = end + 1;
    }
    return true;
}

std::vector<std::string> read_string_array(const json& j, const std::string& field_path) {
    if (!j.is_array()) {
        throw Error(ErrorCode::ManifestInvalid, field_path + ": expected array of strings");
    }
    std::vector<std::string> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) {
            throw Error(ErrorCode::ManifestInvalid,
                        field_path + "[" + std::to_string(i) + "]: expected string");
        }
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

void require_valid_path(const std::string& p, const std::string& field_path) {
    if (!is_relative_and_contained(p)) {
        throw Error(ErrorCode::ManifestInvalid,
                    field_path + ": path must be relative without '..' (got \"" + p + "\")");
    }
}

BundleManifest parse_manifest(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ManifestInvalid, std::string("openpub.json: ") + e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorCode::ManifestInvalid, "openpub.json: top level must be an object");
    }

    BundleManifest m;
    if (!j.contains("manuscripts")) {
        throw Error(ErrorCode::ManifestInvalid, "manuscripts: required field missing");
    }
    m.manuscript_paths = read_string_array(j["manuscripts"], "manuscripts");
    if (m.manuscript_paths.empty()) {
        throw Error(ErrorCode::ManifestInvalid, "manuscripts: at least one entry required");
    }
    for (std::size_t i = 0; i < m.manuscript_paths.size(); ++i) {
        require_valid_path(m.manuscript_paths[i], "manuscripts[" + std::to_string(i) + "]");
    }

    if (j.contains("code")) {
        m.code_globs = read_string_array(j["code"], "code");
        for (std::size_t i = 0; i < m.code_globs.size(); ++i) {
            require_valid_path(m.code_globs[i], "code[" + std::to_string(i) + "]");
        }
    }

    if (j.contains("data")) {
        const json& data = j["data"];
        if (!data.is_array()) {
            throw Error(ErrorCode::ManifestInvalid, "data: expected array");
        }
        std::unordered_set<std::string> names;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const std::string fp = "data[" + std::to_string(i) + "]";
            const json& e = data[i];
            if (!e.is_object()) {
                throw Error(ErrorCode::ManifestInvalid, fp + ": expected object");
            }
            DataEntry entry;
            if (!e.contains("name") || !e["name"].is_string() ||
                e["name"].get<std::string>().empty()) {
                throw Error(ErrorCode::ManifestInvalid, fp + ".name: required non-empty string");
            }
            entry.name = e["name"].get<std::string>();
            if (!names.insert(entry.name).second) {
                throw Error(ErrorCode::ManifestInvalid,
                            fp + ".name: duplicate entry \"" + entry.name + "\"");
            }
            const bool has_path = e.contains("path");
            const bool has_url = e.contains("url");
            if (has_path == has_url) {
                throw Error(ErrorCode::ManifestInvalid,
                            fp + ": exactly one of 'path' or 'url' required");
            }
            if (has_path) {
                if (!e["path"].is_string()) {
                    throw Error(ErrorCode::ManifestInvalid, fp + ".path: expected string");
                }
                entry.path = e["path"].get<std::string>();
                require_valid_path(*entry.path, fp + ".path");
            } else {
                if (!e["url"].is_string()) {
                    throw Error(ErrorCode::ManifestInvalid, fp + ".url: expected string");
                }
                entry.url = e["url"].get<std::string>();
            }
            if (e.contains("format")) {
                if (!e["format"].is_string()) {
                    throw Error(ErrorCode::ManifestInvalid, fp + ".format: expected string");
                }
                entry.expected_format = e["format"].get<std::string>();
            }
            m.data_entries.push_back(std::move(entry));
        }
    }

    if (j.contains("supplementary")) {
        m.supplementary_paths = read_string_array(j["supplementary"], "supplementary");
        for (std::size_t i = 0; i < m.supplementary_paths.size(); ++i) {
            require_valid_path(m.supplementary_paths[i], "supplementary[" + std::to_string(i) + "]");
        }
    }

    if (j.contains("ground_truth_targets")) {
        m.ground_truth_targets = read_string_array(j["ground_truth_targets"], "ground_truth_targets");
    }
    return m;
}

bool has_wildcard(std::string_view pattern) {
    return pattern.find_first_of("*?") != std::string_view::npos;
}

std::size_t count_lines(std::string_view text) {
    if (text.empty()) {
        return 0;
    }
    std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    if (text.back() != '\n') {
        ++lines;
    }
    return lines;
}

// Files participating in the content digest: the manifest itself plus
// everything it references, deduplicated and sorted by relative path.
std::vector<std::string> digest_participants(const BundleManifest& manifest,
                                             const std::vector<CodeFile>& code_files) {
    std::set<std::string> paths;
    paths.insert(kManifestFileName);
    for (const auto& p : manifest.manuscript_paths) {
        paths.insert(p);
    }
    for (const auto& c : code_files) {
        paths.insert(c.path);
    }
    for (const auto& d : manifest.data_entries) {
        if (d.path) {
            paths.insert(*d.path);
        }
    }
    for (const auto& p : manifest.supplementary_paths) {
        paths.insert(p);
    }
    return {paths.begin(), paths.end()};
}

std::string digest_over(const fs::path& root, const std::vector<std::string>& rel_paths) {
    Sha256 h;
    for (const auto& rel : rel_paths) {
        const std::string bytes = read_file(root / rel);
        h.update(rel);
        h.update("\0", 1);
        h.update(std::to_string(bytes.size()));
        h.update("\0", 1);
        h.update(bytes);
    }
    return h.hex_digest();
}

} // namespace

bool glob_match(std::string_view pattern, std::string_view path) {
    // Iterative matcher with backtracking for `*` and `**`.
    std::size_t p = 0, s = 0;
    std::size_t star_p = std::string_view::npos, star_s = 0;
    bool star_double = false;

    while (s < path.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            const bool dbl = (p + 1 < pattern.size() && pattern[p + 1] == '*');
            star_p = p;
            star_double = dbl;
            p += dbl ? 2 : 1;
            // "**/" may also match an empty prefix.
            if (dbl && p < pattern.size() && pattern[p] == '/' && s == 0) {
                // handled by backtracking below
            }
            star_s = s;
            continue;
        }
        if (p < pattern.size() &&
            (pattern[p] == path[s] || (pattern[p] == '?' && path[s] != '/'))) {
            ++p;
            ++s;
            continue;
        }
        if (star_p != std::string_view::npos) {
            // Grow the star match by one character and retry.
            if (!star_double && path[star_s] == '/') {
                return false;
            }
            ++star_s;
            p = star_p + (star_double ? 2 : 1);
            s = star_s;
            continue;
        }
        return false;
    }
    while (p < pattern.size() && pattern[p] == '*') {
        ++p;
    }
    return p == pattern.size();
}

std::optional<LanguageInfo> language_for_extension(std::string_view ext) {
    static const std::unordered_map<std::string_view, LanguageInfo> kTable = {
        {".py", {"python", "#"}},     {".r", {"r", "#"}},        {".R", {"r", "#"}},
        {".jl", {"julia", "#"}},      {".sh", {"shell", "#"}},   {".rb", {"ruby", "#"}},
        {".yaml", {"yaml", "#"}},     {".yml", {"yaml", "#"}},
        {".c", {"c", "//"}},          {".h", {"c", "//"}},       {".cpp", {"cpp", "//"}},
        {".hpp", {"cpp", "//"}},      {".cc", {"cpp", "//"}},    {".hh", {"cpp", "//"}},
        {".cxx", {"cpp", "//"}},      {".js", {"javascript", "//"}},
        {".ts", {"typescript", "//"}},{".java", {"java", "//"}}, {".go", {"go", "//"}},
        {".rs", {"rust", "//"}},      {".cs", {"csharp", "//"}}, {".scala", {"scala", "//"}},
        {".m", {"matlab", "%"}},      {".tex", {"tex", "%"}},
        {".sql", {"sql", "--"}},      {".hs", {"haskell", "--"}},{".lua", {"lua", "--"}},
    };
    auto it = kTable.find(ext);
    if (it == kTable.end()) {
        return std::nullopt;
    }
    return it->second;
}

ManuscriptFormat manuscript_format_for_path(std::string_view path) {
    const std::size_t dot = path.rfind('.');
    const std::string_view ext = dot == std::string_view::npos ? "" : path.substr(dot);
    if (ext == ".tex" || ext == ".latex") {
        return ManuscriptFormat::latex;
    }
    if (ext == ".md" || ext == ".markdown") {
        return ManuscriptFormat::markdown;
    }
    return ManuscriptFormat::plain;
}

ResearchBundle ingest_bundle(const fs::path& root_dir) {
    std::error_code ec;
    if (!fs::is_directory(root_dir, ec)) {
        throw Error(ErrorCode::ManifestMissing,
                    "bundle directory not found: " + root_dir.generic_string());
    }
    const fs::path manifest_path = root_dir / kManifestFileName;
    if (!fs::exists(manifest_path, ec)) {
        throw Error(ErrorCode::ManifestMissing,
                    std::string(kManifestFileName) + " not found in " + root_dir.generic_string());
    }

    ResearchBundle bundle;
    bundle.root_dir = root_dir;
    bundle.manifest = parse_manifest(read_file(manifest_path));

    // Enumerate candidate files once; match globs against relative paths.
    std::vector<std::string> all_files;
    for (fs::recursive_directory_iterator it(root_dir), end; it != end; ++it) {
        if (it->is_regular_file()) {
            all_files.push_back(fs::relative(it->path(), root_dir).generic_string());
        }
    }
    std::sort(all_files.begin(), all_files.end());

    std::set<std::string> matched;
    for (const auto& pattern : bundle.manifest.code_globs) {
        if (!has_wildcard(pattern)) {
            if (!fs::exists(root_dir / pattern)) {
                throw Error(ErrorCode::FileMissing, pattern);
            }
            matched.insert(pattern);
            continue;
        }
        for (const auto& rel : all_files) {
            if (glob_match(pattern, rel)) {
                matched.insert(rel);
            }
        }
    }
    for (const auto& rel : matched) {
        const std::string text = read_file(root_dir / rel);
        const std::size_t dot = rel.rfind('.');
        const std::string ext = dot == std::string::npos ? "" : rel.substr(dot);
        const auto lang = language_for_extension(ext);
        bundle.code_files.push_back(
            {rel, lang ? std::string(lang->name) : "unknown", count_lines(text)});
    }

    for (const auto& rel : bundle.manifest.manuscript_paths) {
        if (!fs::exists(root_dir / rel)) {
            throw Error(ErrorCode::FileMissing, rel);
        }
        bundle.manuscript_texts.push_back(
            {rel, read_file(root_dir / rel), manuscript_format_for_path(rel)});
    }
    for (const auto& d : bundle.manifest.data_entries) {
        if (d.path && !fs::exists(root_dir / *d.path)) {
            throw Error(ErrorCode::FileMissing, *d.path);
        }
    }
    for (const auto& rel : bundle.manifest.supplementary_paths) {
        if (!fs::exists(root_dir / rel)) {
            throw Error(ErrorCode::FileMissing, rel);
        }
    }

    bundle.content_digest =
        digest_over(root_dir, digest_participants(bundle.manifest, bundle.code_files));
    return bundle;
}

std::string fingerprint(const ResearchBundle& bundle) {
    try {
        return digest_over(bundle.root_dir,
                           digest_participants(bundle.manifest, bundle.code_files));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::FileMissing) {
            throw Error(ErrorCode::IoError, std::string("bundle file vanished: ") + e.what());
        }
        throw;
    }
}

} // namespace openpub
