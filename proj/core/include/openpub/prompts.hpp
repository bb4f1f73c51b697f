// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace openpub {

struct PromptTemplate {
    std::string id;     // e.g. "hyperparameter.step1"
    std::string text;
    std::string sha256; // provenance digest, recorded in the run manifest
};

// Loads prompt templates from a directory laid out as
// <kind>.step1.txt / <kind>.step2.txt plus an optional consolidate.txt.
// Placeholders inside templates: {{manuscript}}, {{code}}, {{candidates}}.
class PromptLibrary {
public:
    static PromptLibrary load_dir(const std::filesystem::path& dir);

    bool has(const std::string& id) const { return templates_.contains(id); }

    // Throws Error(TemplateMissing) for unregistered ids.
    const PromptTemplate& get(const std::string& id) const;

    // template_id -> sha256, for provenance.
    std::map<std::string, std::string> digests() const;

    // Replaces every {{key}} with its value; unknown placeholders are
    // left untouched.
    static std::string fill(std::string_view template_text,
                            const std::map<std::string, std::string>& values);

private:
    std::map<std::string, PromptTemplate> templates_;
};

} // namespace openpub
