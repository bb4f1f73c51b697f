// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/prompts.hpp"

#include "openpub/digest.hpp"
#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"

namespace openpub {

namespace fs = std::filesystem;

PromptLibrary PromptLibrary::load_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::TemplateMissing,
                    "prompt directory not found: " + dir.generic_string());
    }
    PromptLibrary lib;
    static constexpr const char* kKinds[] = {"hyperparameter", "dataset", "code", "documentation"};
    for (const char* kind : kKinds) {
        for (int step = 1; step <= 2; ++step) {
            const std::string id = std::string(kind) + ".step" + std::to_string(step);
            const fs::path file = dir / (id + ".txt");
            if (!fs::exists(file)) {
                throw Error(ErrorCode::TemplateMissing, file.generic_string());
            }
            const std::string text = read_file(file);
            lib.templates_[id] = {id, text, sha256_hex(text)};
        }
    }
    const fs::path merge = dir / "consolidate.txt";
    if (fs::exists(merge)) {
        const std::string text = read_file(merge);
        lib.templates_["consolidate"] = {"consolidate", text, sha256_hex(text)};
    }
    return lib;
}

const PromptTemplate& PromptLibrary::get(const std::string& id) const {
    const auto it = templates_.find(id);
    if (it == templates_.end()) {
        throw Error(ErrorCode::TemplateMissing, "template not registered: " + id);
    }
    return it->second;
}

std::map<std::string, std::string> PromptLibrary::digests() const {
    std::map<std::string, std::string> out;
    for (const auto& [id, t] : templates_) {
        out.emplace(id, t.sha256);
    }
    return out;
}

std::string PromptLibrary::fill(std::string_view template_text,
                                const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(template_text.size());
    std::size_t pos = 0;
    while (pos < template_text.size()) {
        const std::size_t open = template_text.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(template_text.substr(pos));
            break;
        }
        const std::size_t close = template_text.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out.append(template_text.substr(pos));
            break;
        }
        out.append(template_text.substr(pos, open - pos));
        const std::string key(template_text.substr(open + 2, close - open - 2));
        const auto it = values.find(key);
        if (it != values.end()) {
            out.append(it->second);
        } else {
            out.append(template_text.substr(open, close + 2 - open));
        }
        pos = close + 2;
    }
    return out;
}

} // namespace openpub
