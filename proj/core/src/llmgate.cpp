// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#include "openpub/llmgate.hpp"

#include "openpub/digest.hpp"
#include "openpub/error.hpp"
#include "openpub/fsutil.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <thread>

#include "httplib.h"

namespace openpub {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<BackendMode> backend_mode_from_string(std::string_view name) {
    if (name == "live") {
        return BackendMode::live;
    }
    if (name == "replay") {
        return BackendMode::replay;
    }
    if (name == "mock") {
        return BackendMode::mock;
    }
    return std::nullopt;
}

std::string_view to_string(BackendMode mode) {
    switch (mode) {
    case BackendMode::live: return "live";
    case BackendMode::replay: return "replay";
    case BackendMode::mock: return "mock";
    }
    return "unknown";
}

namespace {

void validate(const PromptRequest& r) {
    if (r.filled_prompt.empty()) {
        throw Error(ErrorCode::InvalidArgument, "filled_prompt must be non-empty");
    }
    if (r.temperature < 0.0 || r.temperature > 1.0) {
        throw Error(ErrorCode::InvalidArgument, "temperature must be in [0,1]");
    }
    if (r.run_index < 0) {
        throw Error(ErrorCode::InvalidArgument, "run_index must be >= 0");
    }
}

std::string format_temperature(double t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", t);
    return buf;
}

} // namespace

std::string canonical_request_text(const PromptRequest& request) {
    validate(request);
    std::string out;
    out.reserve(request.filled_prompt.size() + request.template_id.size() + 16);
    out += request.template_id;
    out += '\n';
    out += normalize_newlines(request.filled_prompt);
    out += '\n';
    out += format_temperature(request.temperature);
    out += '\n';
    out += std::to_string(request.run_index);
    return out;
}

std::string canonical_key(const PromptRequest& request) {
    return sha256_hex(canonical_request_text(request));
}

Cassette Cassette::load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::CassetteInvalid, path.generic_string() + ": " + e.what());
    }
    if (!j.is_array()) {
        throw Error(ErrorCode::CassetteInvalid, path.generic_string() + ": expected a JSON array");
    }
    Cassette cassette;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& e = j[i];
        const std::string at = path.generic_string() + "[" + std::to_string(i) + "]";
        if (!e.is_object() || !e.contains("key") || !e.contains("template_id") ||
            !e.contains("prompt_sha256") || !e.contains("run_index") || !e.contains("response")) {
            throw Error(ErrorCode::CassetteInvalid, at + ": missing field");
        }
        CassetteEntry entry;
        entry.key = e["key"].get<std::string>();
        entry.template_id = e["template_id"].get<std::string>();
        entry.prompt_sha256 = e["prompt_sha256"].get<std::string>();
        entry.run_index = e["run_index"].get<int>();
        entry.response = e["response"].get<std::string>();
        if (!cassette.index_.emplace(entry.key, cassette.entries_.size()).second) {
            throw Error(ErrorCode::CassetteInvalid, at + ": duplicate key " + entry.key);
        }
        cassette.entries_.push_back(std::move(entry));
    }
    return cassette;
}

void Cassette::save(const std::filesystem::path& path) const {
    ordered_json j = ordered_json::array();
    for (const auto& e : entries_) {
        ordered_json o;
        o["key"] = e.key;
        o["template_id"] = e.template_id;
        o["prompt_sha256"] = e.prompt_sha256;
        o["run_index"] = e.run_index;
        o["response"] = e.response;
        j.push_back(std::move(o));
    }
    write_file_atomic(path, j.dump(2) + "\n");
}

std::optional<std::string> Cassette::lookup(const std::string& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return entries_[it->second].response;
}

void Cassette::append(const PromptRequest& request, const std::string& response) {
    CassetteEntry entry;
    entry.key = canonical_key(request);
    entry.template_id = request.template_id;
    entry.prompt_sha256 = sha256_hex(normalize_newlines(request.filled_prompt));
    entry.run_index = request.run_index;
    entry.response = response;
    append_entry(std::move(entry));
}

void Cassette::append_entry(CassetteEntry entry) {
    if (index_.contains(entry.key)) {
        return; // identical request already recorded
    }
    index_.emplace(entry.key, entries_.size());
    entries_.push_back(std::move(entry));
}

namespace {

class HttplibTransport final : public Transport {
public:
    Response post(const std::string& url,
                  const std::vector<std::pair<std::string, std::string>>& headers,
                  const std::string& body, std::chrono::milliseconds timeout) override {
        return roundtrip(url, timeout, [&](httplib::Client& client, const std::string& path) {
            httplib::Headers h(headers.begin(), headers.end());
            return client.Post(path, h, body, "application/json");
        });
    }

    Response head(const std::string& url, std::chrono::milliseconds timeout) override {
        return roundtrip(url, timeout, [&](httplib::Client& client, const std::string& path) {
            return client.Head(path);
        });
    }

    Response get(const std::string& url, std::chrono::milliseconds timeout) override {
        return roundtrip(url, timeout, [&](httplib::Client& client, const std::string& path) {
            return client.Get(path);
        });
    }

private:
    template <typename Fn>
    Response roundtrip(const std::string& url, std::chrono::milliseconds timeout, Fn&& fn) {
        std::string origin;
        std::string path = "/";
        const std::size_t scheme = url.find("://");
        if (scheme != std::string::npos) {
            const std::size_t slash = url.find('/', scheme + 3);
            if (slash == std::string::npos) {
                origin = url;
            } else {
                origin = url.substr(0, slash);
                path = url.substr(slash);
            }
        } else {
            origin = url;
        }
        httplib::Client client(origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        client.set_connection_timeout(static_cast<time_t>(secs.count()), 0);
        client.set_read_timeout(static_cast<time_t>(secs.count()), 0);
        auto result = fn(client, path);
        if (!result) {
            return {0, httplib::to_string(result.error())};
        }
        return {result->status, result->body};
    }
};

} // namespace

std::shared_ptr<Transport> make_httplib_transport() {
    return std::make_shared<HttplibTransport>();
}

LiveConfig live_config_from_env() {
    const auto need = [](const char* var) {
        const char* v = std::getenv(var);
        if (!v || !*v) {
            throw Error(ErrorCode::BackendAuth, std::string(var) + " is not set");
        }
        return std::string(v);
    };
    LiveConfig cfg;
    cfg.url = need("OPENPUB_LLM_URL");
    cfg.model = need("OPENPUB_LLM_MODEL");
    cfg.api_key = need("OPENPUB_LLM_KEY");
    return cfg;
}

ScriptedResponder load_script(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ManifestInvalid, path.generic_string() + ": " + e.what());
    }
    if (!j.is_array()) {
        throw Error(ErrorCode::ManifestInvalid, path.generic_string() + ": expected a JSON array");
    }
    struct Key {
        std::string template_id;
        int run_index; // -1 = wildcard
        bool operator<(const Key& o) const {
            return std::tie(template_id, run_index) < std::tie(o.template_id, o.run_index);
        }
    };
    auto table = std::make_shared<std::map<Key, std::string>>();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& e = j[i];
        if (!e.is_object() || !e.contains("template_id") || !e.contains("response")) {
            throw Error(ErrorCode::ManifestInvalid,
                        path.generic_string() + "[" + std::to_string(i) + "]: missing field");
        }
        Key key{e["template_id"].get<std::string>(),
                e.contains("run_index") ? e["run_index"].get<int>() : -1};
        (*table)[key] = e["response"].get<std::string>();
    }
    return [table](const PromptRequest& request) -> std::string {
        auto it = table->find({request.template_id, request.run_index});
        if (it == table->end()) {
            it = table->find({request.template_id, -1});
        }
        if (it == table->end()) {
            return "[]";
        }
        return it->second;
    };
}

LlmGateway LlmGateway::replay(Cassette cassette) {
    LlmGateway gw;
    gw.mode_ = BackendMode::replay;
    gw.cassette_ = std::move(cassette);
    return gw;
}

LlmGateway LlmGateway::mock(ScriptedResponder responder) {
    LlmGateway gw;
    gw.mode_ = BackendMode::mock;
    gw.responder_ = std::move(responder);
    return gw;
}

LlmGateway LlmGateway::live(LiveConfig config, std::shared_ptr<Transport> transport) {
    LlmGateway gw;
    gw.mode_ = BackendMode::live;
    gw.live_ = std::move(config);
    gw.transport_ = std::move(transport);
    return gw;
}

std::string LlmGateway::send(const PromptRequest& request) {
    validate(request);

    if (mode_ == BackendMode::replay) {
        const auto hit = cassette_.lookup(canonical_key(request));
        if (!hit) {
            throw Error(ErrorCode::CassetteMiss,
                        "no recorded response for template " + request.template_id + " run " +
                            std::to_string(request.run_index));
        }
        return *hit; // replay never retries and never touches the transport
    }

    std::string response;
    if (mode_ == BackendMode::mock) {
        response = responder_ ? responder_(request) : "[]";
    } else {
        json body;
        body["model"] = live_.model;
        body["temperature"] = request.temperature;
        body["messages"] = json::array({json{{"role", "user"}, {"content", request.filled_prompt}}});
        const std::vector<std::pair<std::string, std::string>> headers = {
            {"Authorization", "Bearer " + live_.api_key}};

        Transport::Response http;
        int attempt = 0;
        for (;;) {
            http = transport_->post(live_.url, headers, body.dump(), live_.timeout);
            if (http.status == 401 || http.status == 403) {
                throw Error(ErrorCode::BackendAuth,
                            "backend rejected credentials (status " +
                                std::to_string(http.status) + ")");
            }
            const bool retryable = http.status == 0 || http.status >= 500;
            if (!retryable || attempt >= live_.max_retries) {
                break;
            }
            const auto delay = live_.backoff_base * (1 << attempt);
            if (live_.sleeper) {
                live_.sleeper(delay);
            } else {
                std::this_thread::sleep_for(delay);
            }
            ++attempt;
        }
        if (http.status == 0) {
            throw Error(ErrorCode::BackendTimeout, "live call failed after retries: " + http.body);
        }
        if (http.status < 200 || http.status >= 300) {
            throw Error(ErrorCode::IoError,
                        "backend returned status " + std::to_string(http.status));
        }
        try {
            const json parsed = json::parse(http.body);
            response = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::IoError, std::string("malformed backend response: ") + e.what());
        }
    }

    if (recording_) {
        std::lock_guard<std::mutex> lock(*record_mutex_);
        recorded_.append(request, response);
    }
    return response;
}

} // namespace openpub
