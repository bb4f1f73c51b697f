// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace openpub {

enum class BackendMode { live, replay, mock };

std::optional<BackendMode> backend_mode_from_string(std::string_view name);
std::string_view to_string(BackendMode mode);

struct PromptRequest {
    std::string template_id;
    std::string filled_prompt;
    double temperature = 0.7;
    int run_index = 0;
};

// Canonical serialization of a request, the replay contract:
//   template_id '\n' prompt-with-LF-endings '\n' temperature-2dp '\n' run_index
// run_index participates so repeated runs of the same prompt record
// distinct responses.
std::string canonical_request_text(const PromptRequest& request);

// SHA-256 hex of the canonical serialization.
std::string canonical_key(const PromptRequest& request);

struct CassetteEntry {
    std::string key;
    std::string template_id;
    std::string prompt_sha256; // digest of the LF-normalized filled prompt
    int run_index = 0;
    std::string response;
};

// Recorded request -> response store. Lookups on a loaded cassette are
// lock-free; appends go through the owning gateway's writer lock.
class Cassette {
public:
    Cassette() = default;

    static Cassette load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::optional<std::string> lookup(const std::string& key) const;
    void append(const PromptRequest& request, const std::string& response);
    void append_entry(CassetteEntry entry); // no-op when the key already exists

    const std::vector<CassetteEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<CassetteEntry> entries_;
    std::map<std::string, std::size_t> index_; // key -> entry position
};

// The network boundary. Tests inject counting or scripted transports;
// replay and mock gateways never touch it.
class Transport {
public:
    struct Response {
        int status = 0; // 0 = transport-level failure (timeout, refused)
        std::string body;
    };

    virtual ~Transport() = default;
    virtual Response post(const std::string& url,
                          const std::vector<std::pair<std::string, std::string>>& headers,
                          const std::string& body, std::chrono::milliseconds timeout) = 0;
    virtual Response head(const std::string& url, std::chrono::milliseconds timeout) = 0;
    virtual Response get(const std::string& url, std::chrono::milliseconds timeout) = 0;
};

// cpp-httplib backed implementation used by the CLI in live mode.
std::shared_ptr<Transport> make_httplib_transport();

struct LiveConfig {
    std::string url;   // chat-completion endpoint
    std::string model;
    std::string api_key;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2; // on timeout/5xx; replay mode never retries
    std::chrono::milliseconds backoff_base{250};
    std::function<void(std::chrono::milliseconds)> sleeper; // injectable for tests
};

// Reads OPENPUB_LLM_URL / OPENPUB_LLM_MODEL / OPENPUB_LLM_KEY.
// Throws Error(BackendAuth) when a variable is missing.
LiveConfig live_config_from_env();

using ScriptedResponder = std::function<std::string(const PromptRequest&)>;

// Loads a scripted-mock response table: a JSON array of
// {template_id, run_index?, response}; entries without run_index match any.
ScriptedResponder load_script(const std::filesystem::path& path);

// Uniform gateway over the three backend modes. Thread-safe for
// concurrent send(); cassette appends are serialized internally.
class LlmGateway {
public:
    static LlmGateway replay(Cassette cassette);
    static LlmGateway mock(ScriptedResponder responder);
    static LlmGateway live(LiveConfig config, std::shared_ptr<Transport> transport);

    BackendMode mode() const { return mode_; }

    // When enabled, live and mock sends append (key, response) pairs to
    // the internal cassette, retrievable via recorded().
    void enable_recording() { recording_ = true; }
    const Cassette& recorded() const { return recorded_; }

    // Returns the raw response text. Throws Error with CassetteMiss,
    // BackendTimeout, BackendAuth, or InvalidArgument.
    std::string send(const PromptRequest& request);

private:
    LlmGateway() = default;

    BackendMode mode_ = BackendMode::mock;
    Cassette cassette_;             // replay source
    ScriptedResponder responder_;   // mock source
    LiveConfig live_;
    std::shared_ptr<Transport> transport_;

    bool recording_ = false;
    Cassette recorded_;
    std::unique_ptr<std::mutex> record_mutex_ = std::make_unique<std::mutex>();
};

} // namespace openpub
