// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace openpub {

// Incremental SHA-256. All digests in the project (bundle fingerprints,
// cassette keys, template provenance) are lowercase hex of this hash.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(Sha256&&) noexcept;
    Sha256& operator=(Sha256&&) noexcept;
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view data);
    void update(const void* data, std::size_t size);

    // Finalizes and returns the 64-char lowercase hex digest. The hasher
    // must not be reused afterwards.
    std::string hex_digest();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(std::string_view data);

} // namespace openpub
