// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace openpub {

// Reads the whole file as bytes. Throws Error(IoError) when unreadable,
// Error(FileMissing) when absent.
std::string read_file(const std::filesystem::path& path);

// Writes content atomically: a sibling temp file is written and renamed
// over the destination. Parent directories are created on demand.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// True when the byte sequence is valid UTF-8.
bool is_valid_utf8(std::string_view text);

// Normalizes CRLF and lone CR line endings to LF.
std::string normalize_newlines(std::string_view text);

} // namespace openpub
