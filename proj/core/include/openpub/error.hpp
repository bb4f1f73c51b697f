// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace openpub {

// Every failure surfaced by the library carries one of these codes so the
// CLI can map it to an exit status without string matching.
enum class ErrorCode {
    ManifestMissing,
    ManifestInvalid,
    FileMissing,
    IoError,
    EncodingError,
    CassetteMiss,
    CassetteInvalid,
    BackendTimeout,
    BackendAuth,
    TemplateMissing,
    ResponseUnparsable,
    AllRunsFailed,
    AnchorInvalid,
    UnknownCommentSyntax,
    AlreadyAnnotated,
    UnknownTarget,
    MissingStageInput,
    UnknownFixture,
    InvalidArgument,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::ManifestMissing: return "ManifestMissing";
    case ErrorCode::ManifestInvalid: return "ManifestInvalid";
    case ErrorCode::FileMissing: return "FileMissing";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EncodingError: return "EncodingError";
    case ErrorCode::CassetteMiss: return "CassetteMiss";
    case ErrorCode::CassetteInvalid: return "CassetteInvalid";
    case ErrorCode::BackendTimeout: return "BackendTimeout";
    case ErrorCode::BackendAuth: return "BackendAuth";
    case ErrorCode::TemplateMissing: return "TemplateMissing";
    case ErrorCode::ResponseUnparsable: return "ResponseUnparsable";
    case ErrorCode::AllRunsFailed: return "AllRunsFailed";
    case ErrorCode::AnchorInvalid: return "AnchorInvalid";
    case ErrorCode::UnknownCommentSyntax: return "UnknownCommentSyntax";
    case ErrorCode::AlreadyAnnotated: return "AlreadyAnnotated";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::MissingStageInput: return "MissingStageInput";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace openpub
