// SPDX-FileCopyrightText: 2026 The OpenPub Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace openpub {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace openpub
