// Copyright The riesz-osc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace riesz_osc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace riesz_osc
