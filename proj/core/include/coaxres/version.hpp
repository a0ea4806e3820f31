// Copyright (c) the coaxres authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef COAXRES_VERSION_HPP
#define COAXRES_VERSION_HPP

namespace coaxres {
inline constexpr const char* kVersion = "0.1.0";
}

#endif  // COAXRES_VERSION_HPP
