//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_VERSION_HPP_
#define CHEMSCREEN_VERSION_HPP_

namespace chemscreen {

inline constexpr const char *kVersion = "0.1.0";
inline constexpr const char *kToolName = "chemscreen";

}  // namespace chemscreen

#endif  // CHEMSCREEN_VERSION_HPP_
