#pragma once

#include <string>
#include <utility>
#include <vector>

namespace unred {

inline constexpr const char* kVersion = "0.1.0";

/// Name/version pairs for the library and the numerical dependencies it was
/// built against, in a fixed order.
std::vector<std::pair<std::string, std::string>> build_versions();

}  // namespace unred
