#pragma once

#include <string_view>

namespace qshift {

/// Library version, "major.minor.patch".
std::string_view version() noexcept;

}  // namespace qshift
