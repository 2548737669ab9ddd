#include "qshift/version.hpp"

namespace qshift {

std::string_view version() noexcept { return QSHIFT_VERSION; }

}  // namespace qshift
