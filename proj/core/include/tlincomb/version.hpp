#pragma once

#include <string_view>

namespace tlincomb {

/// Library version, with the git revision appended when built from a checkout.
std::string_view version();

}  // namespace tlincomb
