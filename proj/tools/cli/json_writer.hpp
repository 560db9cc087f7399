#pragma once

#include <string>

#include "config.hpp"

namespace confgeo::cli {

/// Pretty-printed JSON with every number written to 17 significant digits
/// (integers as integers). Non-finite numbers become null. Key order is the
/// insertion order, so equal documents give identical text.
std::string to_text(const Json& doc);

}  // namespace confgeo::cli
