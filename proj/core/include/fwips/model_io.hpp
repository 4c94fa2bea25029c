#pragma once

#include <string>

#include "fwips/network.hpp"

namespace fwips {

// Versioned plain-text model format: layer counts and widths, activation
// kinds, normalizer parameters, then row-major weights and biases at full
// precision. save/load roundtrips are exact.
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

// First line of every model file.
inline constexpr const char* kModelMagic = "fwips-model v1";

}  // namespace fwips
