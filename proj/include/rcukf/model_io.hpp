#pragma once

#include <string>

#include "rcukf/reservoir.hpp"

namespace rcukf {

/// Reservoir model file: a self-describing flat text format. Header lines
/// carry the dimensions and scalars (reservoir_size, input_dim, output_dim,
/// leak_rate, spectral_radius, seed, ...), followed by row-major float64
/// text blocks for W_in, W and, when trained, W_out. Values are written in
/// shortest round-trip form, so save/load is value-exact.
void save_model(const Reservoir& reservoir, const std::string& path);
Reservoir load_model(const std::string& path);

} // namespace rcukf
