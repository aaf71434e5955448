#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "ecto/autodiff/tensor.hpp"

namespace ecto::ad {

/// Independent generator for a named stream derived from the master seed.
std::mt19937_64 derive_stream(std::uint64_t master_seed, std::string_view tag);

/// He/Kaiming-uniform fan-in init: U(−√(6/fan_in), √(6/fan_in)).
Tensor kaiming_uniform(Shape shape, std::size_t fan_in, std::mt19937_64& rng);
/// U(−1/√fan_in, 1/√fan_in), the usual default for dense and conv layers.
Tensor fan_in_uniform(Shape shape, std::size_t fan_in, std::mt19937_64& rng);
Tensor normal_init(Shape shape, double stddev, std::mt19937_64& rng);

}  // namespace ecto::ad
