#pragma once

#include <cstdint>

#include "renyi_fs/data.hpp"

namespace renyi_fs {

/// Binary label driven linearly by the first `informative` columns:
/// y = [sum of informative + 0.5 * noise > 0]. The remaining `noise` columns
/// are independent standard normals. Columns are named x0, x1, ...
Dataset make_linear_synthetic(Eigen::Index n, int informative, int noise, std::uint64_t seed);

/// Breiman's three-class waveform data: 21 features, each a random convex
/// combination of two of three shifted triangular waves plus unit Gaussian
/// noise.
Dataset make_waveform(Eigen::Index n, std::uint64_t seed);

}  // namespace renyi_fs
