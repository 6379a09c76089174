#pragma once

#include <stdexcept>

namespace srmax {

// Inputs whose shapes are inconsistent or violate the N > (K-1)*M feasibility rule.
struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed on-disk data (channel files, datasets, configs, models).
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A channel draw whose stacked matrix lost rank. Does not happen under the
// continuous channel model; hand-crafted inputs can trigger it.
struct degenerate_channel_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace srmax
