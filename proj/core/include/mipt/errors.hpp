#pragma once

#include <stdexcept>
#include <string>

namespace mipt {

/// Invalid run or model parameters (odd L, bad divisibility, p out of range, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A fit could not be performed on the given data (too few sizes, degenerate input, ...).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mipt
