#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace toxblend {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Three-valued assay outcome. Stored as int8 so label matrices stay compact.
enum class Label : std::int8_t { Missing = -1, Inactive = 0, Active = 1 };

inline bool is_known(Label l) { return l != Label::Missing; }
inline std::ostream& operator<<(std::ostream& os, Label l) { return os << static_cast<int>(l); }

/// Label matrix, molecules x targets, row-major.
using LabelMatrix = Eigen::Matrix<Label, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (SMILES, CSV cells, model files).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace toxblend
