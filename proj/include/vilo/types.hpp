#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace vilo {

using Scalar = double;
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
using Index = Eigen::Index;

// Thrown when tensor/sequence shapes do not line up; message names the axis.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed input files, coverage gaps, inconsistent person ids.
struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values or other failures during optimization.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_dim(bool ok, const std::string& what) {
    if (!ok) throw DimensionError(what);
}

inline bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace vilo
