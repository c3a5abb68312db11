#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "hetnet/rng.hpp"

namespace hetnet {

class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero-forcing beamformer for the channel matrix whose columns are
/// [h, g_1, ..., g_u] (N x (u+1), u + 1 <= N). Returns the normalized first
/// column of H^H (H H^H)^-1 with H = channels^H: unit norm, orthogonal to
/// every g_i. With u = 0 this is h / |h|.
Eigen::VectorXcd zfbf_precoder(const Eigen::MatrixXcd& channels);

/// n i.i.d. CN(0, 1) entries.
Eigen::VectorXcd complex_gaussian(int n, Rng& rng);

}  // namespace hetnet
