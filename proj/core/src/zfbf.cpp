#include "hetnet/zfbf.hpp"

#include <cmath>
#include <random>

namespace hetnet {

Eigen::VectorXcd zfbf_precoder(const Eigen::MatrixXcd& channels) {
  const Eigen::Index n = channels.rows();
  const Eigen::Index k = channels.cols();
  if (k < 1 || k > n) throw std::invalid_argument("zfbf_precoder: need 1 <= u + 1 <= N columns");
  if (k == 1) {
    const double norm = channels.col(0).norm();
    if (!(norm > 0.0)) throw RankDeficientError("zfbf_precoder: zero channel");
    return channels.col(0) / norm;
  }
  const Eigen::MatrixXcd gram = channels.adjoint() * channels;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
  lu.setThreshold(1e-12);
  if (lu.rank() < k) throw RankDeficientError("zfbf_precoder: channel vectors are linearly dependent");
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(k);
  e1(0) = 1.0;
  const Eigen::VectorXcd w = channels * lu.solve(e1);
  return w / w.norm();
}

Eigen::VectorXcd complex_gaussian(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = {normal(rng), normal(rng)};
  return v;
}

}  // namespace hetnet
