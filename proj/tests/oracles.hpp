#ifndef CALIBRON_TESTS_ORACLES_HPP
#define CALIBRON_TESTS_ORACLES_HPP

// Independent reference implementations used only by the test suite.  They
// deliberately avoid the library's code paths: evaluation enumerates all
// k-subsets with cofactor-expansion determinants, volumes come from QR.

#include <Eigen/Dense>
#include <vector>

#include "calibron/exterior.hpp"
#include "calibron/rng.hpp"

namespace oracles {

using calibron::exterior::KForm;
using calibron::exterior::MultiIndex;
using calibron::exterior::RealVector;

// Determinant by cofactor expansion along the first row (exponential; fine
// for k <= 8 test sizes and structurally unlike the library's LU).
inline double cofactor_det(const std::vector<std::vector<double>>& m) {
  const std::size_t k = m.size();
  if (k == 1) return m[0][0];
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (m[0][j] == 0.0) continue;
    std::vector<std::vector<double>> minor(k - 1, std::vector<double>(k - 1));
    for (std::size_t r = 1; r < k; ++r) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < k; ++c) {
        if (c == j) continue;
        minor[r - 1][cc++] = m[r][c];
      }
    }
    total += ((j % 2 == 0) ? 1.0 : -1.0) * m[0][j] * cofactor_det(minor);
  }
  return total;
}

// Dense brute-force evaluation: walk every size-k subset of {1..n}, look the
// coefficient up, and multiply by the explicit minor determinant.
inline double dense_evaluate(const KForm& f, const std::vector<RealVector>& frame) {
  const int n = f.dim();
  const int k = f.degree();
  if (k == 0) return f.coefficient(MultiIndex{});
  double total = 0.0;
  for (std::uint16_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    const MultiIndex idx = MultiIndex::from_mask(mask);
    const double c = f.coefficient(idx);
    if (c == 0.0) continue;
    std::vector<std::vector<double>> m(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k)));
    int row = 0;
    for (int i : idx.indices()) {
      for (int col = 0; col < k; ++col) m[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] = frame[static_cast<std::size_t>(col)][i - 1];
      ++row;
    }
    total += c * cofactor_det(m);
    (void)row;
  }
  return total;
}

// Frame volume via QR: |prod of R's diagonal| for the dim x k frame matrix.
inline double qr_volume(const std::vector<RealVector>& frame) {
  const int dim = frame[0].dim();
  const int k = static_cast<int>(frame.size());
  Eigen::MatrixXd g(dim, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = frame[static_cast<std::size_t>(j)][i];
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= r(i, i);
  return std::fabs(v);
}

// Random k-form on R^n with coefficients in [-1, 1] on every basis index.
inline KForm random_form(calibron::SplitRng& rng, int n, int k) {
  KForm f(n, k);
  for (std::uint16_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    f.set_term(MultiIndex::from_mask(mask), rng.uniform(-1.0, 1.0));
  }
  return f;
}

inline std::vector<RealVector> random_frame(calibron::SplitRng& rng, int n, int k) {
  std::vector<RealVector> frame;
  frame.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) frame.push_back(rng.gaussian_vector(n));
  return frame;
}

// Inner product on forms induced by the orthonormal basis: sum over matching
// keys of the coefficient products.
inline double form_inner(const KForm& a, const KForm& b) {
  double s = 0.0;
  for (const auto& [idx, c] : a.terms()) s += c * b.coefficient(idx);
  return s;
}

}  // namespace oracles

#endif  // CALIBRON_TESTS_ORACLES_HPP
