#ifndef CALIBRON_SOLVERS_HPP
#define CALIBRON_SOLVERS_HPP

// Residual systems and solution generators for the group-invariant
// constructions: conserved-quantity level tracing for the torus and
// diagonal-SO families, the T^2 associative system and its reduction
// certificate, the T^3 Cayley reduction, the Sp(1) ODE integrator with its
// cone family, and the T^2 coassociative residuals with the pointwise-linear
// ansatz solver.
//
// Everything here is a pure function of its inputs; residual evaluators are
// grid-parallelizable and tracers/integrators share no mutable state across
// trajectories.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "calibron/exterior.hpp"
#include "calibron/forms.hpp"
#include "calibron/hypercomplex.hpp"
#include "calibron/orbits.hpp"

namespace calibron::solvers {

using exterior::RealVector;
using forms::DegenerateInput;
using forms::ResidualVector;
using orbits::CurveJet1;
using orbits::SurfaceJet1;

// ---------------------------------------------------------------------------
// Level constants for the SL torus family
// ---------------------------------------------------------------------------

// Which part of the coordinate product is conserved: the imaginary part when
// the complex dimension is odd, the real part when it is even.
enum class Parity { imaginary, real };

inline Parity parity_for(int n) { return (n % 2 != 0) ? Parity::imaginary : Parity::real; }

struct LevelConstants {
  std::vector<double> c_k;  // |z_k|^2 - |z_n|^2 targets, k = 1..n-1
  double c = 0.0;           // product-part target
  Parity parity = Parity::imaginary;

  void validate(int n) const {
    if (n < 2 || n > 4) throw std::invalid_argument("LevelConstants: n must be in [2,4]");
    if (static_cast<int>(c_k.size()) != n - 1)
      throw std::invalid_argument("LevelConstants: expected n-1 difference constants");
    if (parity != parity_for(n))
      throw std::invalid_argument("LevelConstants: parity must be imaginary iff n is odd");
    for (double v : c_k)
      if (!std::isfinite(v)) throw std::invalid_argument("LevelConstants: non-finite constant");
    if (!std::isfinite(c)) throw std::invalid_argument("LevelConstants: non-finite constant");
  }
};

namespace detail {

inline int complex_dim_of(const RealVector& v, const char* who) {
  if (v.dim() % 2 != 0) throw std::invalid_argument(std::string(who) + ": ambient dimension must be even");
  const int n = v.dim() / 2;
  if (n < 2 || n > 4) throw std::invalid_argument(std::string(who) + ": complex dimension must be in [2,4]");
  return n;
}

inline std::complex<double> slot_complex(const RealVector& v, int k0) {
  // k0 is the 0-based complex index; coordinates are interleaved (re, im).
  return {v[2 * k0], v[2 * k0 + 1]};
}

inline std::vector<std::complex<double>> complex_coords(const RealVector& v) {
  std::vector<std::complex<double>> z(static_cast<std::size_t>(v.dim() / 2));
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = slot_complex(v, static_cast<int>(k));
  return z;
}

// d/dt of the coordinate product, from values and derivatives.
inline std::complex<double> product_derivative(const std::vector<std::complex<double>>& z,
                                               const std::vector<std::complex<double>>& dz) {
  std::complex<double> sum = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    std::complex<double> q = dz[j];
    for (std::size_t m = 0; m < z.size(); ++m)
      if (m != j) q *= z[m];
    sum += q;
  }
  return sum;
}

inline std::complex<double> product_of(const std::vector<std::complex<double>>& z) {
  std::complex<double> p = 1.0;
  for (const auto& w : z) p *= w;
  return p;
}

}  // namespace detail

// Measure the level constants satisfied by a point of C^n (interleaved).
inline LevelConstants measure_levels(const RealVector& start) {
  const int n = detail::complex_dim_of(start, "measure_levels");
  const auto z = detail::complex_coords(start);
  LevelConstants out;
  out.parity = parity_for(n);
  for (int k = 0; k + 1 < n; ++k) out.c_k.push_back(std::norm(z[k]) - std::norm(z[n - 1]));
  const std::complex<double> p = detail::product_of(z);
  out.c = (out.parity == Parity::imaginary) ? p.imag() : p.real();
  return out;
}

// ---------------------------------------------------------------------------
// SL torus residuals: the derivative form of the level conditions.
//   level_k = d/dt (|z_k|^2 - |z_n|^2),   k = 1..n-1
//   phase   = d/dt Im(z_1 ... z_n)   (n odd)   or   d/dt Re(...)  (n even)
// ---------------------------------------------------------------------------
inline ResidualVector sl_torus_residuals(const CurveJet1& jet) {
  const int n = detail::complex_dim_of(jet.value, "sl_torus_residuals");
  const auto z = detail::complex_coords(jet.value);
  const auto dz = detail::complex_coords(jet.deriv);
  ResidualVector out;
  char label[32];
  for (int k = 0; k + 1 < n; ++k) {
    const double d = 2.0 * (z[k] * std::conj(dz[k])).real() - 2.0 * (z[n - 1] * std::conj(dz[n - 1])).real();
    std::snprintf(label, sizeof label, "level_%d", k + 1);
    out.push(label, d);
  }
  const std::complex<double> dp = detail::product_derivative(z, dz);
  out.push("phase", (parity_for(n) == Parity::imaginary) ? dp.imag() : dp.real());
  return out;
}

// ---------------------------------------------------------------------------
// Predictor-corrector tracer for the SL torus level sets.
//
// Constraint map C: R^{2n} -> R^n collects the n-1 norm differences and the
// parity part of the product.  The predictor is the unit null direction of
// the (2n-1) x 2n matrix stacking the constraint Jacobian on top of the
// torus orbit directions; the corrector is Newton with the Moore-Penrose
// step (<= 10 iterations, tolerance 1e-12).  A step whose corrector fails is
// rejected and the step size halves.
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::VectorXd sl_constraint_values(const std::vector<std::complex<double>>& z,
                                            const LevelConstants& levels) {
  const int n = static_cast<int>(z.size());
  Eigen::VectorXd r(n);
  for (int k = 0; k + 1 < n; ++k) r(k) = std::norm(z[k]) - std::norm(z[n - 1]) - levels.c_k[k];
  const std::complex<double> p = product_of(z);
  r(n - 1) = (levels.parity == Parity::imaginary) ? p.imag() - levels.c : p.real() - levels.c;
  return r;
}

inline Eigen::MatrixXd sl_constraint_jacobian(const std::vector<std::complex<double>>& z, Parity parity) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, 2 * n);
  for (int k = 0; k + 1 < n; ++k) {
    J(k, 2 * k) = 2.0 * z[k].real();
    J(k, 2 * k + 1) = 2.0 * z[k].imag();
    J(k, 2 * n - 2) = -2.0 * z[n - 1].real();
    J(k, 2 * n - 1) = -2.0 * z[n - 1].imag();
  }
  for (int j = 0; j < n; ++j) {
    std::complex<double> q = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) q *= z[m];
    if (parity == Parity::imaginary) {
      J(n - 1, 2 * j) = q.imag();      // d Im(prod) / d Re(z_j)
      J(n - 1, 2 * j + 1) = q.real();  // d Im(prod) / d Im(z_j) = Im(i q)
    } else {
      J(n - 1, 2 * j) = q.real();
      J(n - 1, 2 * j + 1) = -q.imag();  // d Re(prod) / d Im(z_j) = Re(i q)
    }
  }
  return J;
}

// Torus orbit directions at theta = 0: i z_k on pair k, -i z_n on pair n.
inline Eigen::MatrixXd sl_orbit_directions(const std::vector<std::complex<double>>& z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n - 1, 2 * n);
  for (int k = 0; k + 1 < n; ++k) {
    T(k, 2 * k) = -z[k].imag();
    T(k, 2 * k + 1) = z[k].real();
    T(k, 2 * n - 2) = z[n - 1].imag();
    T(k, 2 * n - 1) = -z[n - 1].real();
  }
  return T;
}

// Unit direction spanning the null space of [jacobian; orbit directions].
// Throws DegenerateInput when the null space is not one-dimensional.
inline Eigen::VectorXd sl_level_direction(const std::vector<std::complex<double>>& z,
                                          const LevelConstants& levels) {
  const Eigen::MatrixXd J = sl_constraint_jacobian(z, levels.parity);
  const Eigen::MatrixXd T = sl_orbit_directions(z);
  Eigen::MatrixXd A(J.rows() + T.rows(), J.cols());
  A << J, T;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * std::max(1.0, sv(0)))
    throw DegenerateInput("sl_torus_trace: rank-deficient constraint Jacobian (orbit degeneration)");
  return svd.matrixV().col(A.cols() - 1);
}

inline Eigen::VectorXd to_eigen(const RealVector& v) {
  Eigen::VectorXd out(v.dim());
  for (int i = 0; i < v.dim(); ++i) out(i) = v[i];
  return out;
}

inline RealVector from_eigen(const Eigen::VectorXd& v) {
  RealVector out(static_cast<int>(v.size()));
  for (int i = 0; i < v.size(); ++i) out[i] = v(i);
  return out;
}

inline std::vector<std::complex<double>> complex_of_eigen(const Eigen::VectorXd& r) {
  std::vector<std::complex<double>> z(static_cast<std::size_t>(r.size() / 2));
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = {r(2 * k), r(2 * k + 1)};
  return z;
}

// Newton/Moore-Penrose projection back onto the level set.  Returns true on
// convergence (max |constraint| <= 1e-12 within 10 iterations).
inline bool sl_newton_correct(Eigen::VectorXd& r, const LevelConstants& levels) {
  for (int it = 0; it < 10; ++it) {
    const auto z = complex_of_eigen(r);
    const Eigen::VectorXd C = sl_constraint_values(z, levels);
    if (C.cwiseAbs().maxCoeff() <= 1e-12) return true;
    const Eigen::MatrixXd J = sl_constraint_jacobian(z, levels.parity);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    r -= svd.solve(C);
  }
  const auto z = complex_of_eigen(r);
  return sl_constraint_values(z, levels).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace detail

inline std::vector<CurveJet1> sl_torus_trace(const LevelConstants& levels, const RealVector& start,
                                             int steps, double h, int orientation = +1) {
  const int n = detail::complex_dim_of(start, "sl_torus_trace");
  levels.validate(n);
  if (steps < 1) throw std::invalid_argument("sl_torus_trace: steps must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("sl_torus_trace: step size must be positive");
  if (orientation != 1 && orientation != -1)
    throw std::invalid_argument("sl_torus_trace: orientation must be +1 or -1");

  auto z0 = detail::complex_coords(start);
  for (const auto& w : z0)
    if (std::norm(w) == 0.0) throw DegenerateInput("sl_torus_trace: start has a zero coordinate");
  if (detail::sl_constraint_values(z0, levels).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("sl_torus_trace: start does not satisfy the level constants");

  std::vector<CurveJet1> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);

  Eigen::VectorXd point = detail::to_eigen(start);
  Eigen::VectorXd dir = static_cast<double>(orientation) * detail::sl_level_direction(z0, levels);
  out.emplace_back(0.0, start, detail::from_eigen(dir));

  double t = 0.0;
  double step = h;
  for (int s = 0; s < steps; ++s) {
    const auto z = detail::complex_of_eigen(point);
    Eigen::VectorXd d = detail::sl_level_direction(z, levels);
    if (d.dot(dir) < 0.0) d = -d;

    Eigen::VectorXd trial;
    bool accepted = false;
    for (int halvings = 0; halvings < 30; ++halvings) {
      trial = point + step * d;
      if (detail::sl_newton_correct(trial, levels)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) throw std::runtime_error("sl_torus_trace: corrector failed below minimum step size");

    point = trial;
    t += step;
    Eigen::VectorXd dout = detail::sl_level_direction(detail::complex_of_eigen(point), levels);
    if (dout.dot(d) < 0.0) dout = -dout;
    dir = dout;
    out.emplace_back(t, detail::from_eigen(point), detail::from_eigen(dout));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diagonal SO(n) family: residual and planar level tracer.
//   residual = d/dt Im((r + i q)^n)  with  r = |u|, q = |v|
// on jets in R^{2n} interleaved as z_k = u_k + i v_k.
// ---------------------------------------------------------------------------
inline double so_n_residual(const CurveJet1& jet) {
  const int n = detail::complex_dim_of(jet.value, "so_n_residual");
  double r2 = 0.0, q2 = 0.0, rdr = 0.0, qdq = 0.0;
  for (int k = 0; k < n; ++k) {
    r2 += jet.value[2 * k] * jet.value[2 * k];
    q2 += jet.value[2 * k + 1] * jet.value[2 * k + 1];
    rdr += jet.value[2 * k] * jet.deriv[2 * k];      // r r' = u . u'
    qdq += jet.value[2 * k + 1] * jet.deriv[2 * k + 1];
  }
  if (r2 < 1e-28 || q2 < 1e-28) throw DegenerateInput("so_n_residual: |u| and |v| must be nonzero");
  const double r = std::sqrt(r2), q = std::sqrt(q2);
  const std::complex<double> w(r, q);
  const std::complex<double> dw(rdr / r, qdq / q);
  return (static_cast<double>(n) * std::pow(w, n - 1) * dw).imag();
}

// Embed a planar jet (x, y) as the curve (x, 0, ...; y, 0, ...) in R^{2n}
// interleaved, ready for lifting through the diagonal SO(n) orbit map.
inline CurveJet1 so_n_embed_jet(int n, const CurveJet1& planar) {
  if (n < 2 || n > 4) throw std::invalid_argument("so_n_embed_jet: n must be in [2,4]");
  if (planar.value.dim() != 2) throw std::invalid_argument("so_n_embed_jet: planar jet must have dimension 2");
  RealVector value(2 * n), deriv(2 * n);
  value[0] = planar.value[0];
  value[1] = planar.value[1];
  deriv[0] = planar.deriv[0];
  deriv[1] = planar.deriv[1];
  return {planar.t, value, deriv};
}

// Trace the level curve Im((x + i y)^n) = c inside the open positive
// quadrant.  The tracer stops (truncating the output) when a step would
// leave the quadrant or the level gradient degenerates; a degenerate
// gradient at the start throws instead.
inline std::vector<CurveJet1> so_n_trace(int n, double c, double x0, double y0, int steps, double h,
                                         int orientation = +1) {
  if (n < 2 || n > 4) throw std::invalid_argument("so_n_trace: n must be in [2,4]");
  if (steps < 1) throw std::invalid_argument("so_n_trace: steps must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("so_n_trace: step size must be positive");
  if (orientation != 1 && orientation != -1)
    throw std::invalid_argument("so_n_trace: orientation must be +1 or -1");
  if (!(x0 > 0.0) || !(y0 > 0.0)) throw std::invalid_argument("so_n_trace: start must lie in the open positive quadrant");
  if (std::fabs((std::pow(std::complex<double>(x0, y0), n)).imag() - c) > 1e-10)
    throw std::invalid_argument("so_n_trace: start does not satisfy the level value");

  auto gradient = [n](double x, double y) {
    const std::complex<double> g = static_cast<double>(n) * std::pow(std::complex<double>(x, y), n - 1);
    return std::array<double, 2>{g.imag(), g.real()};  // (d/dx, d/dy) of Im(z^n)
  };
  auto level = [n, c](double x, double y) {
    return (std::pow(std::complex<double>(x, y), n)).imag() - c;
  };

  std::array<double, 2> p{x0, y0};
  {
    const auto g = gradient(p[0], p[1]);
    if (std::hypot(g[0], g[1]) <= 1e-12) throw DegenerateInput("so_n_trace: level gradient vanishes at the start");
  }

  std::vector<CurveJet1> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  std::array<double, 2> prev{0.0, 0.0};
  bool have_prev = false;
  double t = 0.0;
  double step = h;

  auto tangent_at = [&](double x, double y, bool* ok) -> std::array<double, 2> {
    const auto g = gradient(x, y);
    const double gn = std::hypot(g[0], g[1]);
    if (gn <= 1e-12) {
      *ok = false;
      return {0.0, 0.0};
    }
    *ok = true;
    std::array<double, 2> d{-g[1] / gn, g[0] / gn};
    if (have_prev && d[0] * prev[0] + d[1] * prev[1] < 0.0) {
      d[0] = -d[0];
      d[1] = -d[1];
    }
    return d;
  };

  bool ok = true;
  std::array<double, 2> d0 = tangent_at(p[0], p[1], &ok);
  if (orientation < 0) {
    d0[0] = -d0[0];
    d0[1] = -d0[1];
  }
  out.emplace_back(0.0, RealVector{p[0], p[1]}, RealVector{d0[0], d0[1]});
  prev = d0;
  have_prev = true;

  for (int s = 0; s < steps; ++s) {
    const std::array<double, 2> d = tangent_at(p[0], p[1], &ok);
    if (!ok) break;  // gradient degenerated mid-trace: stop
    prev = d;

    std::array<double, 2> q{0.0, 0.0};
    bool accepted = false;
    for (int halvings = 0; halvings < 30 && !accepted; ++halvings) {
      q = {p[0] + step * d[0], p[1] + step * d[1]};
      for (int it = 0; it < 10; ++it) {
        const double val = level(q[0], q[1]);
        if (std::fabs(val) <= 1e-12) {
          accepted = true;
          break;
        }
        const auto g = gradient(q[0], q[1]);
        const double g2 = g[0] * g[0] + g[1] * g[1];
        if (g2 <= 1e-24) break;
        q[0] -= g[0] * val / g2;
        q[1] -= g[1] * val / g2;
      }
      if (!accepted) step *= 0.5;
    }
    if (!accepted) throw std::runtime_error("so_n_trace: corrector failed below minimum step size");
    if (q[0] <= 0.0 || q[1] <= 0.0) break;  // leaving the open quadrant: stop

    p = q;
    t += step;
    const std::array<double, 2> dout = tangent_at(p[0], p[1], &ok);
    if (!ok) {
      out.emplace_back(t, RealVector{p[0], p[1]}, RealVector{d[0], d[1]});
      break;
    }
    prev = dout;
    out.emplace_back(t, RealVector{p[0], p[1]}, RealVector{dout[0], dout[1]});
  }
  return out;
}

// ---------------------------------------------------------------------------
// T^2 associative system: the seven closed-form residuals in the coordinates
// alpha = (a1, z1, z2, z3) with z_k on interleaved slots.
// ---------------------------------------------------------------------------
inline ResidualVector t2_associative_residuals(const CurveJet1& jet) {
  if (jet.value.dim() != 7) throw std::invalid_argument("t2_associative_residuals: expected dimension 7");
  const std::complex<double> z1{jet.value[1], jet.value[2]}, z2{jet.value[3], jet.value[4]},
      z3{jet.value[5], jet.value[6]};
  const std::complex<double> d1{jet.deriv[1], jet.deriv[2]}, d2{jet.deriv[3], jet.deriv[4]},
      d3{jet.deriv[5], jet.deriv[6]};
  if (std::norm(z1) == 0.0 || std::norm(z2) == 0.0 || std::norm(z3) == 0.0)
    throw DegenerateInput("t2_associative_residuals: zero complex coordinate");
  const double da1 = jet.deriv[0];

  auto dnorm = [](const std::complex<double>& z, const std::complex<double>& dz) {
    return 2.0 * (z.real() * dz.real() + z.imag() * dz.imag());  // d/dt |z|^2
  };
  const double d12 = dnorm(z1, d1) - dnorm(z2, d2);
  const double d23 = dnorm(z2, d2) - dnorm(z3, d3);
  const double d31 = dnorm(z3, d3) - dnorm(z1, d1);

  ResidualVector out;
  out.push("eq_1", (d1 * z2 * z3 + z1 * d2 * z3 + z1 * z2 * d3).imag());
  out.push("eq_2", (z2 * z3).imag() * da1 + 0.5 * d23 * z1.real());
  out.push("eq_3", (z2 * z3).real() * da1 + 0.5 * d23 * z1.imag());
  out.push("eq_4", (z1 * z3).imag() * da1 + 0.5 * d31 * z2.real());
  out.push("eq_5", (z1 * z3).real() * da1 + 0.5 * d31 * z2.imag());
  out.push("eq_6", (z1 * z2).imag() * da1 + 0.5 * d12 * z3.real());
  out.push("eq_7", (z1 * z2).real() * da1 + 0.5 * d12 * z3.imag());
  return out;
}

// ---------------------------------------------------------------------------
// Reduction certificate for the T^2 associative system.
//
// With x = |z_1|^2, y = |z_2|^2, w = a1' and conserved k, the three reduced
// equations force w = 0.  The certificate reports
//   residual = 2w/(x c) * (c^2 x + k^2 x^2 + k^2 c),  c = x y,
// which is nonzero whenever w != 0 (every factor is positive), together with
// the numerically verified derivative-combination identity
//   (y - k^2/(xy))' x - (k^2/(xy) - x)' y
//     = (x^2 y^2 + k^2 x + k^2 y)(xy)' / (x^2 y^2),
// checked on the basis derivative directions (x', y') in {(1,0), (0,1)}.
// ---------------------------------------------------------------------------
struct ReductionCertificate {
  double residual = 0.0;
  double identity_defect = 0.0;
};

inline ReductionCertificate t2_associative_reduction_check(double x, double y, double w, double k) {
  if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("t2_associative_reduction_check: x, y must be positive");
  if (k == 0.0) throw std::invalid_argument("t2_associative_reduction_check: k must be nonzero");
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(k))
    throw std::invalid_argument("t2_associative_reduction_check: non-finite input");

  ReductionCertificate cert;
  const double c = x * y;
  cert.residual = 2.0 * w / (x * c) * (c * c * x + k * k * x * x + k * k * c);

  const double x2y2 = x * x * y * y;
  for (int basis = 0; basis < 2; ++basis) {
    const double dx = (basis == 0) ? 1.0 : 0.0;
    const double dy = 1.0 - dx;
    const double dxy = dx * y + x * dy;            // (xy)'
    const double dinv = -k * k * dxy / x2y2;       // (k^2/(xy))'
    const double lhs = (dy - dinv) * x - (dinv - dx) * y;
    const double rhs = (x2y2 + k * k * x + k * k * y) * dxy / x2y2;
    cert.identity_defect = std::max(cert.identity_defect, std::fabs(lhs - rhs));
  }
  return cert;
}

// ---------------------------------------------------------------------------
// T^3 Cayley reduction residuals on jets in R^8 = C^4 (interleaved).
// Entries: the (omega ^ omega) value on the orbit frame at zero angles,
// three level derivatives d/dt(|w_4|^2 - |w_k|^2) as printed (w_4 leading),
// and d/dt Re(w_1 w_2 w_3 w_4).
// ---------------------------------------------------------------------------
inline ResidualVector t3_cayley_residuals(const CurveJet1& jet) {
  if (jet.value.dim() != 8) throw std::invalid_argument("t3_cayley_residuals: expected dimension 8");
  const auto w = detail::complex_coords(jet.value);
  const auto dw = detail::complex_coords(jet.deriv);
  for (const auto& wk : w)
    if (std::norm(wk) == 0.0) throw DegenerateInput("t3_cayley_residuals: zero complex coordinate");

  static const exterior::KForm omega2 = exterior::wedge(forms::symplectic_form(4), forms::symplectic_form(4));
  const forms::Frame frame = orbits::orbit_frame(orbits::TorusSpin7{}, jet);

  ResidualVector out;
  out.push("omega_omega", exterior::evaluate(omega2, frame.vectors));
  auto dnorm = [](const std::complex<double>& z, const std::complex<double>& dz) {
    return 2.0 * (z.real() * dz.real() + z.imag() * dz.imag());
  };
  char label[32];
  for (int k = 0; k < 3; ++k) {
    std::snprintf(label, sizeof label, "level_%d", k + 1);
    out.push(label, dnorm(w[3], dw[3]) - dnorm(w[k], dw[k]));
  }
  out.push("re_prod", detail::product_derivative(w, dw).real());
  return out;
}

// ---------------------------------------------------------------------------
// Sp(1) family: state, right-hand side, fixed-step integration, cone curve.
// ---------------------------------------------------------------------------

struct Sp1State {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  double u = 0.0;
  // Derived quantities, fixed at construction.
  double F = 0.0;  // |v|^2
  double G = 0.0;  // u
  double H = 0.0;  // 4G / (4F + G^2)
  double k = 0.0;  // conserved: F (5G^2 - 4F)^4

  Sp1State(const std::array<double, 3>& v_, double u_) : v(v_), u(u_) {
    if (!(u > 0.0)) throw DegenerateInput("Sp1State: u must be positive");
    for (double c : v)
      if (!std::isfinite(c)) throw std::invalid_argument("Sp1State: non-finite component");
    F = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    G = u;
    H = 4.0 * G / (4.0 * F + G * G);
    const double s = 5.0 * G * G - 4.0 * F;
    k = F * s * s * s * s;
  }
};

struct Sp1Derivative {
  std::array<double, 3> dv{0.0, 0.0, 0.0};
  double du = 0.0;
};

namespace detail {

// Unvalidated right-hand side (used on integrator stage values).
inline Sp1Derivative sp1_rhs_raw(const std::array<double, 3>& v, double u) {
  const double F = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  const double denom = 4.0 * F + u * u;
  Sp1Derivative d;
  d.du = (4.0 * F - u * u) / denom;
  const double H = 4.0 * u / denom;
  for (int i = 0; i < 3; ++i) d.dv[i] = H * v[i];
  return d;
}

}  // namespace detail

// du/dt = (4F - G^2)/(4F + G^2)  (the plus branch; the minus branch is the
// time reversal t -> -t), dv_i/dt = H v_i.
inline Sp1Derivative sp1_rhs(const Sp1State& s) {
  if (!(s.u > 0.0)) throw DegenerateInput("sp1_rhs: u must be positive");
  return detail::sp1_rhs_raw(s.v, s.u);
}

struct Trajectory {
  std::vector<std::pair<double, Sp1State>> states;  // strictly increasing t
  double step = 0.0;
  // Telemetry over all accepted states (each >= 0):
  double conserved_drift = 0.0;   // max |k(t)/k(0) - 1|, absolute when k(0) ~ 0
  double arc_length_drift = 0.0;  // max | |d(state)/dt| - 1 |
  double direction_drift = 0.0;   // max |v_i v_j(0) - v_j v_i(0)| / |v(0)|^2
  bool conical = false;           // stopped at u <= 1e-8 (cone apex)
};

// Classical fixed-step 4th-order integration of the (v, u) flow.
inline Trajectory sp1_integrate(const Sp1State& initial, double t_end, double h = 1e-3) {
  if (!(h > 0.0)) throw std::invalid_argument("sp1_integrate: step size must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("sp1_integrate: end time must be positive");

  Trajectory traj;
  traj.step = h;
  const double k0 = initial.k;
  const double k_scale = initial.F * std::pow(5.0 * initial.G * initial.G + 4.0 * initial.F, 4);
  const bool absolute_drift = std::fabs(k0) <= 1e-14 * std::max(1.0, k_scale);
  const std::array<double, 3> v0 = initial.v;
  const double v0n2 = v0[0] * v0[0] + v0[1] * v0[1] + v0[2] * v0[2];

  auto record = [&](double t, const Sp1State& s) {
    traj.states.emplace_back(t, s);
    const double dk = absolute_drift ? std::fabs(s.k - k0) : std::fabs(s.k / k0 - 1.0);
    traj.conserved_drift = std::max(traj.conserved_drift, dk);
    const Sp1Derivative d = detail::sp1_rhs_raw(s.v, s.u);
    const double speed = std::sqrt(d.dv[0] * d.dv[0] + d.dv[1] * d.dv[1] + d.dv[2] * d.dv[2] + d.du * d.du);
    traj.arc_length_drift = std::max(traj.arc_length_drift, std::fabs(speed - 1.0));
    if (v0n2 > 0.0) {
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          traj.direction_drift =
              std::max(traj.direction_drift, std::fabs(s.v[i] * v0[j] - s.v[j] * v0[i]) / v0n2);
    }
  };

  record(0.0, initial);
  if (initial.u <= 1e-8) {
    traj.conical = true;
    return traj;
  }

  std::array<double, 3> v = initial.v;
  double u = initial.u;
  const long long steps = std::max(1LL, std::llround(t_end / h));
  for (long long s = 0; s < steps; ++s) {
    const Sp1Derivative k1 = detail::sp1_rhs_raw(v, u);
    std::array<double, 3> v2{v[0] + 0.5 * h * k1.dv[0], v[1] + 0.5 * h * k1.dv[1], v[2] + 0.5 * h * k1.dv[2]};
    const Sp1Derivative k2 = detail::sp1_rhs_raw(v2, u + 0.5 * h * k1.du);
    std::array<double, 3> v3{v[0] + 0.5 * h * k2.dv[0], v[1] + 0.5 * h * k2.dv[1], v[2] + 0.5 * h * k2.dv[2]};
    const Sp1Derivative k3 = detail::sp1_rhs_raw(v3, u + 0.5 * h * k2.du);
    std::array<double, 3> v4{v[0] + h * k3.dv[0], v[1] + h * k3.dv[1], v[2] + h * k3.dv[2]};
    const Sp1Derivative k4 = detail::sp1_rhs_raw(v4, u + h * k3.du);

    for (int i = 0; i < 3; ++i)
      v[i] += h / 6.0 * (k1.dv[i] + 2.0 * k2.dv[i] + 2.0 * k3.dv[i] + k4.dv[i]);
    u += h / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);

    if (u <= 1e-8) {  // cone apex reached: stop and mark
      traj.conical = true;
      if (u > 0.0) record(static_cast<double>(s + 1) * h, Sp1State(v, u));
      break;
    }
    record(static_cast<double>(s + 1) * h, Sp1State(v, u));
  }
  return traj;
}

// Embed an Sp(1) profile state as a curve jet in R^7 (Im H + eH layout:
// u on the e-real slot 1, v on the Im H slots 2, 4, 6), with the flow
// right-hand side as the derivative.
inline CurveJet1 sp1_state_jet(double t, const Sp1State& s) {
  const Sp1Derivative d = sp1_rhs(s);
  RealVector value(7), deriv(7);
  value[0] = s.u;
  value[1] = s.v[0];
  value[3] = s.v[1];
  value[5] = s.v[2];
  deriv[0] = d.du;
  deriv[1] = d.dv[0];
  deriv[3] = d.dv[1];
  deriv[5] = d.dv[2];
  return {t, value, deriv};
}

// The cone curve alpha(u) = u * (c_vec, e) for |c_vec|^2 = 5/4, sampled at
// the given positive u values; jets are parametrized by u itself.
inline std::vector<CurveJet1> sp1_cone(const std::array<double, 3>& c_vec,
                                       const std::vector<double>& u_samples) {
  const double n2 = c_vec[0] * c_vec[0] + c_vec[1] * c_vec[1] + c_vec[2] * c_vec[2];
  if (std::fabs(n2 - 1.25) > 1e-12) throw std::invalid_argument("sp1_cone: |c_vec|^2 must equal 5/4");
  if (u_samples.empty()) throw std::invalid_argument("sp1_cone: need at least one sample");

  std::vector<CurveJet1> out;
  out.reserve(u_samples.size());
  RealVector deriv(7);
  deriv[0] = 1.0;
  deriv[1] = c_vec[0];
  deriv[3] = c_vec[1];
  deriv[5] = c_vec[2];
  for (double u : u_samples) {
    if (!(u > 0.0)) throw DegenerateInput("sp1_cone: u samples must be positive (apex excluded)");
    RealVector value(7);
    value[0] = u;
    value[1] = u * c_vec[0];
    value[3] = u * c_vec[1];
    value[5] = u * c_vec[2];
    out.emplace_back(u, value, deriv);
  }
  return out;
}

// ---------------------------------------------------------------------------
// T^2 coassociative residuals on surface jets in R^7.
//
// The four values are the evaluations of the coassociative residual system
// on the lifted orbit frame (independent of the torus angles):
//   phi_123 = -d/ds Re(w1 w2 w3)
//   phi_124 = -d/dt Re(w1 w2 w3)
//   phi_134 = 1/2 A1 + B1,   phi_234 = 1/2 A2 + B2,
// where A1 pairs the alpha_1 gradient against the gradient of
// |w1|^2 - |w3|^2 (A2: |w2|^2 - |w3|^2) and B1, B2 collect the imaginary
// cross terms of the coordinate derivatives.
// ---------------------------------------------------------------------------
inline ResidualVector t2_coassoc_residuals(const SurfaceJet1& jet) {
  if (jet.value.dim() != 7) throw std::invalid_argument("t2_coassoc_residuals: expected dimension 7");
  const std::complex<double> w1{jet.value[1], jet.value[2]}, w2{jet.value[3], jet.value[4]},
      w3{jet.value[5], jet.value[6]};
  const std::complex<double> w1s{jet.d_s[1], jet.d_s[2]}, w2s{jet.d_s[3], jet.d_s[4]}, w3s{jet.d_s[5], jet.d_s[6]};
  const std::complex<double> w1t{jet.d_t[1], jet.d_t[2]}, w2t{jet.d_t[3], jet.d_t[4]}, w3t{jet.d_t[5], jet.d_t[6]};
  const double a1s = jet.d_s[0], a1t = jet.d_t[0];

  auto dnorm = [](const std::complex<double>& z, const std::complex<double>& dz) {
    return 2.0 * (z.real() * dz.real() + z.imag() * dz.imag());
  };
  const double r_s = (w1s * w2 * w3 + w1 * w2s * w3 + w1 * w2 * w3s).real();
  const double r_t = (w1t * w2 * w3 + w1 * w2t * w3 + w1 * w2 * w3t).real();
  const double A1 = a1s * (dnorm(w1, w1t) - dnorm(w3, w3t)) - a1t * (dnorm(w1, w1s) - dnorm(w3, w3s));
  const double A2 = a1s * (dnorm(w2, w2t) - dnorm(w3, w3t)) - a1t * (dnorm(w2, w2s) - dnorm(w3, w3s));
  const double B1 = -(w1 * (w2s * w3t - w2t * w3s) + w3 * (w1t * w2s - w1s * w2t)).imag();
  const double B2 = -(w2 * (w1t * w3s - w1s * w3t) + w3 * (w1t * w2s - w1s * w2t)).imag();

  ResidualVector out;
  out.push("phi_123", -r_s);
  out.push("phi_124", -r_t);
  out.push("phi_134", 0.5 * A1 + B1);
  out.push("phi_234", 0.5 * A2 + B2);
  return out;
}

// ---------------------------------------------------------------------------
// Pointwise-linear ansatz for T^2 coassociatives.
//
// Real inputs a2, a4, a7 on an (s, t) grid with constant c determine
// a6 = c/(a2 a4) and a pointwise 2x2 linear system for the alpha_1 gradient.
// With P = a2^2 - a6^2 - a7^2 and Q = a4^2 - a6^2 - a7^2 the rows are
//   dP_t * a1_s - dP_s * a1_t = 2 (a4_s d(a2 a7)_t - a4_t d(a2 a7)_s)
//   dQ_t * a1_s - dQ_s * a1_t = 2 (a2_t d(a4 a7)_s - a2_s d(a4 a7)_t).
// ---------------------------------------------------------------------------

struct AnsatzSystem {
  double m00 = 0.0, m01 = 0.0, m10 = 0.0, m11 = 0.0;  // row-major 2x2 matrix
  double r0 = 0.0, r1 = 0.0;                          // right-hand side
};

inline AnsatzSystem ansatz_system(double a2, double a4, double a7, const std::array<double, 2>& g2,
                                  const std::array<double, 2>& g4, const std::array<double, 2>& g7,
                                  double c) {
  if (a2 * a4 == 0.0) throw DegenerateInput("ansatz_system: a2 * a4 must be nonzero");
  const double prod = a2 * a4;
  const double a6 = c / prod;
  const std::array<double, 2> g6{-c * (g2[0] * a4 + a2 * g4[0]) / (prod * prod),
                                 -c * (g2[1] * a4 + a2 * g4[1]) / (prod * prod)};
  const std::array<double, 2> dP{2.0 * a2 * g2[0] - 2.0 * a6 * g6[0] - 2.0 * a7 * g7[0],
                                 2.0 * a2 * g2[1] - 2.0 * a6 * g6[1] - 2.0 * a7 * g7[1]};
  const std::array<double, 2> dQ{2.0 * a4 * g4[0] - 2.0 * a6 * g6[0] - 2.0 * a7 * g7[0],
                                 2.0 * a4 * g4[1] - 2.0 * a6 * g6[1] - 2.0 * a7 * g7[1]};
  const std::array<double, 2> d27{g2[0] * a7 + a2 * g7[0], g2[1] * a7 + a2 * g7[1]};
  const std::array<double, 2> d47{g4[0] * a7 + a4 * g7[0], g4[1] * a7 + a4 * g7[1]};

  AnsatzSystem sys;
  sys.m00 = dP[1];
  sys.m01 = -dP[0];
  sys.m10 = dQ[1];
  sys.m11 = -dQ[0];
  sys.r0 = 2.0 * (g4[0] * d27[1] - g4[1] * d27[0]);
  sys.r1 = 2.0 * (g2[1] * d47[0] - g2[0] * d47[1]);
  return sys;
}

struct AnsatzGrid {
  int rows = 0;  // number of s-samples
  int cols = 0;  // number of t-samples
  double h = 0.0;
  double c = 0.0;
  // Row-major node arrays: index = is * cols + it.
  std::vector<double> a2, a4, a7;          // inputs
  std::vector<double> a1_s, a1_t, a1, a6;  // outputs
  std::vector<std::array<int, 2>> singular_nodes;
  double curl_residual = 0.0;
  double curl_tolerance = 0.0;
  bool a1_valid = false;
};

namespace detail {

// Order-2 grid derivative along one axis: central interior, one-sided at the
// boundary rows/columns.
inline double stencil_derivative(const std::vector<double>& f, int idx, int i, int count, int stride, double h) {
  if (i == 0) return (-3.0 * f[idx] + 4.0 * f[idx + stride] - f[idx + 2 * stride]) / (2.0 * h);
  if (i == count - 1) return (3.0 * f[idx] - 4.0 * f[idx - stride] + f[idx - 2 * stride]) / (2.0 * h);
  return (f[idx + stride] - f[idx - stride]) / (2.0 * h);
}

inline void grid_gradient(const std::vector<double>& f, int rows, int cols, double h,
                          std::vector<double>& fs, std::vector<double>& ft) {
  fs.assign(f.size(), 0.0);
  ft.assign(f.size(), 0.0);
  for (int is = 0; is < rows; ++is)
    for (int it = 0; it < cols; ++it) {
      const int idx = is * cols + it;
      fs[idx] = stencil_derivative(f, idx, is, rows, cols, h);
      ft[idx] = stencil_derivative(f, idx, it, cols, 1, h);
    }
}

}  // namespace detail

// Trapezoidal path integration of a gradient field from the origin node,
// first along the s-axis at t-index 0, then along t.  Exact for gradients
// that are linear along the integration legs.
inline std::vector<double> integrate_gradient(int rows, int cols, double h, const std::vector<double>& gs,
                                              const std::vector<double>& gt) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("integrate_gradient: need at least a 2x2 grid");
  if (!(h > 0.0)) throw std::invalid_argument("integrate_gradient: spacing must be positive");
  const std::size_t count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (gs.size() != count || gt.size() != count)
    throw std::invalid_argument("integrate_gradient: field size mismatch");

  std::vector<double> f(count, 0.0);
  for (int is = 1; is < rows; ++is)
    f[is * cols] = f[(is - 1) * cols] + 0.5 * h * (gs[(is - 1) * cols] + gs[is * cols]);
  for (int is = 0; is < rows; ++is)
    for (int it = 1; it < cols; ++it)
      f[is * cols + it] = f[is * cols + it - 1] + 0.5 * h * (gt[is * cols + it - 1] + gt[is * cols + it]);
  return f;
}

// Solve the ansatz on a grid: fills a6 and the alpha_1 gradient, flags
// singular nodes (solved by the minimum-norm pseudoinverse), records the
// integrability (curl) residual, and integrates alpha_1 from the origin node
// when the field is closed within tolerance.  A negative curl_tol selects
// the default 1e-6 * (1 + max gradient magnitude).
inline AnsatzGrid t2_coassoc_ansatz(const AnsatzGrid& input, double curl_tol = -1.0) {
  if (input.rows < 3 || input.cols < 3)
    throw std::invalid_argument("t2_coassoc_ansatz: need at least a 3x3 grid for order-2 stencils");
  if (!(input.h > 0.0)) throw std::invalid_argument("t2_coassoc_ansatz: spacing must be positive");
  const std::size_t count = static_cast<std::size_t>(input.rows) * static_cast<std::size_t>(input.cols);
  if (input.a2.size() != count || input.a4.size() != count || input.a7.size() != count)
    throw std::invalid_argument("t2_coassoc_ansatz: input array size mismatch");
  for (std::size_t i = 0; i < count; ++i)
    if (input.a2[i] * input.a4[i] == 0.0)
      throw DegenerateInput("t2_coassoc_ansatz: a2 * a4 vanishes on the grid");

  AnsatzGrid g = input;
  g.singular_nodes.clear();
  g.a6.assign(count, 0.0);
  g.a1_s.assign(count, 0.0);
  g.a1_t.assign(count, 0.0);
  g.a1.clear();
  g.a1_valid = false;

  for (std::size_t i = 0; i < count; ++i) g.a6[i] = g.c / (g.a2[i] * g.a4[i]);

  std::vector<double> g2s, g2t, g4s, g4t, g7s, g7t;
  detail::grid_gradient(g.a2, g.rows, g.cols, g.h, g2s, g2t);
  detail::grid_gradient(g.a4, g.rows, g.cols, g.h, g4s, g4t);
  detail::grid_gradient(g.a7, g.rows, g.cols, g.h, g7s, g7t);

  for (int is = 0; is < g.rows; ++is)
    for (int it = 0; it < g.cols; ++it) {
      const int idx = is * g.cols + it;
      const AnsatzSystem sys =
          ansatz_system(g.a2[idx], g.a4[idx], g.a7[idx], {g2s[idx], g2t[idx]}, {g4s[idx], g4t[idx]},
                        {g7s[idx], g7t[idx]}, g.c);
      Eigen::Matrix2d M;
      M << sys.m00, sys.m01, sys.m10, sys.m11;
      const Eigen::Vector2d rhs(sys.r0, sys.r1);
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::Vector2d sv = svd.singularValues();
      const double thresh = 1e-10 * std::max(1.0, sv(0));
      Eigen::Vector2d sol = Eigen::Vector2d::Zero();
      if (sv(1) <= thresh) {
        g.singular_nodes.push_back({is, it});
        // Minimum-norm solution on the nondegenerate singular directions.
        for (int d = 0; d < 2; ++d)
          if (sv(d) > thresh) sol += (svd.matrixU().col(d).dot(rhs) / sv(d)) * svd.matrixV().col(d);
      } else {
        sol = svd.solve(rhs);
      }
      g.a1_s[idx] = sol(0);
      g.a1_t[idx] = sol(1);
    }

  // Integrability: curl = d/dt (a1_s) - d/ds (a1_t) with the same stencils.
  std::vector<double> gss, gst, gts, gtt;
  detail::grid_gradient(g.a1_s, g.rows, g.cols, g.h, gss, gst);
  detail::grid_gradient(g.a1_t, g.rows, g.cols, g.h, gts, gtt);
  double curl = 0.0, magnitude = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    curl = std::max(curl, std::fabs(gst[i] - gts[i]));
    magnitude = std::max(magnitude, std::max(std::fabs(g.a1_s[i]), std::fabs(g.a1_t[i])));
  }
  g.curl_residual = curl;
  g.curl_tolerance = (curl_tol < 0.0) ? 1e-6 * (1.0 + magnitude) : curl_tol;

  if (g.curl_residual <= g.curl_tolerance) {
    g.a1 = integrate_gradient(g.rows, g.cols, g.h, g.a1_s, g.a1_t);
    g.a1_valid = true;
  }
  return g;
}

// Assemble the surface jet at a grid node (s, t coordinates supplied by the
// caller), using the solved gradient and the same order-2 stencils as the
// solver; alpha_1 takes the integrated value when available, else 0.
inline SurfaceJet1 ansatz_node_jet(const AnsatzGrid& g, int is, int it, double s, double t) {
  if (is < 0 || is >= g.rows || it < 0 || it >= g.cols)
    throw std::invalid_argument("ansatz_node_jet: node out of range");
  const std::size_t count = static_cast<std::size_t>(g.rows) * static_cast<std::size_t>(g.cols);
  if (g.a1_s.size() != count || g.a6.size() != count)
    throw std::invalid_argument("ansatz_node_jet: grid has no solved outputs");
  const int idx = is * g.cols + it;

  auto deriv_of = [&](const std::vector<double>& f, bool along_s) {
    return along_s ? detail::stencil_derivative(f, idx, is, g.rows, g.cols, g.h)
                   : detail::stencil_derivative(f, idx, it, g.cols, 1, g.h);
  };

  RealVector value(7), ds(7), dt(7);
  value[0] = g.a1_valid ? g.a1[idx] : 0.0;
  value[1] = g.a2[idx];
  value[3] = g.a4[idx];
  value[5] = g.a6[idx];
  value[6] = g.a7[idx];
  ds[0] = g.a1_s[idx];
  ds[1] = deriv_of(g.a2, true);
  ds[3] = deriv_of(g.a4, true);
  ds[6] = deriv_of(g.a7, true);
  dt[0] = g.a1_t[idx];
  dt[1] = deriv_of(g.a2, false);
  dt[3] = deriv_of(g.a4, false);
  dt[6] = deriv_of(g.a7, false);
  // a6 derivatives by the chain rule on a6 = c/(a2 a4), matching the values
  // the pointwise system was built with.
  const double prod = g.a2[idx] * g.a4[idx];
  ds[5] = -g.c * (ds[1] * g.a4[idx] + g.a2[idx] * ds[3]) / (prod * prod);
  dt[5] = -g.c * (dt[1] * g.a4[idx] + g.a2[idx] * dt[3]) / (prod * prod);
  return {s, t, value, ds, dt};
}

}  // namespace calibron::solvers

#endif  // CALIBRON_SOLVERS_HPP
