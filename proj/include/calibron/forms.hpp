#ifndef CALIBRON_FORMS_HPP
#define CALIBRON_FORMS_HPP

// The standard calibration forms on R^7 / R^8 / C^m and residual evaluators
// for the four calibrated-plane types: special Lagrangian, associative,
// coassociative, Cayley.
//
// Coordinate conventions, fixed once for the whole library:
//   * C^m = R^{2m} interleaved: z_j = x_{2j-1} + i x_{2j}.
//   * R^7: x_1 real, z_1 = x_2 + i x_3, z_2 = x_4 + i x_5, z_3 = x_6 + i x_7.
//   * Orientation e_1 ^ ... ^ e_n positive.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "calibron/exterior.hpp"
#include "calibron/rng.hpp"

namespace calibron::forms {

using exterior::KForm;
using exterior::MultiIndex;
using exterior::RealVector;

// Raised when an operation that needs a nondegenerate input meets one that
// the underlying constructions exclude (zero coordinates, collapsed frames).
struct DegenerateInput : std::runtime_error {
  explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Calibration kinds
// ---------------------------------------------------------------------------
struct SpecialLagrangian {
  int m;               // complex dimension, 2..4
  double theta = 0.0;  // phase in [0, 2pi)
};
struct Associative {};
struct Coassociative {};
struct Cayley {};

using CalibrationKind = std::variant<SpecialLagrangian, Associative, Coassociative, Cayley>;

inline void validate(const SpecialLagrangian& sl) {
  if (sl.m < 2 || sl.m > 4) throw std::invalid_argument("SpecialLagrangian: m must be in [2,4]");
}

// ---------------------------------------------------------------------------
// Frame: an ordered tuple of tangent vectors with a common ambient dimension.
// ---------------------------------------------------------------------------
struct Frame {
  std::vector<RealVector> vectors;

  Frame() = default;
  explicit Frame(std::vector<RealVector> vs) : vectors(std::move(vs)) {
    if (vectors.empty()) throw std::invalid_argument("Frame: empty");
    const int d = vectors[0].dim();
    for (const auto& v : vectors)
      if (v.dim() != d) throw std::invalid_argument("Frame: mixed dimensions");
    if (static_cast<int>(vectors.size()) > d)
      throw std::invalid_argument("Frame: more vectors than ambient dimensions");
  }

  int dim() const { return vectors.empty() ? 0 : vectors[0].dim(); }
  int count() const { return static_cast<int>(vectors.size()); }
};

// ---------------------------------------------------------------------------
// ResidualVector: labeled residual values of one equation system.
// ---------------------------------------------------------------------------
struct ResidualVector {
  std::vector<std::string> labels;
  std::vector<double> values;

  void push(std::string label, double value) {
    labels.push_back(std::move(label));
    values.push_back(value);
  }
  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
  }
};

// ---------------------------------------------------------------------------
// Coordinate conventions
// ---------------------------------------------------------------------------
struct ComplexSlots {
  int re;  // 1-based real-part slot
  int im;  // 1-based imaginary-part slot
};

// Interleaved C^m convention: z_j lives on slots (2j-1, 2j).
inline std::vector<ComplexSlots> complex_coordinate_convention(int m) {
  if (m < 1 || m > 4) throw std::invalid_argument("complex_coordinate_convention: m must be in [1,4]");
  std::vector<ComplexSlots> map;
  map.reserve(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) map.push_back({2 * j - 1, 2 * j});
  return map;
}

// Inverse of the interleaved convention: which complex coordinate and part a
// real slot belongs to.
struct SlotRef {
  int coord;  // 1-based complex coordinate
  bool imag;  // true if the slot is the imaginary part
};
inline SlotRef complex_slot_inverse(int m, int slot) {
  if (slot < 1 || slot > 2 * m) throw std::invalid_argument("complex_slot_inverse: slot out of range");
  return {(slot + 1) / 2, slot % 2 == 0};
}

// R^7 convention: slot 1 real, z_k on slots (2k, 2k+1) for k = 1..3.
inline int g2_real_slot() { return 1; }
inline ComplexSlots g2_complex_slots(int k) {
  if (k < 1 || k > 3) throw std::invalid_argument("g2_complex_slots: k must be in [1,3]");
  return {2 * k, 2 * k + 1};
}

inline std::complex<double> read_complex(const RealVector& v, ComplexSlots s) {
  return {v[s.re - 1], v[s.im - 1]};
}

// ---------------------------------------------------------------------------
// Model forms
// ---------------------------------------------------------------------------

// omega = sum_j dx_{2j-1} ^ dx_{2j} on R^{2m}.
inline KForm symplectic_form(int m) {
  if (m < 2 || m > 4) throw std::invalid_argument("symplectic_form: m must be in [2,4]");
  KForm w(2 * m, 2);
  for (int j = 1; j <= m; ++j) w.set_term(MultiIndex{2 * j - 1, 2 * j}, 1.0);
  return w;
}

namespace detail {

// Expand e^{-i theta} dz_1 ^ ... ^ dz_m into real and imaginary KForms.
inline std::pair<KForm, KForm> holo_volume(int m, double theta) {
  if (m < 2 || m > 4) throw std::invalid_argument("holo_volume: m must be in [2,4]");
  const int n = 2 * m;
  KForm re(n, 0), im(n, 0);
  re.set_term(MultiIndex{}, std::cos(theta));
  im.set_term(MultiIndex{}, -std::sin(theta));
  for (int j = 1; j <= m; ++j) {
    const KForm dx = KForm::basis(n, MultiIndex{2 * j - 1});
    const KForm dy = KForm::basis(n, MultiIndex{2 * j});
    KForm new_re = wedge(re, dx) - wedge(im, dy);
    KForm new_im = wedge(re, dy) + wedge(im, dx);
    re = std::move(new_re);
    im = std::move(new_im);
  }
  return {re, im};
}

}  // namespace detail

inline KForm holo_volume_real(int m, double theta = 0.0) { return detail::holo_volume(m, theta).first; }
inline KForm holo_volume_imag(int m, double theta = 0.0) { return detail::holo_volume(m, theta).second; }

// The associative 3-form phi on R^7.
inline KForm g2_three_form() {
  KForm phi(7, 3);
  phi.set_term(MultiIndex{1, 2, 3}, 1.0);
  phi.set_term(MultiIndex{1, 4, 5}, 1.0);
  phi.set_term(MultiIndex{1, 6, 7}, 1.0);
  phi.set_term(MultiIndex{2, 4, 6}, 1.0);
  phi.set_term(MultiIndex{2, 5, 7}, -1.0);
  phi.set_term(MultiIndex{3, 4, 7}, -1.0);
  phi.set_term(MultiIndex{3, 5, 6}, -1.0);
  return phi;
}

// The coassociative 4-form psi = *phi on R^7.
inline KForm g2_four_form() {
  KForm psi(7, 4);
  psi.set_term(MultiIndex{4, 5, 6, 7}, 1.0);
  psi.set_term(MultiIndex{2, 3, 6, 7}, 1.0);
  psi.set_term(MultiIndex{2, 3, 4, 5}, 1.0);
  psi.set_term(MultiIndex{1, 3, 5, 7}, 1.0);
  psi.set_term(MultiIndex{1, 3, 4, 6}, -1.0);
  psi.set_term(MultiIndex{1, 2, 5, 6}, -1.0);
  psi.set_term(MultiIndex{1, 2, 4, 7}, -1.0);
  return psi;
}

// The Cayley 4-form on R^8: slot 1 plays the distinguished role, the
// remaining slots 2..8 carry the R^7 structure, so that
// cayley_form = e_1 ^ phi' + psi' with primes marking the index shift.
// Equivalently, under the interleaved C^4 convention,
// cayley_form = holo_volume_real(4) + (1/2) symplectic_form(4)^2.
inline KForm cayley_form() {
  KForm big(8, 4);
  big.set_term(MultiIndex{1, 2, 3, 4}, 1.0);
  big.set_term(MultiIndex{1, 2, 5, 6}, 1.0);
  big.set_term(MultiIndex{1, 2, 7, 8}, 1.0);
  big.set_term(MultiIndex{1, 3, 5, 7}, 1.0);
  big.set_term(MultiIndex{1, 3, 6, 8}, -1.0);
  big.set_term(MultiIndex{1, 4, 5, 8}, -1.0);
  big.set_term(MultiIndex{1, 4, 6, 7}, -1.0);
  big.set_term(MultiIndex{5, 6, 7, 8}, 1.0);
  big.set_term(MultiIndex{3, 4, 7, 8}, 1.0);
  big.set_term(MultiIndex{3, 4, 5, 6}, 1.0);
  big.set_term(MultiIndex{2, 4, 6, 8}, 1.0);
  big.set_term(MultiIndex{2, 4, 5, 7}, -1.0);
  big.set_term(MultiIndex{2, 3, 6, 7}, -1.0);
  big.set_term(MultiIndex{2, 3, 5, 8}, -1.0);
  return big;
}

// ---------------------------------------------------------------------------
// Residual evaluators
// ---------------------------------------------------------------------------

// The vector-valued 4-form contraction: component i = psi(V1, V2, V3, e_i).
inline RealVector vector_psi(const RealVector& v1, const RealVector& v2, const RealVector& v3) {
  if (v1.dim() != 7 || v2.dim() != 7 || v3.dim() != 7)
    throw std::invalid_argument("vector_psi: vectors must live in R^7");
  const KForm psi = g2_four_form();
  const KForm one_form = interior_product(v3, interior_product(v2, interior_product(v1, psi)));
  RealVector out(7);
  for (int i = 1; i <= 7; ++i) out[i - 1] = one_form.coefficient(MultiIndex{static_cast<int>(i)});
  return out;
}

namespace detail {

inline void require_frame(const Frame& f, int count, int dim, const char* who) {
  if (f.count() != count || f.dim() != dim)
    throw std::invalid_argument(std::string(who) + ": frame arity/dimension mismatch");
}

inline std::string index_pair_label(const char* stem, int i, int j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%d%d", stem, i, j);
  return buf;
}

}  // namespace detail

// Residual system for each plane type.  Raw form values, not volume-divided;
// the pass test in is_calibrated scales its tolerance instead.
inline ResidualVector calibration_residuals(const CalibrationKind& kind, const Frame& frame) {
  ResidualVector out;
  if (const auto* sl = std::get_if<SpecialLagrangian>(&kind)) {
    validate(*sl);
    detail::require_frame(frame, sl->m, 2 * sl->m, "calibration_residuals(SL)");
    const KForm w = symplectic_form(sl->m);
    for (int i = 0; i < sl->m; ++i)
      for (int j = i + 1; j < sl->m; ++j)
        out.push(detail::index_pair_label("omega", i + 1, j + 1),
                 evaluate(w, {frame.vectors[static_cast<std::size_t>(i)], frame.vectors[static_cast<std::size_t>(j)]}));
    out.push("im_omega", evaluate(holo_volume_imag(sl->m, sl->theta), frame.vectors));
  } else if (std::holds_alternative<Associative>(kind)) {
    detail::require_frame(frame, 3, 7, "calibration_residuals(Associative)");
    const RealVector psi_vec = vector_psi(frame.vectors[0], frame.vectors[1], frame.vectors[2]);
    for (int i = 1; i <= 7; ++i) out.push("psi_" + std::to_string(i), psi_vec[i - 1]);
  } else if (std::holds_alternative<Coassociative>(kind)) {
    detail::require_frame(frame, 4, 7, "calibration_residuals(Coassociative)");
    const KForm phi = g2_three_form();
    const int subsets[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (const auto& s : subsets) {
      char label[40];
      std::snprintf(label, sizeof label, "phi_%d%d%d", s[0] + 1, s[1] + 1, s[2] + 1);
      out.push(label, evaluate(phi, {frame.vectors[static_cast<std::size_t>(s[0])], frame.vectors[static_cast<std::size_t>(s[1])],
                                     frame.vectors[static_cast<std::size_t>(s[2])]}));
    }
  } else {
    detail::require_frame(frame, 4, 8, "calibration_residuals(Cayley)");
    out.push("cayley_defect", evaluate(cayley_form(), frame.vectors) - gram_volume(frame.vectors));
    // The six pair values omega(V_i, V_j) under the C^4 convention.  They are
    // the factors in the expansion of (omega^omega)(V_1..V_4), and they vanish
    // exactly on Cayley planes of Lagrangian type — the kind the torus
    // constructions produce.  (A complex 2-plane is Cayley too, but carries
    // nonzero pair values and is out of scope for this residual system.)
    const KForm w = symplectic_form(4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        out.push(detail::index_pair_label("omega", i + 1, j + 1),
                 evaluate(w, {frame.vectors[static_cast<std::size_t>(i)], frame.vectors[static_cast<std::size_t>(j)]}));
  }
  return out;
}

// The calibration form whose restriction must equal the volume form.
inline KForm calibration_form(const CalibrationKind& kind) {
  if (const auto* sl = std::get_if<SpecialLagrangian>(&kind)) {
    validate(*sl);
    return holo_volume_real(sl->m, sl->theta);
  }
  if (std::holds_alternative<Associative>(kind)) return g2_three_form();
  if (std::holds_alternative<Coassociative>(kind)) return g2_four_form();
  return cayley_form();
}

// Outcome of the calibrated-plane test.  A frame can pass with either
// orientation; `orientation` reports the sign of the form value.
struct CalibrationCheck {
  bool calibrated = false;
  bool degenerate = false;
  int orientation = 0;
  double value = 0.0;
  double volume = 0.0;
  double max_residual = 0.0;
};

inline CalibrationCheck is_calibrated(const CalibrationKind& kind, const Frame& frame, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("is_calibrated: tol must be positive");
  CalibrationCheck check;
  check.volume = gram_volume(frame.vectors);
  if (check.volume < tol) {
    check.degenerate = true;
    return check;
  }
  const ResidualVector res = calibration_residuals(kind, frame);
  check.value = evaluate(calibration_form(kind), frame.vectors);
  check.orientation = check.value >= 0.0 ? +1 : -1;
  const double scale = tol * std::max(1.0, check.volume);
  // The Cayley defect entry is orientation-sensitive (value - volume); fold
  // the allowed orientation flip into the pass test.
  double max_res = 0.0;
  for (std::size_t i = 0; i < res.values.size(); ++i) {
    double r = std::fabs(res.values[i]);
    if (res.labels[i] == "cayley_defect") r = std::fabs(std::fabs(check.value) - check.volume);
    max_res = std::max(max_res, r);
  }
  check.max_residual = max_res;
  const bool value_matches = std::fabs(std::fabs(check.value) - check.volume) <= scale;
  check.calibrated = max_res <= scale && value_matches;
  return check;
}

// Max |f| over `samples` random orthonormal degree-frames (Gaussian matrix +
// modified Gram-Schmidt) plus every coordinate plane of matching degree.
inline double comass_estimate(const KForm& f, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("comass_estimate: samples must be >= 1");
  const int n = f.dim();
  const int k = f.degree();
  if (k < 1 || k > n) throw std::invalid_argument("comass_estimate: degree out of range");
  double best = 0.0;
  // Model planes: all coordinate k-planes (includes the calibrated ones).
  for (std::uint16_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    std::vector<RealVector> frame;
    for (int i : MultiIndex::from_mask(mask).indices()) frame.push_back(RealVector::unit(n, i));
    best = std::max(best, std::fabs(evaluate(f, frame)));
  }
  SplitRng rng(seed);
  std::vector<RealVector> frame;
  for (int s = 0; s < samples; ++s) {
    frame.clear();
    for (int j = 0; j < k; ++j) {
      RealVector v = rng.gaussian_vector(n);
      for (const auto& prev : frame) v -= v.dot(prev) * prev;
      const double norm = v.norm();
      if (norm < 1e-8) {
        // Degenerate draw; re-sample this column.
        --j;
        continue;
      }
      v *= 1.0 / norm;
      frame.push_back(v);
    }
    best = std::max(best, std::fabs(evaluate(f, frame)));
  }
  return best;
}

}  // namespace calibron::forms

#endif  // CALIBRON_FORMS_HPP
