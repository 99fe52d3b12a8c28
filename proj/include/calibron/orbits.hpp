#ifndef CALIBRON_ORBITS_HPP
#define CALIBRON_ORBITS_HPP

// The five group-orbit maps with their analytic tangent frames, a
// finite-difference frame oracle, and a numerical immersion check.
//
// Constructions and ambient dimensions:
//   TorusSL{n}    diag(e^{i th_1},...,e^{i th_n}), sum th = 0, on C^n = R^{2n}
//   DiagonalSO{n} (u, v) -> (|u| p, |v| p), p in S^{n-1},   on R^n + R^n
//   TorusG2      z_k -> e^{i th_k} z_k on the three z-slots of R^7, sum th = 0
//   TorusSpin7   w_k -> e^{i th_k} w_k on the four w-slots of R^8, sum th = 0
//   Sp1          (x, y) -> (p x pbar, p y) on R^7 = Im H + H, |p| = 1
//
// Callers pass free angles only; the last angle is eliminated internally, so
// the trace-zero constraint cannot be violated.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "calibron/exterior.hpp"
#include "calibron/forms.hpp"
#include "calibron/hypercomplex.hpp"

namespace calibron::orbits {

using exterior::RealVector;
using forms::DegenerateInput;
using forms::Frame;

// ---------------------------------------------------------------------------
// Jets
// ---------------------------------------------------------------------------
struct CurveJet1 {
  double t;
  RealVector value;
  RealVector deriv;

  CurveJet1(double t_, RealVector value_, RealVector deriv_)
      : t(t_), value(std::move(value_)), deriv(std::move(deriv_)) {
    if (value.dim() != deriv.dim()) throw std::invalid_argument("CurveJet1: value/deriv dimension mismatch");
  }
};

struct SurfaceJet1 {
  double s;
  double t;
  RealVector value;
  RealVector d_s;
  RealVector d_t;

  SurfaceJet1(double s_, double t_, RealVector value_, RealVector ds_, RealVector dt_)
      : s(s_), t(t_), value(std::move(value_)), d_s(std::move(ds_)), d_t(std::move(dt_)) {
    if (value.dim() != d_s.dim() || value.dim() != d_t.dim())
      throw std::invalid_argument("SurfaceJet1: dimension mismatch");
  }
};

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------
struct TorusSL {
  int n;                      // complex dimension, 2..4
  std::vector<double> theta;  // n-1 free angles; th_n = -(th_1 + ... + th_{n-1})
};
// Ambient layout for DiagonalSO follows the library's interleaved complex
// convention z_k = u_k + i v_k: the u-part lives on odd slots (1, 3, ...) and
// the v-part on even slots (2, 4, ...), for jets and orbit points alike.
struct DiagonalSO {
  int n;         // 2..4; ambient R^{2n}
  RealVector p;  // unit sphere point, dim n
};
struct TorusG2 {
  double theta1 = 0.0, theta2 = 0.0;  // th_3 = -th_1 - th_2
};
struct TorusSpin7 {
  double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0;  // th_4 = -(th_1+th_2+th_3)
};
struct Sp1 {
  hypercomplex::Quaternion p{1.0, 0.0, 0.0, 0.0};  // unit quaternion
};

using OrbitConstruction = std::variant<TorusSL, DiagonalSO, TorusG2, TorusSpin7, Sp1>;

inline void validate(const TorusSL& c) {
  if (c.n < 2 || c.n > 4) throw std::invalid_argument("TorusSL: n must be in [2,4]");
  if (static_cast<int>(c.theta.size()) != c.n - 1)
    throw std::invalid_argument("TorusSL: expected n-1 free angles");
  for (double a : c.theta)
    if (!std::isfinite(a)) throw std::invalid_argument("TorusSL: non-finite angle");
}
inline void validate(const DiagonalSO& c) {
  if (c.n < 2 || c.n > 4) throw std::invalid_argument("DiagonalSO: n must be in [2,4]");
  if (c.p.dim() != c.n) throw std::invalid_argument("DiagonalSO: sphere point dim must equal n");
  if (std::fabs(c.p.norm() - 1.0) > 1e-12) throw std::invalid_argument("DiagonalSO: sphere point must be unit");
}
inline void validate(const TorusG2& c) {
  if (!std::isfinite(c.theta1) || !std::isfinite(c.theta2)) throw std::invalid_argument("TorusG2: non-finite angle");
}
inline void validate(const TorusSpin7& c) {
  if (!std::isfinite(c.theta1) || !std::isfinite(c.theta2) || !std::isfinite(c.theta3))
    throw std::invalid_argument("TorusSpin7: non-finite angle");
}
inline void validate(const Sp1& c) {
  if (std::fabs(c.p.norm2() - 1.0) > 1e-12) throw std::invalid_argument("Sp1: p must be a unit quaternion");
}

inline int ambient_dim(const OrbitConstruction& c) {
  if (const auto* sl = std::get_if<TorusSL>(&c)) return 2 * sl->n;
  if (const auto* so = std::get_if<DiagonalSO>(&c)) return 2 * so->n;
  if (std::holds_alternative<TorusG2>(c)) return 7;
  if (std::holds_alternative<TorusSpin7>(c)) return 8;
  return 7;  // Sp1
}

namespace detail {

// Multiply the pair (v[re-1], v[im-1]) by e^{i a}.
inline void rotate_slots(RealVector& v, int re_slot, int im_slot, double a) {
  const double c = std::cos(a), s = std::sin(a);
  const double x = v[re_slot - 1], y = v[im_slot - 1];
  v[re_slot - 1] = c * x - s * y;
  v[im_slot - 1] = s * x + c * y;
}

// Multiply the pair by i (rotation by pi/2, exact).
inline void times_i_slots(RealVector& v, int re_slot, int im_slot) {
  const double x = v[re_slot - 1], y = v[im_slot - 1];
  v[re_slot - 1] = -y;
  v[im_slot - 1] = x;
}

inline void require_dim(const RealVector& v, int dim, const char* who) {
  if (v.dim() != dim) throw std::invalid_argument(std::string(who) + ": jet dimension mismatch");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Group element applied to an ambient point (the linear/isometric part of F).
// ---------------------------------------------------------------------------
inline RealVector apply_group_element(const OrbitConstruction& c, const RealVector& point) {
  RealVector out = point;
  if (const auto* sl = std::get_if<TorusSL>(&c)) {
    validate(*sl);
    detail::require_dim(point, 2 * sl->n, "apply_group_element(TorusSL)");
    double last = 0.0;
    for (int k = 1; k < sl->n; ++k) {
      const double a = sl->theta[static_cast<std::size_t>(k - 1)];
      detail::rotate_slots(out, 2 * k - 1, 2 * k, a);
      last -= a;
    }
    detail::rotate_slots(out, 2 * sl->n - 1, 2 * sl->n, last);
  } else if (const auto* so = std::get_if<DiagonalSO>(&c)) {
    validate(*so);
    detail::require_dim(point, 2 * so->n, "apply_group_element(DiagonalSO)");
    // The orbit sweep for this construction is not linear in the profile
    // point; see orbit_point.  The group element itself acts on R^n + R^n by
    // the same rotation in both blocks, but general rotations are not stored
    // in the construction (only the target sphere point p), so this operation
    // is intentionally unsupported.
    throw std::invalid_argument("apply_group_element: DiagonalSO stores a sphere point, not a group element");
  } else if (const auto* g2 = std::get_if<TorusG2>(&c)) {
    validate(*g2);
    detail::require_dim(point, 7, "apply_group_element(TorusG2)");
    detail::rotate_slots(out, 2, 3, g2->theta1);
    detail::rotate_slots(out, 4, 5, g2->theta2);
    detail::rotate_slots(out, 6, 7, -g2->theta1 - g2->theta2);
  } else if (const auto* s7 = std::get_if<TorusSpin7>(&c)) {
    validate(*s7);
    detail::require_dim(point, 8, "apply_group_element(TorusSpin7)");
    detail::rotate_slots(out, 1, 2, s7->theta1);
    detail::rotate_slots(out, 3, 4, s7->theta2);
    detail::rotate_slots(out, 5, 6, s7->theta3);
    detail::rotate_slots(out, 7, 8, -s7->theta1 - s7->theta2 - s7->theta3);
  } else {
    const auto& sp = std::get<Sp1>(c);
    validate(sp);
    detail::require_dim(point, 7, "apply_group_element(Sp1)");
    out = hypercomplex::embed_r7(hypercomplex::sp1_action(sp.p, hypercomplex::unembed_r7(point)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic orthonormal tangent frame of S^{n-1} at p.
// Householder completion: the reflector through u = p + sign(p_a) e_a (with
// a the largest-magnitude slot, ties to the smallest index) maps e_a to
// -sign(p_a) p, so the images of the remaining axes span the tangent space.
// The sign choice keeps |u|^2 = 2(1 + |p_a|) >= 2, so there is never
// cancellation, even for p on or near an axis.
// ---------------------------------------------------------------------------
inline std::vector<RealVector> sphere_tangent_frame(const RealVector& p) {
  const int n = p.dim();
  if (std::fabs(p.norm() - 1.0) > 1e-12) throw std::invalid_argument("sphere_tangent_frame: p must be unit");
  int a = 0;
  for (int i = 1; i < n; ++i)
    if (std::fabs(p[i]) > std::fabs(p[a])) a = i;
  const double s = p[a] >= 0.0 ? 1.0 : -1.0;
  RealVector u = p;
  u[a] += s;
  const double u2 = u.dot(u);
  std::vector<RealVector> frame;
  for (int i = 0; i < n; ++i) {
    if (i == a) continue;
    RealVector e = RealVector::unit(n, i + 1);
    e -= (2.0 * u[i] / u2) * u;
    frame.push_back(e);
  }
  return frame;
}

// ---------------------------------------------------------------------------
// Orbit point: F evaluated at the construction's group coordinates.
// ---------------------------------------------------------------------------
inline RealVector orbit_point(const OrbitConstruction& c, const CurveJet1& jet) {
  if (const auto* so = std::get_if<DiagonalSO>(&c)) {
    validate(*so);
    detail::require_dim(jet.value, 2 * so->n, "orbit_point(DiagonalSO)");
    const int n = so->n;
    double ru = 0.0, rv = 0.0;
    for (int i = 0; i < n; ++i) {
      ru += jet.value[2 * i] * jet.value[2 * i];
      rv += jet.value[2 * i + 1] * jet.value[2 * i + 1];
    }
    ru = std::sqrt(ru);
    rv = std::sqrt(rv);
    RealVector out(2 * n);
    for (int i = 0; i < n; ++i) {
      out[2 * i] = ru * so->p[i];
      out[2 * i + 1] = rv * so->p[i];
    }
    return out;
  }
  return apply_group_element(c, jet.value);
}

inline RealVector orbit_point(const OrbitConstruction& c, const SurfaceJet1& jet) {
  if (!std::holds_alternative<TorusG2>(c))
    throw std::invalid_argument("orbit_point: surface jets only combine with the G2 torus");
  return apply_group_element(c, jet.value);
}

// ---------------------------------------------------------------------------
// Analytic tangent frames, group directions first, then profile directions.
// ---------------------------------------------------------------------------
namespace detail {

// d/d th_k of the torus sweep: i e^{i th_k} z_k on the k-th slot pair and
// -i e^{i th_last} z_last on the eliminated slot pair.
inline RealVector torus_direction(const RealVector& rotated_value, const std::vector<std::pair<int, int>>& slots,
                                  int k, int last) {
  RealVector v(rotated_value.dim());
  const auto [kr, ki] = slots[static_cast<std::size_t>(k)];
  v[kr - 1] = rotated_value[kr - 1];
  v[ki - 1] = rotated_value[ki - 1];
  times_i_slots(v, kr, ki);
  const auto [lr, li] = slots[static_cast<std::size_t>(last)];
  v[lr - 1] = -rotated_value[lr - 1];
  v[li - 1] = -rotated_value[li - 1];
  times_i_slots(v, lr, li);
  return v;
}

inline std::vector<std::pair<int, int>> torus_slots(const OrbitConstruction& c) {
  if (const auto* sl = std::get_if<TorusSL>(&c)) {
    std::vector<std::pair<int, int>> slots;
    for (int k = 1; k <= sl->n; ++k) slots.push_back({2 * k - 1, 2 * k});
    return slots;
  }
  if (std::holds_alternative<TorusG2>(c)) return {{2, 3}, {4, 5}, {6, 7}};
  if (std::holds_alternative<TorusSpin7>(c)) return {{1, 2}, {3, 4}, {5, 6}, {7, 8}};
  throw std::invalid_argument("torus_slots: not a torus construction");
}

inline std::vector<RealVector> sp1_group_directions(const Sp1& sp, const hypercomplex::ImHeHPoint& pt) {
  using hypercomplex::Quaternion;
  const Quaternion basis[3] = {Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)};
  const Quaternion rx = quat_mul(quat_mul(sp.p, hypercomplex::imaginary_to_quat(pt.x)), quat_conj(sp.p));
  const Quaternion py = quat_mul(sp.p, pt.y);
  std::vector<RealVector> dirs;
  for (const Quaternion& b : basis) {
    hypercomplex::ImHeHPoint d;
    const Quaternion comm = hypercomplex::quat_commutator(b, rx);
    d.x = {comm.q1, comm.q2, comm.q3};
    d.y = quat_mul(b, py);
    dirs.push_back(hypercomplex::embed_r7(d));
  }
  return dirs;
}

}  // namespace detail

inline Frame orbit_frame(const OrbitConstruction& c, const CurveJet1& jet) {
  std::vector<RealVector> vs;

  if (const auto* so = std::get_if<DiagonalSO>(&c)) {
    validate(*so);
    detail::require_dim(jet.value, 2 * so->n, "orbit_frame(DiagonalSO)");
    const int n = so->n;
    double ru2 = 0.0, rv2 = 0.0, udu = 0.0, vdv = 0.0;
    for (int i = 0; i < n; ++i) {
      ru2 += jet.value[2 * i] * jet.value[2 * i];
      rv2 += jet.value[2 * i + 1] * jet.value[2 * i + 1];
      udu += jet.value[2 * i] * jet.deriv[2 * i];
      vdv += jet.value[2 * i + 1] * jet.deriv[2 * i + 1];
    }
    if (ru2 < 1e-28 || rv2 < 1e-28)
      throw DegenerateInput("orbit_frame(DiagonalSO): |u| and |v| must be nonzero");
    const double ru = std::sqrt(ru2), rv = std::sqrt(rv2);
    for (const RealVector& e : sphere_tangent_frame(so->p)) {
      RealVector v(2 * n);
      for (int i = 0; i < n; ++i) {
        v[2 * i] = ru * e[i];
        v[2 * i + 1] = rv * e[i];
      }
      vs.push_back(v);
    }
    RealVector prof(2 * n);
    const double dru = udu / ru, drv = vdv / rv;
    for (int i = 0; i < n; ++i) {
      prof[2 * i] = dru * so->p[i];
      prof[2 * i + 1] = drv * so->p[i];
    }
    vs.push_back(prof);
    return Frame(vs);
  }

  if (const auto* sp = std::get_if<Sp1>(&c)) {
    validate(*sp);
    detail::require_dim(jet.value, 7, "orbit_frame(Sp1)");
    const auto pt = hypercomplex::unembed_r7(jet.value);
    vs = detail::sp1_group_directions(*sp, pt);
    const auto dpt = hypercomplex::unembed_r7(jet.deriv);
    hypercomplex::ImHeHPoint prof;
    const auto rdx = quat_mul(quat_mul(sp->p, hypercomplex::imaginary_to_quat(dpt.x)), quat_conj(sp->p));
    prof.x = {rdx.q1, rdx.q2, rdx.q3};
    prof.y = quat_mul(sp->p, dpt.y);
    vs.push_back(hypercomplex::embed_r7(prof));
    return Frame(vs);
  }

  // Torus cases share the slot machinery.
  const RealVector rotated_value = apply_group_element(c, jet.value);
  const RealVector rotated_deriv = apply_group_element(c, jet.deriv);
  const auto slots = detail::torus_slots(c);
  const int pairs = static_cast<int>(slots.size());
  detail::require_dim(jet.value, ambient_dim(c), "orbit_frame");
  for (int k = 0; k < pairs - 1; ++k)
    vs.push_back(detail::torus_direction(rotated_value, slots, k, pairs - 1));
  vs.push_back(rotated_deriv);
  return Frame(vs);
}

// Surface overload: valid for the G2 torus (two group directions, then the
// two surface-parameter directions).
inline Frame orbit_frame(const OrbitConstruction& c, const SurfaceJet1& jet) {
  if (!std::holds_alternative<TorusG2>(c))
    throw std::invalid_argument("orbit_frame: surface jets only combine with the G2 torus");
  detail::require_dim(jet.value, 7, "orbit_frame(TorusG2 surface)");
  const RealVector rotated_value = apply_group_element(c, jet.value);
  const auto slots = detail::torus_slots(c);
  std::vector<RealVector> vs;
  vs.push_back(detail::torus_direction(rotated_value, slots, 0, 2));
  vs.push_back(detail::torus_direction(rotated_value, slots, 1, 2));
  vs.push_back(apply_group_element(c, jet.d_s));
  vs.push_back(apply_group_element(c, jet.d_t));
  return Frame(vs);
}

// ---------------------------------------------------------------------------
// Finite-difference frame oracle: central differences of the full orbit map
// in every free group parameter and in the profile parameter(s).
// ---------------------------------------------------------------------------
namespace detail {

template <typename MakeConstruction>
void fd_group_directions(const MakeConstruction& shifted, int free_count, const RealVector& base_value, double h,
                         std::vector<RealVector>& out) {
  for (int k = 0; k < free_count; ++k) {
    const RealVector fwd = apply_group_element(shifted(k, h), base_value);
    const RealVector bwd = apply_group_element(shifted(k, -h), base_value);
    RealVector d = fwd - bwd;
    d *= 1.0 / (2.0 * h);
    out.push_back(d);
  }
}

}  // namespace detail

inline Frame finite_difference_frame(const OrbitConstruction& c, const std::function<RealVector(double)>& profile,
                                     double t, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_difference_frame: h must be positive");
  std::vector<RealVector> vs;
  const RealVector base = profile(t);

  if (const auto* sl = std::get_if<TorusSL>(&c)) {
    validate(*sl);
    detail::fd_group_directions(
        [&](int k, double dh) {
          TorusSL s = *sl;
          s.theta[static_cast<std::size_t>(k)] += dh;
          return OrbitConstruction(s);
        },
        sl->n - 1, base, h, vs);
  } else if (const auto* so = std::get_if<DiagonalSO>(&c)) {
    validate(*so);
    // Group directions: rotate p inside the sphere along each tangent axis.
    const auto tangent = sphere_tangent_frame(so->p);
    const CurveJet1 jet(t, base, base);  // deriv unused by orbit_point
    for (const RealVector& e : tangent) {
      auto moved = [&](double dh) {
        DiagonalSO s = *so;
        RealVector q = so->p;
        RealVector step = e;
        step *= std::sin(dh);
        q *= std::cos(dh);
        q += step;
        s.p = q;  // exact geodesic: |q| = 1
        return OrbitConstruction(s);
      };
      const RealVector fwd = orbit_point(moved(h), jet);
      const RealVector bwd = orbit_point(moved(-h), jet);
      RealVector d = fwd - bwd;
      d *= 1.0 / (2.0 * h);
      vs.push_back(d);
    }
  } else if (const auto* g2 = std::get_if<TorusG2>(&c)) {
    validate(*g2);
    detail::fd_group_directions(
        [&](int k, double dh) {
          TorusG2 s = *g2;
          (k == 0 ? s.theta1 : s.theta2) += dh;
          return OrbitConstruction(s);
        },
        2, base, h, vs);
  } else if (const auto* s7 = std::get_if<TorusSpin7>(&c)) {
    validate(*s7);
    detail::fd_group_directions(
        [&](int k, double dh) {
          TorusSpin7 s = *s7;
          (k == 0 ? s.theta1 : (k == 1 ? s.theta2 : s.theta3)) += dh;
          return OrbitConstruction(s);
        },
        3, base, h, vs);
  } else {
    const auto& sp = std::get<Sp1>(c);
    validate(sp);
    using hypercomplex::Quaternion;
    const Quaternion basis[3] = {Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)};
    for (const Quaternion& b : basis) {
      auto moved = [&](double dh) {
        Quaternion rot(std::cos(dh), 0, 0, 0);
        Quaternion imag = b;
        imag *= std::sin(dh);
        rot += imag;
        Sp1 s;
        s.p = quat_mul(rot, sp.p);
        return OrbitConstruction(s);
      };
      const RealVector fwd = apply_group_element(moved(h), base);
      const RealVector bwd = apply_group_element(moved(-h), base);
      RealVector d = fwd - bwd;
      d *= 1.0 / (2.0 * h);
      vs.push_back(d);
    }
  }

  // Profile direction(s): central difference through the full orbit map.
  {
    const CurveJet1 fwd_jet(t + h, profile(t + h), profile(t + h));
    const CurveJet1 bwd_jet(t - h, profile(t - h), profile(t - h));
    RealVector d = orbit_point(c, fwd_jet) - orbit_point(c, bwd_jet);
    d *= 1.0 / (2.0 * h);
    vs.push_back(d);
  }
  return Frame(vs);
}

inline Frame finite_difference_frame(const OrbitConstruction& c,
                                     const std::function<RealVector(double, double)>& profile, double s, double t,
                                     double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_difference_frame: h must be positive");
  if (!std::holds_alternative<TorusG2>(c))
    throw std::invalid_argument("finite_difference_frame: surface profiles only combine with the G2 torus");
  const auto& g2 = std::get<TorusG2>(c);
  validate(g2);
  std::vector<RealVector> vs;
  const RealVector base = profile(s, t);
  detail::fd_group_directions(
      [&](int k, double dh) {
        TorusG2 m = g2;
        (k == 0 ? m.theta1 : m.theta2) += dh;
        return OrbitConstruction(m);
      },
      2, base, h, vs);
  RealVector ds = apply_group_element(c, profile(s + h, t)) - apply_group_element(c, profile(s - h, t));
  ds *= 1.0 / (2.0 * h);
  vs.push_back(ds);
  RealVector dt = apply_group_element(c, profile(s, t + h)) - apply_group_element(c, profile(s, t - h));
  dt *= 1.0 / (2.0 * h);
  vs.push_back(dt);
  return Frame(vs);
}

// ---------------------------------------------------------------------------
// Immersion check: numerical rank of the frame matrix via singular values.
// ---------------------------------------------------------------------------
struct ImmersionCheck {
  int rank = 0;
  double min_singular_value = 0.0;
  bool pass = false;
};

inline ImmersionCheck immersion_check(const Frame& frame, double tol = 1e-10) {
  if (tol <= 0.0) throw std::invalid_argument("immersion_check: tol must be positive");
  const int dim = frame.dim(), count = frame.count();
  Eigen::MatrixXd m(dim, count);
  for (int j = 0; j < count; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = frame.vectors[static_cast<std::size_t>(j)][i];
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  ImmersionCheck out;
  out.min_singular_value = sv(sv.size() - 1);
  const double threshold = tol * std::max(1.0, sv(0));
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) ++out.rank;
  out.pass = out.rank == count;
  return out;
}

}  // namespace calibron::orbits

#endif  // CALIBRON_ORBITS_HPP
