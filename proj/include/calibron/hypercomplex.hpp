#ifndef CALIBRON_HYPERCOMPLEX_HPP
#define CALIBRON_HYPERCOMPLEX_HPP

// Quaternion arithmetic (Hamilton convention, ij = k) and the identification
// R^7 = Im H + H with its unit-quaternion action p . (x, y) = (p x pbar, p y).
//
// Embedding convention, fixed: the Im H part occupies slots (2, 4, 6) of R^7
// and the H part occupies slots (1, 3, 5, 7), real component first.

#include <array>
#include <cmath>
#include <stdexcept>

#include "calibron/exterior.hpp"

namespace calibron::hypercomplex {

using exterior::RealVector;

struct Quaternion {
  double q0 = 0.0, q1 = 0.0, q2 = 0.0, q3 = 0.0;  // q0 + q1 i + q2 j + q3 k

  Quaternion() = default;
  Quaternion(double a, double b, double c, double d) : q0(a), q1(b), q2(c), q3(d) {
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d)))
      throw std::invalid_argument("Quaternion: non-finite component");
  }

  double norm2() const { return q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3; }
  double norm() const { return std::sqrt(norm2()); }

  Quaternion& operator+=(const Quaternion& o) {
    q0 += o.q0;
    q1 += o.q1;
    q2 += o.q2;
    q3 += o.q3;
    return *this;
  }
  Quaternion& operator-=(const Quaternion& o) {
    q0 -= o.q0;
    q1 -= o.q1;
    q2 -= o.q2;
    q3 -= o.q3;
    return *this;
  }
  Quaternion& operator*=(double s) {
    q0 *= s;
    q1 *= s;
    q2 *= s;
    q3 *= s;
    return *this;
  }
};

inline Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
inline Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
inline Quaternion operator*(double s, Quaternion a) { return a *= s; }

inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return Quaternion(a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
                    a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
                    a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
                    a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0);
}

inline Quaternion quat_conj(const Quaternion& a) { return Quaternion(a.q0, -a.q1, -a.q2, -a.q3); }

// [a, b] = ab - ba; purely imaginary for any a, b.
inline Quaternion quat_commutator(const Quaternion& a, const Quaternion& b) {
  return quat_mul(a, b) - quat_mul(b, a);
}

inline Quaternion normalized(const Quaternion& a) {
  const double n = a.norm();
  if (n == 0.0) throw std::invalid_argument("normalized: zero quaternion");
  Quaternion out = a;
  out *= 1.0 / n;
  return out;
}

// A point of Im H + H: x = v1 i + v2 j + v3 k, y = u0 + u1 i + u2 j + u3 k.
struct ImHeHPoint {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  Quaternion y;
};

inline Quaternion imaginary_to_quat(const std::array<double, 3>& v) { return Quaternion(0.0, v[0], v[1], v[2]); }

// p . (x, y) = (p x pbar, p y) for unit p.  The real part of p x pbar cancels
// algebraically; it is checked defensively and discarded.  With `renormalize`
// a slightly off-unit p is rescaled instead of rejected.
inline ImHeHPoint sp1_action(Quaternion p, const ImHeHPoint& pt, bool renormalize = false) {
  const double defect = std::fabs(p.norm2() - 1.0);
  if (defect > 1e-12) {
    if (!renormalize) throw std::invalid_argument("sp1_action: p must be a unit quaternion");
    p = normalized(p);
  }
  const Quaternion rotated = quat_mul(quat_mul(p, imaginary_to_quat(pt.x)), quat_conj(p));
  const double scale = 1.0 + std::fabs(pt.x[0]) + std::fabs(pt.x[1]) + std::fabs(pt.x[2]);
  if (std::fabs(rotated.q0) > 1e-12 * scale)
    throw std::logic_error("sp1_action: rotation produced a non-imaginary part");
  ImHeHPoint out;
  out.x = {rotated.q1, rotated.q2, rotated.q3};
  out.y = quat_mul(p, pt.y);
  return out;
}

// Im H -> slots (2, 4, 6); H -> slots (1, 3, 5, 7), real component on slot 1.
inline RealVector embed_r7(const ImHeHPoint& pt) {
  RealVector v(7);
  v[0] = pt.y.q0;
  v[1] = pt.x[0];
  v[2] = pt.y.q1;
  v[3] = pt.x[1];
  v[4] = pt.y.q2;
  v[5] = pt.x[2];
  v[6] = pt.y.q3;
  return v;
}

inline ImHeHPoint unembed_r7(const RealVector& v) {
  if (v.dim() != 7) throw std::invalid_argument("unembed_r7: vector must live in R^7");
  ImHeHPoint pt;
  pt.x = {v[1], v[3], v[5]};
  pt.y = Quaternion(v[0], v[2], v[4], v[6]);
  return pt;
}

}  // namespace calibron::hypercomplex

#endif  // CALIBRON_HYPERCOMPLEX_HPP
