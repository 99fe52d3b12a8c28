#ifndef CALIBRON_EXTERIOR_HPP
#define CALIBRON_EXTERIOR_HPP

// Exact sparse exterior algebra over R^n, 1 <= n <= 8: constant-coefficient
// k-forms with wedge product, Hodge star, evaluation on vector tuples,
// interior product and Gram volumes.  Index sets are kept as bitmasks; all
// sign bookkeeping reduces to inversion counts between masks.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace calibron::exterior {

// ---------------------------------------------------------------------------
// RealVector: a vector in R^dim, 1 <= dim <= 8, components 0-indexed.
// ---------------------------------------------------------------------------
class RealVector {
public:
  static constexpr int kMaxDim = 8;

  explicit RealVector(int dim) : dim_(dim) {
    check_dim(dim);
    c_.fill(0.0);
  }

  RealVector(std::initializer_list<double> comps) : dim_(static_cast<int>(comps.size())) {
    check_dim(dim_);
    c_.fill(0.0);
    int i = 0;
    for (double v : comps) {
      require_finite(v);
      c_[i++] = v;
    }
  }

  // i-th standard basis vector, 1-based (matches the e_i notation).
  static RealVector unit(int dim, int i) {
    RealVector v(dim);
    if (i < 1 || i > dim) throw std::invalid_argument("RealVector::unit: index out of range");
    v.c_[i - 1] = 1.0;
    return v;
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  double dot(const RealVector& o) const {
    require_same_dim(o);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += c_[i] * o.c_[i];
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }

  RealVector& operator+=(const RealVector& o) {
    require_same_dim(o);
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  RealVector& operator-=(const RealVector& o) {
    require_same_dim(o);
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  RealVector& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }
  friend RealVector operator+(RealVector a, const RealVector& b) { return a += b; }
  friend RealVector operator-(RealVector a, const RealVector& b) { return a -= b; }
  friend RealVector operator*(double s, RealVector v) { return v *= s; }

  bool all_finite() const {
    for (int i = 0; i < dim_; ++i)
      if (!std::isfinite(c_[i])) return false;
    return true;
  }

private:
  static void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("RealVector: dim must be in [1,8]");
  }
  static void require_finite(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("RealVector: non-finite component");
  }
  void require_same_dim(const RealVector& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("RealVector: dimension mismatch");
  }

  int dim_;
  std::array<double, kMaxDim> c_;
};

// ---------------------------------------------------------------------------
// MultiIndex: strictly increasing tuple of indices in [1,8], stored as a
// bitmask (bit i-1 set <=> index i present).  Canonical by construction.
// ---------------------------------------------------------------------------
class MultiIndex {
public:
  MultiIndex() = default;  // the empty index (degree-0 forms)

  MultiIndex(std::initializer_list<int> indices) {
    int prev = 0;
    for (int i : indices) {
      if (i < 1 || i > 8) throw std::invalid_argument("MultiIndex: index out of [1,8]");
      if (i <= prev) throw std::invalid_argument("MultiIndex: indices must strictly increase");
      prev = i;
      mask_ |= static_cast<std::uint16_t>(1u << (i - 1));
    }
  }

  static MultiIndex from_mask(std::uint16_t mask) {
    if (mask >= (1u << 8)) throw std::invalid_argument("MultiIndex: mask out of range");
    MultiIndex m;
    m.mask_ = mask;
    return m;
  }

  std::uint16_t mask() const { return mask_; }
  int degree() const { return std::popcount(mask_); }
  bool contains(int i) const { return (mask_ >> (i - 1)) & 1u; }
  int max_index() const { return mask_ == 0 ? 0 : std::bit_width(mask_); }

  std::vector<int> indices() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(degree()));
    for (int i = 1; i <= 8; ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.mask_ == b.mask_; }

  // Lexicographic order on the index tuples (e.g. e14 before e23); this is
  // the order used for term storage and for the debug dump.
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    std::uint16_t ma = a.mask_, mb = b.mask_;
    while (ma != 0 && mb != 0) {
      int ia = std::countr_zero(ma), ib = std::countr_zero(mb);
      if (ia != ib) return ia < ib;
      ma &= static_cast<std::uint16_t>(ma - 1);
      mb &= static_cast<std::uint16_t>(mb - 1);
    }
    return ma == 0 && mb != 0;
  }

private:
  std::uint16_t mask_ = 0;
};

namespace detail {

// Number of inversions created by concatenating the sorted index set `a`
// before the sorted index set `b`; the parity is the sign of the merge.
inline int merge_inversions(std::uint16_t a, std::uint16_t b) {
  int inv = 0;
  std::uint16_t m = a;
  while (m != 0) {
    int pos = std::countr_zero(m);
    inv += std::popcount(static_cast<std::uint16_t>(b & ((1u << pos) - 1u)));
    m &= static_cast<std::uint16_t>(m - 1);
  }
  return inv;
}

inline double merge_sign(std::uint16_t a, std::uint16_t b) {
  return (merge_inversions(a, b) % 2 == 0) ? 1.0 : -1.0;
}

// Determinant of a k x k matrix (k <= 8) via in-place partial-pivot LU.
inline double det_small(std::array<double, 64>& m, int k) {
  double det = 1.0;
  for (int col = 0; col < k; ++col) {
    int piv = col;
    double best = std::fabs(m[static_cast<std::size_t>(col * k + col)]);
    for (int r = col + 1; r < k; ++r) {
      double v = std::fabs(m[static_cast<std::size_t>(r * k + col)]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != col) {
      for (int c = 0; c < k; ++c) std::swap(m[static_cast<std::size_t>(piv * k + c)], m[static_cast<std::size_t>(col * k + c)]);
      det = -det;
    }
    const double d = m[static_cast<std::size_t>(col * k + col)];
    det *= d;
    for (int r = col + 1; r < k; ++r) {
      const double f = m[static_cast<std::size_t>(r * k + col)] / d;
      if (f == 0.0) continue;
      for (int c = col; c < k; ++c) m[static_cast<std::size_t>(r * k + c)] -= f * m[static_cast<std::size_t>(col * k + c)];
    }
  }
  return det;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// KForm: constant-coefficient k-form on R^dim as a canonical sparse map
// MultiIndex -> coefficient.  Exact zeros are never stored.
// ---------------------------------------------------------------------------
class KForm {
public:
  KForm(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 1 || dim > 8) throw std::invalid_argument("KForm: dim must be in [1,8]");
    if (degree < 0 || degree > dim) throw std::invalid_argument("KForm: degree must be in [0,dim]");
  }

  static KForm basis(int dim, const MultiIndex& idx) {
    KForm f(dim, idx.degree());
    f.set_term(idx, 1.0);
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  double coefficient(const MultiIndex& idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? 0.0 : it->second;
  }

  void set_term(const MultiIndex& idx, double coeff) {
    validate_key(idx);
    if (!std::isfinite(coeff)) throw std::invalid_argument("KForm: non-finite coefficient");
    if (coeff == 0.0)
      terms_.erase(idx);
    else
      terms_[idx] = coeff;
  }

  void add_term(const MultiIndex& idx, double coeff) { set_term(idx, coefficient(idx) + coeff); }

  KForm& operator+=(const KForm& o) {
    require_compatible(o);
    for (const auto& [idx, c] : o.terms_) add_term(idx, c);
    return *this;
  }
  KForm& operator-=(const KForm& o) {
    require_compatible(o);
    for (const auto& [idx, c] : o.terms_) add_term(idx, -c);
    return *this;
  }
  KForm& operator*=(double s) {
    if (!std::isfinite(s)) throw std::invalid_argument("KForm: non-finite scale");
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [idx, c] : terms_) c *= s;
    return *this;
  }
  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator*(double s, KForm f) { return f *= s; }

  // Debug dump: one term per line, "+1 e123" style, lexicographic key order.
  std::string dump() const {
    std::string out;
    char buf[64];
    for (const auto& [idx, c] : terms_) {
      std::snprintf(buf, sizeof buf, "%+g", c);
      out += buf;
      if (idx.degree() > 0) {
        out += " e";
        for (int i : idx.indices()) out += static_cast<char>('0' + i);
      }
      out += '\n';
    }
    return out;
  }

private:
  void validate_key(const MultiIndex& idx) const {
    if (idx.degree() != degree_) throw std::invalid_argument("KForm: term degree mismatch");
    if (idx.max_index() > dim_) throw std::invalid_argument("KForm: term index exceeds dim");
  }
  void require_compatible(const KForm& o) const {
    if (dim_ != o.dim_ || degree_ != o.degree_)
      throw std::invalid_argument("KForm: dim/degree mismatch");
  }

  int dim_;
  int degree_;
  std::map<MultiIndex, double> terms_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline KForm wedge(const KForm& a, const KForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  if (a.degree() + b.degree() > a.dim()) throw std::invalid_argument("wedge: degree overflow");
  KForm out(a.dim(), a.degree() + b.degree());
  for (const auto& [ia, ca] : a.terms()) {
    for (const auto& [ib, cb] : b.terms()) {
      if ((ia.mask() & ib.mask()) != 0) continue;
      const double sign = detail::merge_sign(ia.mask(), ib.mask());
      out.add_term(MultiIndex::from_mask(static_cast<std::uint16_t>(ia.mask() | ib.mask())),
                   sign * ca * cb);
    }
  }
  return out;
}

// Value of f on an ordered tuple of degree-many vectors: for each stored term
// the determinant of the selected component rows, weighted by the coefficient.
inline double evaluate(const KForm& f, const std::vector<RealVector>& frame) {
  if (static_cast<int>(frame.size()) != f.degree())
    throw std::invalid_argument("evaluate: frame size must equal form degree");
  for (const auto& v : frame)
    if (v.dim() != f.dim()) throw std::invalid_argument("evaluate: vector dimension mismatch");
  const int k = f.degree();
  if (k == 0) {
    // Degree-0 form: the value is the constant coefficient.
    return f.coefficient(MultiIndex{});
  }
  double total = 0.0;
  std::array<double, 64> m{};
  for (const auto& [idx, c] : f.terms()) {
    int row = 0;
    for (int i : idx.indices()) {
      for (int col = 0; col < k; ++col) m[static_cast<std::size_t>(row * k + col)] = frame[static_cast<std::size_t>(col)][i - 1];
      ++row;
    }
    total += c * detail::det_small(m, k);
  }
  return total;
}

// Euclidean Hodge dual with e_1 ^ ... ^ e_n as the positive orientation.
inline KForm hodge_star(const KForm& f) {
  const int n = f.dim();
  const std::uint16_t full = static_cast<std::uint16_t>((1u << n) - 1u);
  KForm out(n, n - f.degree());
  for (const auto& [idx, c] : f.terms()) {
    const std::uint16_t comp = static_cast<std::uint16_t>(full & ~idx.mask());
    out.add_term(MultiIndex::from_mask(comp), c * detail::merge_sign(idx.mask(), comp));
  }
  return out;
}

// sqrt(det(G^T G)) for the frame matrix G; 0 iff the frame is dependent.
inline double gram_volume(const std::vector<RealVector>& frame) {
  if (frame.empty()) throw std::invalid_argument("gram_volume: empty frame");
  const int k = static_cast<int>(frame.size());
  const int dim = frame[0].dim();
  for (const auto& v : frame)
    if (v.dim() != dim) throw std::invalid_argument("gram_volume: vector dimension mismatch");
  std::array<double, 64> g{};
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g[static_cast<std::size_t>(i * k + j)] = frame[static_cast<std::size_t>(i)].dot(frame[static_cast<std::size_t>(j)]);
  const double d = detail::det_small(g, k);
  return d <= 0.0 ? 0.0 : std::sqrt(d);
}

// Contraction in the first slot: evaluate(f, [v, w...]) = evaluate(i_v f, [w...]).
inline KForm interior_product(const RealVector& v, const KForm& f) {
  if (v.dim() != f.dim()) throw std::invalid_argument("interior_product: dimension mismatch");
  if (f.degree() == 0) throw std::invalid_argument("interior_product: degree-0 form");
  KForm out(f.dim(), f.degree() - 1);
  for (const auto& [idx, c] : f.terms()) {
    int pos = 0;
    for (int i : idx.indices()) {
      const double comp = v[i - 1];
      if (comp != 0.0) {
        const double sign = (pos % 2 == 0) ? 1.0 : -1.0;
        out.add_term(MultiIndex::from_mask(static_cast<std::uint16_t>(idx.mask() & ~(1u << (i - 1)))),
                     sign * comp * c);
      }
      ++pos;
    }
  }
  return out;
}

}  // namespace calibron::exterior

#endif  // CALIBRON_EXTERIOR_HPP
