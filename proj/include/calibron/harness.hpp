#ifndef CALIBRON_HARNESS_HPP
#define CALIBRON_HARNESS_HPP

// Verification harness.
//
// verify() sweeps a profile (a set of curve or surface jets) across a
// deterministic lattice of group coordinates for one of the orbit
// constructions, evaluates the calibration residual system on every lifted
// tangent frame, and aggregates the results into a VerificationReport that
// serializes to JSON with a fixed schema.  The sweep is fully determined by
// the seed: identical inputs produce byte-identical reports.
//
// Sampling policy:
//   * Group coordinates come from a rank-1 lattice (golden-ratio family) in
//     the construction's free parameters, offset by a seeded shift.  Sample 0
//     is always the identity element (zero torus angles, the first coordinate
//     axis on the sphere, the identity quaternion), and the lattice points
//     for a smaller sample budget are a prefix of those for a larger one, so
//     refining the sweep can only grow the observed residual maxima.
//   * A sample is degenerate when the profile jet itself is not immersed (a
//     vanishing curve tangent, or a collapsed surface jacobian) or when the
//     construction cannot build a frame from it; such samples are counted and
//     excluded from the residual statistics.  Rank loss of the LIFTED frame
//     is deliberately not an exclusion: several calibrated families sweep
//     group orbits tangent to the profile directions, so their lifted frames
//     collapse even though the residual identities — the claim under test —
//     hold exactly.  The collapse is visible in min_frame_singular_value.
//     The verdict is "degenerate" only when every sample is; otherwise
//     "pass" requires every residual maximum to stay within tolerance.
//   * When comass sampling is requested, the report also records the largest
//     |form value| over seeded random orthonormal frames plus the standard
//     calibrated model plane for the kind under test.
//
// The header also provides the CSV jet interchange format used by the CLI
// (curves: "t,a1..aN,da1..daN"; surfaces: "s,t,a1..a7,ds_a1..,dt_a1..") and a
// minimal OBJ point-cloud writer (vertex lines for a chosen 3-coordinate
// projection, declared in the header comment).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "calibron/forms.hpp"
#include "calibron/orbits.hpp"
#include "calibron/rng.hpp"

namespace calibron::harness {

using exterior::RealVector;
using forms::CalibrationKind;
using forms::Frame;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Report structure
// ---------------------------------------------------------------------------

enum class Verdict { pass, fail, degenerate };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "degenerate";
  }
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "degenerate") return Verdict::degenerate;
  throw std::invalid_argument("verdict_from_string: unknown verdict '" + s + "'");
}

struct ResidualStat {
  double max_abs = 0.0;
  double mean_abs = 0.0;
};

struct VerificationReport {
  std::string construction_id;
  std::string kind;
  long long sample_count = 0;
  long long degenerate_sample_count = 0;
  std::vector<std::string> residual_labels;  // stable order, one entry per label
  std::vector<ResidualStat> residual_stats;
  double min_frame_singular_value = 0.0;
  bool comass_requested = false;
  double comass_sample_max = 0.0;  // meaningful only when comass_requested
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::fail;

  double residual_max_abs() const {
    double m = 0.0;
    for (const auto& st : residual_stats) m = std::max(m, st.max_abs);
    return m;
  }
};

struct SamplingSpec {
  int group_samples = 8;  // lattice size, identity included; must be >= 1
  int comass_samples = 0; // random orthonormal frames; 0 disables comass sampling
};

// ---------------------------------------------------------------------------
// Construction metadata
// ---------------------------------------------------------------------------

inline std::string construction_id(const orbits::OrbitConstruction& c) {
  if (const auto* sl = std::get_if<orbits::TorusSL>(&c)) return "torus-sl-" + std::to_string(sl->n);
  if (const auto* so = std::get_if<orbits::DiagonalSO>(&c)) return "diagonal-so-" + std::to_string(so->n);
  if (std::holds_alternative<orbits::TorusG2>(c)) return "torus-g2";
  if (std::holds_alternative<orbits::TorusSpin7>(c)) return "torus-spin7";
  return "sp1";
}

inline const char* kind_name(const CalibrationKind& kind) {
  if (std::holds_alternative<forms::SpecialLagrangian>(kind)) return "special_lagrangian";
  if (std::holds_alternative<forms::Associative>(kind)) return "associative";
  if (std::holds_alternative<forms::Coassociative>(kind)) return "coassociative";
  return "cayley";
}

// The calibration residual system a construction's lifted frames must satisfy.
inline CalibrationKind kind_for(const orbits::OrbitConstruction& c, bool surface_profile) {
  if (surface_profile) {
    if (!std::holds_alternative<orbits::TorusG2>(c))
      throw std::invalid_argument("kind_for: surface profiles only combine with the G2 torus");
    return forms::Coassociative{};
  }
  if (const auto* sl = std::get_if<orbits::TorusSL>(&c)) return forms::SpecialLagrangian{sl->n, 0.0};
  if (const auto* so = std::get_if<orbits::DiagonalSO>(&c)) return forms::SpecialLagrangian{so->n, 0.0};
  if (std::holds_alternative<orbits::TorusG2>(c)) return forms::Associative{};
  if (std::holds_alternative<orbits::TorusSpin7>(c)) return forms::Cayley{};
  return forms::Coassociative{};
}

namespace detail {

inline int frame_arity(const CalibrationKind& kind) {
  if (const auto* sl = std::get_if<forms::SpecialLagrangian>(&kind)) return sl->m;
  if (std::holds_alternative<forms::Associative>(kind)) return 3;
  return 4;
}

inline int frame_ambient(const CalibrationKind& kind) {
  if (const auto* sl = std::get_if<forms::SpecialLagrangian>(&kind)) return 2 * sl->m;
  if (std::holds_alternative<forms::Cayley>(kind)) return 8;
  return 7;
}

// A calibrated unit-volume model plane for each kind (form value exactly +1).
inline Frame model_plane(const CalibrationKind& kind) {
  std::vector<RealVector> vs;
  const int dim = frame_ambient(kind);
  if (const auto* sl = std::get_if<forms::SpecialLagrangian>(&kind)) {
    for (int j = 1; j <= sl->m; ++j) vs.push_back(RealVector::unit(dim, 2 * j - 1));  // real axes
  } else if (std::holds_alternative<forms::Associative>(kind)) {
    for (int i = 1; i <= 3; ++i) vs.push_back(RealVector::unit(7, i));
  } else if (std::holds_alternative<forms::Coassociative>(kind)) {
    for (int i = 4; i <= 7; ++i) vs.push_back(RealVector::unit(7, i));
  } else {
    for (int i = 1; i <= 4; ++i) vs.push_back(RealVector::unit(8, i));
  }
  return Frame(vs);
}

inline std::vector<std::string> residual_labels_for(const CalibrationKind& kind) {
  return forms::calibration_residuals(kind, model_plane(kind)).labels;
}

// Number of free group parameters sampled by the sweep.
inline int group_param_count(const orbits::OrbitConstruction& c) {
  if (const auto* sl = std::get_if<orbits::TorusSL>(&c)) return sl->n - 1;
  if (const auto* so = std::get_if<orbits::DiagonalSO>(&c)) return so->n - 1;
  if (std::holds_alternative<orbits::TorusG2>(c)) return 2;
  return 3;  // Spin(7) torus and the Sp(1) family both carry three parameters
}

// Unit-sphere point from [0,1)^{d} lattice coordinates; u = 0 maps to e_1.
inline RealVector sphere_point(int n, const std::vector<double>& u) {
  RealVector p(n);
  double sines = 1.0;
  for (int i = 0; i < n - 1; ++i) {
    // Last angle sweeps the full circle, the others a half turn.
    const double a = (i == n - 2 ? 2.0 : 1.0) * std::numbers::pi * u[static_cast<std::size_t>(i)];
    p[i] = sines * std::cos(a);
    sines *= std::sin(a);
  }
  p[n - 1] = sines;
  const double nrm = p.norm();
  p *= 1.0 / nrm;
  return p;
}

// Rebuild the construction at the given lattice coordinates (all in [0,1)).
inline orbits::OrbitConstruction with_group_coords(const orbits::OrbitConstruction& c, const std::vector<double>& u) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (const auto* sl = std::get_if<orbits::TorusSL>(&c)) {
    orbits::TorusSL out = *sl;
    for (std::size_t j = 0; j < out.theta.size(); ++j) out.theta[j] = two_pi * u[j];
    return out;
  }
  if (const auto* so = std::get_if<orbits::DiagonalSO>(&c)) {
    return orbits::DiagonalSO{so->n, sphere_point(so->n, u)};
  }
  if (std::holds_alternative<orbits::TorusG2>(c)) {
    return orbits::TorusG2{two_pi * u[0], two_pi * u[1]};
  }
  if (std::holds_alternative<orbits::TorusSpin7>(c)) {
    return orbits::TorusSpin7{two_pi * u[0], two_pi * u[1], two_pi * u[2]};
  }
  // Sp(1): hyperspherical chart of the unit quaternions; u = 0 is the identity.
  const double a = std::numbers::pi * u[0];
  const double b = std::numbers::pi * u[1];
  const double g = two_pi * u[2];
  hypercomplex::Quaternion q{std::cos(a), std::sin(a) * std::cos(b), std::sin(a) * std::sin(b) * std::cos(g),
                             std::sin(a) * std::sin(b) * std::sin(g)};
  return orbits::Sp1{q};
}

// Golden-ratio family rank-1 lattice directions: alpha_j = phi_d^-(j+1) where
// phi_d is the positive root of x^(d+1) = x + 1.
inline std::vector<double> lattice_alphas(int d) {
  double phi = 1.5;
  for (int it = 0; it < 64; ++it) {
    const double f = std::pow(phi, d + 1) - phi - 1.0;
    const double df = (d + 1) * std::pow(phi, d) - 1.0;
    phi -= f / df;
  }
  std::vector<double> alphas(static_cast<std::size_t>(d));
  double a = 1.0;
  for (int j = 0; j < d; ++j) {
    a /= phi;
    alphas[static_cast<std::size_t>(j)] = a;
  }
  return alphas;
}

inline double frac01(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // guard against floor rounding at the boundary
  return f;
}

// The group-coordinate sample list: identity first, then lattice points.
inline std::vector<std::vector<double>> group_samples(int d, int count, SplitRng& rng) {
  const std::vector<double> alphas = lattice_alphas(d);
  std::vector<double> offset(static_cast<std::size_t>(d));
  for (double& o : offset) o = rng.uniform01();
  std::vector<std::vector<double>> us;
  us.reserve(static_cast<std::size_t>(count));
  us.emplace_back(static_cast<std::size_t>(d), 0.0);  // identity element
  for (int i = 1; i < count; ++i) {
    std::vector<double> u(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      u[static_cast<std::size_t>(j)] =
          frac01(offset[static_cast<std::size_t>(j)] + static_cast<double>(i) * alphas[static_cast<std::size_t>(j)]);
    us.push_back(std::move(u));
  }
  return us;
}

// Profile immersion tests.  The tolerance is absolute against a unit scale:
// the jets the harness meets are O(1) coordinates by construction.
constexpr double profile_degeneracy_tol = 1e-12;

inline bool profile_immersed(const orbits::CurveJet1& jet) {
  return jet.deriv.norm() > profile_degeneracy_tol * std::max(1.0, jet.value.norm());
}

inline bool profile_immersed(const orbits::SurfaceJet1& jet) {
  const int dim = jet.value.dim();
  Eigen::MatrixXd m(dim, 2);
  for (int i = 0; i < dim; ++i) {
    m(i, 0) = jet.d_s[i];
    m(i, 1) = jet.d_t[i];
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  return sv(1) > profile_degeneracy_tol * std::max(1.0, sv(0));
}

// Random orthonormal k-frame in R^dim via QR of a Gaussian matrix.
inline Frame random_orthonormal_frame(SplitRng& rng, int dim, int k) {
  Eigen::MatrixXd m(dim, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = rng.gaussian();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, k);
  std::vector<RealVector> vs;
  vs.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    RealVector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = q(i, j);
    vs.push_back(v);
  }
  return Frame(vs);
}

// Shared accumulation core; FrameAt(jet_index, construction) builds the frame
// and jet_immersed holds the per-jet profile immersion verdicts.
template <typename FrameAt>
VerificationReport verify_impl(const orbits::OrbitConstruction& c, bool surface_profile,
                               const std::vector<bool>& jet_immersed, const FrameAt& frame_at,
                               const SamplingSpec& spec, double tol, std::uint64_t seed) {
  if (jet_immersed.empty()) throw std::invalid_argument("verify: empty sample set");
  if (spec.group_samples < 1) throw std::invalid_argument("verify: group_samples must be >= 1");
  if (spec.comass_samples < 0) throw std::invalid_argument("verify: comass_samples must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("verify: tolerance must be positive");

  const CalibrationKind kind = kind_for(c, surface_profile);
  const bool cayley = std::holds_alternative<forms::Cayley>(kind);
  VerificationReport r;
  r.construction_id = construction_id(c);
  r.kind = kind_name(kind);
  r.residual_labels = residual_labels_for(kind);
  r.tolerance = tol;
  r.seed = seed;

  SplitRng rng(seed);
  const auto coords = group_samples(group_param_count(c), spec.group_samples, rng);

  const std::size_t nlab = r.residual_labels.size();
  const std::size_t jet_count = jet_immersed.size();
  std::vector<double> max_abs(nlab, 0.0), sum_abs(nlab, 0.0);
  long long used = 0, degenerate = 0;
  double min_sv = 0.0;
  bool min_sv_set = false;

  for (const auto& u : coords) {
    const orbits::OrbitConstruction cg = with_group_coords(c, u);
    for (std::size_t j = 0; j < jet_count; ++j) {
      if (!jet_immersed[j]) {
        ++degenerate;
        continue;
      }
      Frame frame;
      try {
        frame = frame_at(j, cg);
      } catch (const forms::DegenerateInput&) {
        ++degenerate;
        continue;
      }
      const orbits::ImmersionCheck im = orbits::immersion_check(frame);
      if (!min_sv_set || im.min_singular_value < min_sv) {
        min_sv = im.min_singular_value;
        min_sv_set = true;
      }
      forms::ResidualVector res = forms::calibration_residuals(kind, frame);
      if (cayley) {
        // The defect residual is evaluated against the frame volume with the
        // form value taken unsigned, so the verdict does not depend on the
        // orientation the lift happened to produce.
        const double volume = exterior::gram_volume(frame.vectors);
        res.values[0] = std::fabs(res.values[0] + volume) - volume;
      }
      for (std::size_t k = 0; k < nlab; ++k) {
        const double a = std::fabs(res.values[k]);
        max_abs[k] = std::max(max_abs[k], a);
        sum_abs[k] += a;
      }
      ++used;
    }
  }

  r.sample_count = static_cast<long long>(coords.size()) * static_cast<long long>(jet_count);
  r.degenerate_sample_count = degenerate;
  r.min_frame_singular_value = min_sv_set ? min_sv : 0.0;
  r.residual_stats.resize(nlab);
  for (std::size_t k = 0; k < nlab; ++k) {
    r.residual_stats[k].max_abs = max_abs[k];
    r.residual_stats[k].mean_abs = used > 0 ? sum_abs[k] / static_cast<double>(used) : 0.0;
  }

  if (spec.comass_samples > 0) {
    r.comass_requested = true;
    const exterior::KForm form = forms::calibration_form(kind);
    const int dim = frame_ambient(kind), k = frame_arity(kind);
    double cmax = std::fabs(exterior::evaluate(form, model_plane(kind).vectors));
    for (int i = 0; i < spec.comass_samples; ++i) {
      const Frame f = random_orthonormal_frame(rng, dim, k);
      cmax = std::max(cmax, std::fabs(exterior::evaluate(form, f.vectors)));
    }
    r.comass_sample_max = cmax;
  }

  if (used == 0)
    r.verdict = Verdict::degenerate;
  else
    r.verdict = r.residual_max_abs() <= tol ? Verdict::pass : Verdict::fail;
  return r;
}

}  // namespace detail

// Public view of the group-coordinate chart used by verify(): the number of
// chart coordinates a construction carries, and the rebuild of the
// construction at given coordinates in [0,1)^d (tori: 2*pi*u angles; sphere
// and quaternion factors: hyperspherical charts with u = 0 at the reference
// element).  Useful for sweeping orbits on a deterministic grid.
inline int group_coordinate_count(const orbits::OrbitConstruction& c) { return detail::group_param_count(c); }

inline orbits::OrbitConstruction at_group_coordinates(const orbits::OrbitConstruction& c,
                                                      const std::vector<double>& u) {
  return detail::with_group_coords(c, u);
}

// ---------------------------------------------------------------------------
// verify: curve and surface profiles
// ---------------------------------------------------------------------------

inline VerificationReport verify(const orbits::OrbitConstruction& c, const std::vector<orbits::CurveJet1>& jets,
                                 const SamplingSpec& spec, double tol, std::uint64_t seed) {
  const int dim = orbits::ambient_dim(c);
  std::vector<bool> immersed;
  immersed.reserve(jets.size());
  for (const auto& jet : jets) {
    if (jet.value.dim() != dim) throw std::invalid_argument("verify: dimension mismatch");
    immersed.push_back(detail::profile_immersed(jet));
  }
  return detail::verify_impl(
      c, /*surface_profile=*/false, immersed,
      [&](std::size_t j, const orbits::OrbitConstruction& cg) { return orbits::orbit_frame(cg, jets[j]); }, spec, tol,
      seed);
}

inline VerificationReport verify(const orbits::OrbitConstruction& c, const std::vector<orbits::SurfaceJet1>& jets,
                                 const SamplingSpec& spec, double tol, std::uint64_t seed) {
  if (!std::holds_alternative<orbits::TorusG2>(c))
    throw std::invalid_argument("verify: surface profiles only combine with the G2 torus");
  std::vector<bool> immersed;
  immersed.reserve(jets.size());
  for (const auto& jet : jets) {
    if (jet.value.dim() != 7) throw std::invalid_argument("verify: dimension mismatch");
    immersed.push_back(detail::profile_immersed(jet));
  }
  return detail::verify_impl(
      c, /*surface_profile=*/true, immersed,
      [&](std::size_t j, const orbits::OrbitConstruction& cg) { return orbits::orbit_frame(cg, jets[j]); }, spec, tol,
      seed);
}

// ---------------------------------------------------------------------------
// JSON serialization (schema 1, snake_case, stable field order)
// ---------------------------------------------------------------------------

inline ordered_json report_to_json(const VerificationReport& r) {
  ordered_json j;
  j["schema"] = 1;
  j["construction_id"] = r.construction_id;
  j["kind"] = r.kind;
  j["sample_count"] = r.sample_count;
  j["degenerate_sample_count"] = r.degenerate_sample_count;
  ordered_json jmax, jmean;
  for (std::size_t k = 0; k < r.residual_labels.size(); ++k) {
    jmax[r.residual_labels[k]] = r.residual_stats[k].max_abs;
    jmean[r.residual_labels[k]] = r.residual_stats[k].mean_abs;
  }
  j["residual_max_abs"] = std::move(jmax);
  j["residual_mean_abs"] = std::move(jmean);
  j["min_frame_singular_value"] = r.min_frame_singular_value;
  if (r.comass_requested) j["comass_sample_max"] = r.comass_sample_max;
  j["tolerance"] = r.tolerance;
  j["seed"] = r.seed;
  j["verdict"] = verdict_name(r.verdict);
  return j;
}

namespace detail {

inline double require_number(const ordered_json& j, const char* field) {
  if (!j.is_number()) throw std::invalid_argument(std::string("report_from_json: field '") + field + "' must be a number");
  return j.get<double>();
}

inline long long require_count(const ordered_json& j, const char* field) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw std::invalid_argument(std::string("report_from_json: field '") + field + "' must be an integer");
  const long long v = j.get<long long>();
  if (v < 0) throw std::invalid_argument(std::string("report_from_json: field '") + field + "' must be nonnegative");
  return v;
}

}  // namespace detail

// Strict reader: every field above is required (comass_sample_max optional),
// and unknown fields are rejected.
inline VerificationReport report_from_json(const ordered_json& j) {
  if (!j.is_object()) throw std::invalid_argument("report_from_json: not a JSON object");
  static const std::vector<std::string> known = {
      "schema", "construction_id", "kind", "sample_count", "degenerate_sample_count", "residual_max_abs",
      "residual_mean_abs", "min_frame_singular_value", "comass_sample_max", "tolerance", "seed", "verdict"};
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw std::invalid_argument("report_from_json: unknown field '" + item.key() + "'");
  for (const auto& field : known)
    if (field != "comass_sample_max" && !j.contains(field))
      throw std::invalid_argument("report_from_json: missing field '" + field + "'");

  if (!j["schema"].is_number_integer() || j["schema"].get<long long>() != 1)
    throw std::invalid_argument("report_from_json: unsupported schema version");
  if (!j["construction_id"].is_string() || !j["kind"].is_string() || !j["verdict"].is_string())
    throw std::invalid_argument("report_from_json: construction_id, kind, verdict must be strings");

  VerificationReport r;
  r.construction_id = j["construction_id"].get<std::string>();
  r.kind = j["kind"].get<std::string>();
  r.sample_count = detail::require_count(j["sample_count"], "sample_count");
  r.degenerate_sample_count = detail::require_count(j["degenerate_sample_count"], "degenerate_sample_count");

  const auto& jmax = j["residual_max_abs"];
  const auto& jmean = j["residual_mean_abs"];
  if (!jmax.is_object() || !jmean.is_object())
    throw std::invalid_argument("report_from_json: residual statistics must be objects");
  for (const auto& item : jmax.items()) {
    r.residual_labels.push_back(item.key());
    ResidualStat st;
    st.max_abs = detail::require_number(item.value(), "residual_max_abs");
    r.residual_stats.push_back(st);
  }
  std::size_t k = 0;
  for (const auto& item : jmean.items()) {
    if (k >= r.residual_labels.size() || item.key() != r.residual_labels[k])
      throw std::invalid_argument("report_from_json: residual_mean_abs labels must match residual_max_abs");
    r.residual_stats[k].mean_abs = detail::require_number(item.value(), "residual_mean_abs");
    ++k;
  }
  if (k != r.residual_labels.size())
    throw std::invalid_argument("report_from_json: residual_mean_abs labels must match residual_max_abs");

  r.min_frame_singular_value = detail::require_number(j["min_frame_singular_value"], "min_frame_singular_value");
  if (j.contains("comass_sample_max")) {
    r.comass_requested = true;
    r.comass_sample_max = detail::require_number(j["comass_sample_max"], "comass_sample_max");
  }
  r.tolerance = detail::require_number(j["tolerance"], "tolerance");
  if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned())
    throw std::invalid_argument("report_from_json: field 'seed' must be an integer");
  r.seed = j["seed"].get<std::uint64_t>();
  r.verdict = verdict_from_string(j["verdict"].get<std::string>());
  return r;
}

inline VerificationReport report_parse(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("report_parse: ") + e.what());
  }
  return report_from_json(j);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

enum class ReportFormat { json, table };

inline ReportFormat report_format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "table") return ReportFormat::table;
  throw std::invalid_argument("report_format_from_string: expected 'json' or 'table'");
}

inline std::string report_render(const VerificationReport& r, ReportFormat format) {
  if (format == ReportFormat::json) return report_to_json(r).dump(2) + "\n";

  char buf[160];
  std::string out;
  const auto row = [&](const char* name, const std::string& value) {
    std::snprintf(buf, sizeof buf, "%-26s %s\n", name, value.c_str());
    out += buf;
  };
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return std::string(buf);
  };
  row("construction_id", r.construction_id);
  row("kind", r.kind);
  row("sample_count", std::to_string(r.sample_count));
  row("degenerate_sample_count", std::to_string(r.degenerate_sample_count));
  row("min_frame_singular_value", num(r.min_frame_singular_value));
  if (r.comass_requested) row("comass_sample_max", num(r.comass_sample_max));
  row("tolerance", num(r.tolerance));
  row("seed", std::to_string(r.seed));
  row("verdict", verdict_name(r.verdict));
  out += "\n";
  std::snprintf(buf, sizeof buf, "%-26s %-17s %s\n", "residual", "max_abs", "mean_abs");
  out += buf;
  for (std::size_t k = 0; k < r.residual_labels.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%-26s %-17s %s\n", r.residual_labels[k].c_str(),
                  num(r.residual_stats[k].max_abs).c_str(), num(r.residual_stats[k].mean_abs).c_str());
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV jet interchange
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::invalid_argument("csv: non-numeric value '" + s + "' on line " + std::to_string(line_no));
  return v;
}

inline std::vector<std::string> read_csv_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace detail

// Curve jets: header "t,a1..aN,da1..daN", one row per jet.
inline void write_curve_csv(std::ostream& out, const std::vector<orbits::CurveJet1>& jets) {
  if (jets.empty()) throw std::invalid_argument("write_curve_csv: empty jet list");
  const int n = jets[0].value.dim();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",a" << i;
  for (int i = 1; i <= n; ++i) out << ",da" << i;
  out << "\n";
  for (const auto& jet : jets) {
    if (jet.value.dim() != n) throw std::invalid_argument("write_curve_csv: mixed jet dimensions");
    out << detail::format_double(jet.t);
    for (int i = 0; i < n; ++i) out << "," << detail::format_double(jet.value[i]);
    for (int i = 0; i < n; ++i) out << "," << detail::format_double(jet.deriv[i]);
    out << "\n";
  }
}

inline std::vector<orbits::CurveJet1> read_curve_csv(std::istream& in) {
  const auto lines = detail::read_csv_lines(in);
  if (lines.empty()) throw std::invalid_argument("read_curve_csv: missing header");
  const auto header = detail::split_csv_line(lines[0]);
  if (header.size() < 3 || header.size() % 2 == 0 || header[0] != "t")
    throw std::invalid_argument("read_curve_csv: malformed header (expected t,a1..aN,da1..daN)");
  const int n = static_cast<int>((header.size() - 1) / 2);
  if (n > 8) throw std::invalid_argument("read_curve_csv: at most 8 ambient coordinates supported");
  for (int i = 1; i <= n; ++i) {
    if (header[static_cast<std::size_t>(i)] != "a" + std::to_string(i) ||
        header[static_cast<std::size_t>(n + i)] != "da" + std::to_string(i))
      throw std::invalid_argument("read_curve_csv: malformed header (expected t,a1..aN,da1..daN)");
  }
  std::vector<orbits::CurveJet1> jets;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto cells = detail::split_csv_line(lines[li]);
    if (cells.size() != header.size())
      throw std::invalid_argument("read_curve_csv: wrong column count on line " + std::to_string(li + 1));
    const double t = detail::parse_double(cells[0], li + 1);
    RealVector value(n), deriv(n);
    for (int i = 0; i < n; ++i) {
      value[i] = detail::parse_double(cells[static_cast<std::size_t>(1 + i)], li + 1);
      deriv[i] = detail::parse_double(cells[static_cast<std::size_t>(1 + n + i)], li + 1);
    }
    jets.emplace_back(t, value, deriv);
  }
  return jets;
}

// Surface jets (ambient R^7): header "s,t,a1..a7,ds_a1..ds_a7,dt_a1..dt_a7".
inline void write_surface_csv(std::ostream& out, const std::vector<orbits::SurfaceJet1>& jets) {
  if (jets.empty()) throw std::invalid_argument("write_surface_csv: empty jet list");
  out << "s,t";
  for (int i = 1; i <= 7; ++i) out << ",a" << i;
  for (int i = 1; i <= 7; ++i) out << ",ds_a" << i;
  for (int i = 1; i <= 7; ++i) out << ",dt_a" << i;
  out << "\n";
  for (const auto& jet : jets) {
    if (jet.value.dim() != 7) throw std::invalid_argument("write_surface_csv: jets must live in R^7");
    out << detail::format_double(jet.s) << "," << detail::format_double(jet.t);
    for (int i = 0; i < 7; ++i) out << "," << detail::format_double(jet.value[i]);
    for (int i = 0; i < 7; ++i) out << "," << detail::format_double(jet.d_s[i]);
    for (int i = 0; i < 7; ++i) out << "," << detail::format_double(jet.d_t[i]);
    out << "\n";
  }
}

inline std::vector<orbits::SurfaceJet1> read_surface_csv(std::istream& in) {
  const auto lines = detail::read_csv_lines(in);
  if (lines.empty()) throw std::invalid_argument("read_surface_csv: missing header");
  const auto header = detail::split_csv_line(lines[0]);
  bool ok = header.size() == 23 && header[0] == "s" && header[1] == "t";
  for (int i = 1; ok && i <= 7; ++i) {
    ok = header[static_cast<std::size_t>(1 + i)] == "a" + std::to_string(i) &&
         header[static_cast<std::size_t>(8 + i)] == "ds_a" + std::to_string(i) &&
         header[static_cast<std::size_t>(15 + i)] == "dt_a" + std::to_string(i);
  }
  if (!ok)
    throw std::invalid_argument("read_surface_csv: malformed header (expected s,t,a1..a7,ds_a1..ds_a7,dt_a1..dt_a7)");
  std::vector<orbits::SurfaceJet1> jets;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto cells = detail::split_csv_line(lines[li]);
    if (cells.size() != 23)
      throw std::invalid_argument("read_surface_csv: wrong column count on line " + std::to_string(li + 1));
    const double s = detail::parse_double(cells[0], li + 1);
    const double t = detail::parse_double(cells[1], li + 1);
    RealVector value(7), ds(7), dt(7);
    for (int i = 0; i < 7; ++i) {
      value[i] = detail::parse_double(cells[static_cast<std::size_t>(2 + i)], li + 1);
      ds[i] = detail::parse_double(cells[static_cast<std::size_t>(9 + i)], li + 1);
      dt[i] = detail::parse_double(cells[static_cast<std::size_t>(16 + i)], li + 1);
    }
    jets.emplace_back(s, t, value, ds, dt);
  }
  return jets;
}

// ---------------------------------------------------------------------------
// OBJ point-cloud export: vertex lines only, for a chosen 3-coordinate
// projection (1-based ambient slots) declared in the header comment.
// ---------------------------------------------------------------------------

inline void write_obj(std::ostream& out, const std::vector<RealVector>& points, const std::array<int, 3>& projection) {
  if (projection[0] == projection[1] || projection[0] == projection[2] || projection[1] == projection[2])
    throw std::invalid_argument("write_obj: projection slots must be distinct");
  for (int slot : projection)
    if (slot < 1 || slot > 8) throw std::invalid_argument("write_obj: projection slots must be in [1,8]");
  out << "# projection x" << projection[0] << " x" << projection[1] << " x" << projection[2] << "\n";
  for (const auto& p : points) {
    for (int slot : projection)
      if (slot > p.dim()) throw std::invalid_argument("write_obj: projection slot exceeds point dimension");
    out << "v " << detail::format_double(p[projection[0] - 1]) << " " << detail::format_double(p[projection[1] - 1])
        << " " << detail::format_double(p[projection[2] - 1]) << "\n";
  }
}

}  // namespace calibron::harness

#endif  // CALIBRON_HARNESS_HPP
