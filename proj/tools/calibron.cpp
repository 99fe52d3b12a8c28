// calibron: command-line front end for the calibrated-submanifold library.
//
// Subcommands
//   forms dump   print a model calibration form as a term list
//   sweep        sample orbit point clouds from a profile on a group grid
//   trace        run a solver family, emitting jets plus telemetry columns
//   ansatz       solve the pointwise-linear coassociative ansatz on a grid
//   verify       run the verification harness and render the report
//
// Exit codes: 0 on success (trace telemetry within tolerance, verify verdict
// "pass"), 1 on a residual or telemetry failure, 2 on invalid input (bad
// flags, malformed files, domain errors).

#include <CLI11.hpp>

#include <calibron/forms.hpp>
#include <calibron/harness.hpp>
#include <calibron/orbits.hpp>
#include <calibron/solvers.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using calibron::exterior::RealVector;
namespace forms = calibron::forms;
namespace orbits = calibron::orbits;
namespace solvers = calibron::solvers;
namespace harness = calibron::harness;

// ---------------------------------------------------------------------------
// Small shared utilities
// ---------------------------------------------------------------------------

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> read_nonempty_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(line);
  }
  return lines;
}

double parse_number(const std::string& cell, const std::string& where) {
  const char* s = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw std::invalid_argument("not a number: '" + cell + "' (" + where + ")");
  return v;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& who) {
  std::vector<double> out;
  for (const auto& cell : split_cells(text)) out.push_back(parse_number(cell, who));
  if (out.empty()) throw std::invalid_argument(who + ": expected a comma-separated number list");
  return out;
}

long parse_integer(const std::string& cell, const std::string& where) {
  const char* s = cell.c_str();
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0')
    throw std::invalid_argument("not an integer: '" + cell + "' (" + where + ")");
  return v;
}

std::ofstream open_output(const std::string& path, const std::string& who) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument(who + ": cannot open output file '" + path + "'");
  return out;
}

// ---------------------------------------------------------------------------
// Construction names (the same identifiers the verification report uses)
// ---------------------------------------------------------------------------

orbits::OrbitConstruction parse_construction(const std::string& name) {
  if (name == "torus-g2") return orbits::TorusG2{};
  if (name == "torus-spin7") return orbits::TorusSpin7{};
  if (name == "sp1") return orbits::Sp1{};
  auto stem_n = [&name](const char* stem) -> int {
    const std::string s(stem);
    if (name.size() == s.size() + 1 && name.compare(0, s.size(), s) == 0) {
      const char d = name[s.size()];
      if (d >= '2' && d <= '4') return d - '0';
    }
    return 0;
  };
  if (const int n = stem_n("torus-sl-")) return orbits::TorusSL{n, std::vector<double>(n - 1, 0.0)};
  if (const int n = stem_n("diagonal-so-")) return orbits::DiagonalSO{n, RealVector::unit(n, 1)};
  throw std::invalid_argument("unknown construction '" + name +
                              "' (expected torus-sl-N, diagonal-so-N with N in 2..4, "
                              "torus-g2, torus-spin7, or sp1)");
}

// ---------------------------------------------------------------------------
// Profile sources
//
// Files are CSV with a header row.  Curves: t,a1..aN,da1..daN; surfaces:
// s,t,a1..a7,ds_a1..ds_a7,dt_a1..dt_a7.  Additional trailing columns (for
// example the telemetry columns written by `trace`) are accepted and
// ignored, so solver output feeds `sweep` and `verify` directly.  Two
// built-in names generate closed-form profiles without a file.
// ---------------------------------------------------------------------------

struct Profile {
  bool surface = false;
  std::vector<orbits::CurveJet1> curves;
  std::vector<orbits::SurfaceJet1> surfaces;
};

Profile read_profile_stream(std::istream& in, const std::string& who) {
  const auto lines = read_nonempty_lines(in);
  if (lines.empty()) throw std::invalid_argument(who + ": empty profile file");
  const auto header = split_cells(lines[0]);

  Profile p;
  int n = 0;            // curve ambient dimension
  std::size_t used = 0; // leading columns that carry jet data

  if (header.size() >= 2 && header[0] == "s" && header[1] == "t") {
    p.surface = true;
    used = 2 + 3 * 7;
    if (header.size() < used)
      throw std::invalid_argument(who + ": surface header too short (expected s,t,a1..a7,ds_a1..ds_a7,dt_a1..dt_a7)");
    static const char* stems[3] = {"a", "ds_a", "dt_a"};
    std::size_t pos = 2;
    for (const char* stem : stems)
      for (int i = 1; i <= 7; ++i, ++pos)
        if (header[pos] != stem + std::to_string(i))
          throw std::invalid_argument(who + ": unexpected surface column '" + header[pos] + "' (wanted " + stem +
                                      std::to_string(i) + ")");
  } else if (!header.empty() && header[0] == "t") {
    while (1 + static_cast<std::size_t>(n) < header.size() &&
           header[1 + static_cast<std::size_t>(n)] == "a" + std::to_string(n + 1))
      ++n;
    if (n < 1 || n > 8)
      throw std::invalid_argument(who + ": curve header must carry a1..aN with N in 1..8");
    used = 1 + 2 * static_cast<std::size_t>(n);
    if (header.size() < used)
      throw std::invalid_argument(who + ": curve header too short (expected t,a1..aN,da1..daN)");
    for (int i = 1; i <= n; ++i)
      if (header[static_cast<std::size_t>(n + i)] != "da" + std::to_string(i))
        throw std::invalid_argument(who + ": unexpected curve column '" + header[static_cast<std::size_t>(n + i)] +
                                    "' (wanted da" + std::to_string(i) + ")");
  } else {
    throw std::invalid_argument(who + ": unrecognized profile header (curves start with t,a1..; surfaces with s,t,a1..)");
  }

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto cells = split_cells(lines[li]);
    const std::string where = "line " + std::to_string(li + 1);
    if (cells.size() != header.size())
      throw std::invalid_argument(who + ": wrong column count on " + where);
    std::vector<double> v(used);
    for (std::size_t k = 0; k < used; ++k) v[k] = parse_number(cells[k], where);
    if (p.surface) {
      RealVector value(7), ds(7), dt(7);
      for (int i = 0; i < 7; ++i) {
        value[i] = v[2 + static_cast<std::size_t>(i)];
        ds[i] = v[9 + static_cast<std::size_t>(i)];
        dt[i] = v[16 + static_cast<std::size_t>(i)];
      }
      p.surfaces.emplace_back(v[0], v[1], value, ds, dt);
    } else {
      RealVector value(n), deriv(n);
      for (int i = 0; i < n; ++i) {
        value[i] = v[1 + static_cast<std::size_t>(i)];
        deriv[i] = v[1 + static_cast<std::size_t>(n + i)];
      }
      p.curves.emplace_back(v[0], value, deriv);
    }
  }
  if (p.curves.empty() && p.surfaces.empty())
    throw std::invalid_argument(who + ": profile file has no data rows");
  return p;
}

// The closed-form torus-invariant surface: alpha_1 = s^2 + t^2,
// w1 = s + it, w2 = c (s + it), w3 = i (s - it)^2 on [-1,1]^2.
std::vector<orbits::SurfaceJet1> example_surface_jets(double c, int res) {
  if (res < 2) throw std::invalid_argument("example-surface: resolution must be at least 2");
  std::vector<orbits::SurfaceJet1> jets;
  jets.reserve(static_cast<std::size_t>(res) * static_cast<std::size_t>(res));
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      const double s = -1.0 + 2.0 * i / (res - 1);
      const double t = -1.0 + 2.0 * j / (res - 1);
      RealVector v(7), ds(7), dt(7);
      v[0] = s * s + t * t;
      v[1] = s;
      v[2] = t;
      v[3] = c * s;
      v[4] = c * t;
      v[5] = 2.0 * s * t;
      v[6] = s * s - t * t;
      ds[0] = 2.0 * s;
      ds[1] = 1.0;
      ds[3] = c;
      ds[5] = 2.0 * t;
      ds[6] = 2.0 * s;
      dt[0] = 2.0 * t;
      dt[2] = 1.0;
      dt[4] = c;
      dt[5] = 2.0 * s;
      dt[6] = -2.0 * t;
      jets.emplace_back(s, t, v, ds, dt);
    }
  return jets;
}

// The closed-form cone profile for the quaternionic family.
std::vector<orbits::CurveJet1> example_cone_jets() {
  std::vector<double> u;
  for (int i = 0; i < 50; ++i) u.push_back(0.25 + 1.75 * i / 49.0);
  return solvers::sp1_cone({1.0, 0.5, 0.0}, u);
}

Profile resolve_profile(const std::string& src, double example_c, const std::string& who) {
  Profile p;
  if (src == "example-surface") {
    p.surface = true;
    p.surfaces = example_surface_jets(example_c, 41);
    return p;
  }
  if (src == "example-cone") {
    p.curves = example_cone_jets();
    return p;
  }
  std::ifstream in(src);
  if (!in) throw std::invalid_argument(who + ": cannot open profile '" + src + "'");
  return read_profile_stream(in, who);
}

// Lexicographic iteration over the group-coordinate grid {0..K-1}^d.
bool advance_grid_index(std::vector<int>& idx, int K) {
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
    if (++idx[i] < K) return true;
    idx[i] = 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// forms dump
// ---------------------------------------------------------------------------

int run_forms_dump(const std::string& form, int m, bool m_given) {
  calibron::exterior::KForm f(1, 0);
  if (form == "phi" || form == "psi" || form == "Phi") {
    if (m_given) throw std::invalid_argument("forms dump: --m applies only to omega/reOmega/imOmega");
    f = (form == "phi") ? forms::g2_three_form() : (form == "psi") ? forms::g2_four_form() : forms::cayley_form();
  } else if (form == "omega") {
    f = forms::symplectic_form(m);
  } else if (form == "reOmega") {
    f = forms::holo_volume_real(m);
  } else if (form == "imOmega") {
    f = forms::holo_volume_imag(m);
  } else {
    throw std::invalid_argument("forms dump: unknown form '" + form +
                                "' (expected phi, psi, Phi, omega, reOmega, imOmega)");
  }

  for (const auto& [idx, coeff] : f.terms()) {
    char head[64];
    std::snprintf(head, sizeof head, "%+.17g", coeff);
    std::string line(head);
    line += " e";
    for (int i : idx.indices()) line += static_cast<char>('0' + i);
    std::cout << line << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int run_sweep(const std::string& construction, const std::string& profile_src, int K, double example_c,
              const std::string& out_path) {
  if (K < 1) throw std::invalid_argument("sweep: --angles-grid must be at least 1");
  const orbits::OrbitConstruction c = parse_construction(construction);
  const Profile p = resolve_profile(profile_src, example_c, "sweep");
  const int d = harness::group_coordinate_count(c);
  const int dim = orbits::ambient_dim(c);
  if (p.surface && !std::holds_alternative<orbits::TorusG2>(c))
    throw std::invalid_argument("sweep: surface profiles only combine with torus-g2");

  std::ofstream file;
  if (!out_path.empty()) file = open_output(out_path, "sweep");
  std::ostream& out = out_path.empty() ? std::cout : file;

  for (int i = 1; i <= d; ++i) out << "u" << i << ",";
  out << (p.surface ? "s,t" : "t");
  for (int i = 1; i <= dim; ++i) out << ",x" << i;
  out << "\n";

  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> u(static_cast<std::size_t>(d), 0.0);
  do {
    for (int i = 0; i < d; ++i) u[static_cast<std::size_t>(i)] = static_cast<double>(idx[static_cast<std::size_t>(i)]) / K;
    const orbits::OrbitConstruction cg = harness::at_group_coordinates(c, u);
    auto prefix = [&]() {
      for (double ui : u) out << fmt(ui) << ",";
    };
    auto emit_point = [&](const RealVector& x) {
      for (int i = 0; i < dim; ++i) out << "," << fmt(x[i]);
      out << "\n";
    };
    if (p.surface) {
      for (const auto& jet : p.surfaces) {
        prefix();
        out << fmt(jet.s) << "," << fmt(jet.t);
        emit_point(orbits::orbit_point(cg, jet));
      }
    } else {
      for (const auto& jet : p.curves) {
        prefix();
        out << fmt(jet.t);
        emit_point(orbits::orbit_point(cg, jet));
      }
    }
  } while (advance_grid_index(idx, K));
  return 0;
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

void write_jet_row_prefix(std::ostream& out, const orbits::CurveJet1& jet) {
  out << fmt(jet.t);
  for (int i = 0; i < jet.value.dim(); ++i) out << "," << fmt(jet.value[i]);
  for (int i = 0; i < jet.deriv.dim(); ++i) out << "," << fmt(jet.deriv[i]);
}

void write_jet_header_prefix(std::ostream& out, int dim) {
  out << "t";
  for (int i = 1; i <= dim; ++i) out << ",a" << i;
  for (int i = 1; i <= dim; ++i) out << ",da" << i;
}

// Instantaneous level values for the SL torus constraints (value drift, as
// opposed to the derivative residuals).
std::vector<double> sl_level_drift(const orbits::CurveJet1& jet, const solvers::LevelConstants& levels) {
  const int n = jet.value.dim() / 2;
  std::vector<std::complex<double>> z(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = {jet.value[2 * k], jet.value[2 * k + 1]};
  std::vector<double> drift;
  for (int k = 0; k + 1 < n; ++k)
    drift.push_back(std::norm(z[static_cast<std::size_t>(k)]) - std::norm(z[static_cast<std::size_t>(n - 1)]) -
                    levels.c_k[static_cast<std::size_t>(k)]);
  std::complex<double> prod = 1.0;
  for (const auto& w : z) prod *= w;
  drift.push_back(((levels.parity == solvers::Parity::imaginary) ? prod.imag() : prod.real()) - levels.c);
  return drift;
}

int run_trace(const std::string& family, const std::string& constants_str, const std::string& start_str, int steps,
              double h, int orientation, double tol, const std::string& out_path) {
  if (steps < 1) throw std::invalid_argument("trace: --steps must be at least 1");
  if (!(h > 0.0)) throw std::invalid_argument("trace: --h must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("trace: --tol must be positive");
  if (orientation != 1 && orientation != -1) throw std::invalid_argument("trace: --orientation must be 1 or -1");
  const std::vector<double> start = parse_number_list(start_str, "trace --start");

  std::ofstream file;
  if (!out_path.empty()) file = open_output(out_path, "trace");
  std::ostream& out = out_path.empty() ? std::cout : file;

  double telemetry_max = 0.0;
  auto note = [&telemetry_max](double v) { telemetry_max = std::max(telemetry_max, std::fabs(v)); };
  std::size_t rows = 0;

  if (family == "sl-torus" || family == "sl-torus-spin7") {
    const bool spin7 = (family == "sl-torus-spin7");
    if (start.size() % 2 != 0 || start.size() < 4 || start.size() > 8)
      throw std::invalid_argument("trace: --start must list 2n coordinates with n in 2..4");
    const int n = static_cast<int>(start.size()) / 2;
    if (spin7 && n != 4)
      throw std::invalid_argument("trace: family sl-torus-spin7 needs 8 start coordinates");
    RealVector x0(2 * n);
    for (int i = 0; i < 2 * n; ++i) x0[i] = start[static_cast<std::size_t>(i)];

    solvers::LevelConstants levels;
    if (constants_str.empty()) {
      levels = solvers::measure_levels(x0);
    } else {
      const auto cs = parse_number_list(constants_str, "trace --constants");
      if (static_cast<int>(cs.size()) != n)
        throw std::invalid_argument("trace: --constants wants the n-1 level differences then the product target");
      levels.c_k.assign(cs.begin(), cs.end() - 1);
      levels.c = cs.back();
      levels.parity = solvers::parity_for(n);
    }

    const auto jets = solvers::sl_torus_trace(levels, x0, steps, h, orientation);

    write_jet_header_prefix(out, 2 * n);
    const auto res_labels = spin7 ? solvers::t3_cayley_residuals(jets[0]).labels : solvers::sl_torus_residuals(jets[0]).labels;
    for (const auto& l : res_labels) out << "," << l;
    for (int k = 1; k < n; ++k) out << ",drift_level_" << k;
    out << ",drift_phase\n";

    for (const auto& jet : jets) {
      write_jet_row_prefix(out, jet);
      const auto res = spin7 ? solvers::t3_cayley_residuals(jet) : solvers::sl_torus_residuals(jet);
      for (double v : res.values) {
        note(v);
        out << "," << fmt(v);
      }
      for (double v : sl_level_drift(jet, levels)) {
        note(v);
        out << "," << fmt(v);
      }
      out << "\n";
      ++rows;
    }
  } else if (family == "so-n") {
    if (constants_str.empty())
      throw std::invalid_argument("trace: family so-n needs --constants n,c");
    const auto cs = parse_number_list(constants_str, "trace --constants");
    if (cs.size() != 2) throw std::invalid_argument("trace: family so-n needs --constants n,c");
    const int n = static_cast<int>(std::llround(cs[0]));
    if (std::fabs(cs[0] - n) > 0.0 || n < 2 || n > 4)
      throw std::invalid_argument("trace: so-n constant n must be an integer in 2..4");
    const double c = cs[1];
    if (start.size() != 2) throw std::invalid_argument("trace: family so-n starts from x,y in the positive quadrant");

    const auto planar = solvers::so_n_trace(n, c, start[0], start[1], steps, h, orientation);
    if (planar.size() < static_cast<std::size_t>(steps) + 1)
      std::cerr << "trace: stopped after " << planar.size() - 1 << " of " << steps
                << " steps (left the positive quadrant or hit a degenerate gradient)\n";

    write_jet_header_prefix(out, 2 * n);
    out << ",residual,drift_level\n";
    for (const auto& pj : planar) {
      const orbits::CurveJet1 jet = solvers::so_n_embed_jet(n, pj);
      write_jet_row_prefix(out, jet);
      const double residual = solvers::so_n_residual(jet);
      const double drift = std::pow(std::complex<double>(pj.value[0], pj.value[1]), n).imag() - c;
      note(residual);
      note(drift);
      out << "," << fmt(residual) << "," << fmt(drift) << "\n";
      ++rows;
    }
  } else if (family == "sp1") {
    if (!constants_str.empty()) throw std::invalid_argument("trace: family sp1 takes no --constants");
    if (start.size() != 4) throw std::invalid_argument("trace: family sp1 starts from v1,v2,v3,u");
    const solvers::Sp1State initial({start[0], start[1], start[2]}, start[3]);
    const auto traj = solvers::sp1_integrate(initial, steps * h, h);
    if (traj.conical)
      std::cerr << "trace: stopped at the cone apex after " << traj.states.size() - 1 << " steps\n";

    const double k0 = initial.k;
    const double k_scale = initial.F * std::pow(5.0 * initial.G * initial.G + 4.0 * initial.F, 4);
    const bool absolute_drift = std::fabs(k0) <= 1e-14 * std::max(1.0, k_scale);
    const std::array<double, 3> v0 = initial.v;
    const double v0n2 = v0[0] * v0[0] + v0[1] * v0[1] + v0[2] * v0[2];

    write_jet_header_prefix(out, 7);
    out << ",conserved_drift,arc_defect,direction_defect\n";
    for (const auto& [t, s] : traj.states) {
      const orbits::CurveJet1 jet = solvers::sp1_state_jet(t, s);
      write_jet_row_prefix(out, jet);
      const double kd = absolute_drift ? std::fabs(s.k - k0) : std::fabs(s.k / k0 - 1.0);
      const double speed = jet.deriv.norm();
      const double arc = std::fabs(speed - 1.0);
      double dir = 0.0;
      if (v0n2 > 0.0)
        for (int i = 0; i < 3; ++i)
          for (int j = i + 1; j < 3; ++j)
            dir = std::max(dir, std::fabs(s.v[i] * v0[j] - s.v[j] * v0[i]) / v0n2);
      note(kd);
      note(arc);
      note(dir);
      out << "," << fmt(kd) << "," << fmt(arc) << "," << fmt(dir) << "\n";
      ++rows;
    }
  } else {
    throw std::invalid_argument("trace: unknown family '" + family +
                                "' (expected sl-torus, so-n, sp1, sl-torus-spin7)");
  }

  std::cerr << "trace: " << rows << " points, max telemetry " << fmt(telemetry_max) << " (tolerance " << fmt(tol)
            << ")\n";
  return telemetry_max <= tol ? 0 : 1;
}

// ---------------------------------------------------------------------------
// ansatz
// ---------------------------------------------------------------------------

int run_ansatz(const std::string& input_path, double c, const std::string& out_path, double curl_tol) {
  std::ifstream in(input_path);
  if (!in) throw std::invalid_argument("ansatz: cannot open input '" + input_path + "'");
  const auto lines = read_nonempty_lines(in);
  if (lines.empty()) throw std::invalid_argument("ansatz: empty input file");
  const auto header = split_cells(lines[0]);
  static const char* wanted[5] = {"s", "t", "a2", "a4", "a7"};
  if (header.size() != 5)
    throw std::invalid_argument("ansatz: input header must be s,t,a2,a4,a7");
  for (int i = 0; i < 5; ++i)
    if (header[static_cast<std::size_t>(i)] != wanted[i])
      throw std::invalid_argument("ansatz: input header must be s,t,a2,a4,a7");

  struct Node {
    double s, t, a2, a4, a7;
  };
  std::vector<Node> nodes;
  std::set<double> s_set, t_set;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto cells = split_cells(lines[li]);
    const std::string where = "line " + std::to_string(li + 1);
    if (cells.size() != 5) throw std::invalid_argument("ansatz: wrong column count on " + where);
    Node nd{parse_number(cells[0], where), parse_number(cells[1], where), parse_number(cells[2], where),
            parse_number(cells[3], where), parse_number(cells[4], where)};
    nodes.push_back(nd);
    s_set.insert(nd.s);
    t_set.insert(nd.t);
  }

  const std::vector<double> S(s_set.begin(), s_set.end());
  const std::vector<double> T(t_set.begin(), t_set.end());
  const int rows = static_cast<int>(S.size()), cols = static_cast<int>(T.size());
  if (rows < 3 || cols < 3) throw std::invalid_argument("ansatz: need at least a 3x3 grid");
  if (nodes.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw std::invalid_argument("ansatz: grid is not a complete rows x cols lattice");

  auto uniform_spacing = [](const std::vector<double>& v, const char* axis) {
    const double h0 = v[1] - v[0];
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
      if (std::fabs((v[i + 1] - v[i]) - h0) > 1e-9 * std::max(1.0, std::fabs(h0)))
        throw std::invalid_argument(std::string("ansatz: non-uniform spacing along ") + axis);
    return h0;
  };
  const double hs = uniform_spacing(S, "s");
  const double ht = uniform_spacing(T, "t");
  if (std::fabs(hs - ht) > 1e-9 * std::max(1.0, std::fabs(hs)))
    throw std::invalid_argument("ansatz: s and t spacings must agree");

  std::map<double, int> s_index, t_index;
  for (int i = 0; i < rows; ++i) s_index[S[static_cast<std::size_t>(i)]] = i;
  for (int j = 0; j < cols; ++j) t_index[T[static_cast<std::size_t>(j)]] = j;

  solvers::AnsatzGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.h = hs;
  grid.c = c;
  const std::size_t count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  grid.a2.assign(count, 0.0);
  grid.a4.assign(count, 0.0);
  grid.a7.assign(count, 0.0);
  std::vector<char> seen(count, 0);
  for (const auto& nd : nodes) {
    const std::size_t idx =
        static_cast<std::size_t>(s_index.at(nd.s)) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(t_index.at(nd.t));
    if (seen[idx]) throw std::invalid_argument("ansatz: duplicate grid node in input");
    seen[idx] = 1;
    grid.a2[idx] = nd.a2;
    grid.a4[idx] = nd.a4;
    grid.a7[idx] = nd.a7;
  }

  const solvers::AnsatzGrid solved = solvers::t2_coassoc_ansatz(grid, curl_tol);

  std::vector<orbits::SurfaceJet1> jets;
  jets.reserve(count);
  for (int is = 0; is < rows; ++is)
    for (int it = 0; it < cols; ++it)
      jets.push_back(solvers::ansatz_node_jet(solved, is, it, S[static_cast<std::size_t>(is)],
                                              T[static_cast<std::size_t>(it)]));
  std::ofstream out = open_output(out_path, "ansatz");
  harness::write_surface_csv(out, jets);

  std::cerr << "ansatz: curl residual " << fmt(solved.curl_residual) << " (tolerance " << fmt(solved.curl_tolerance)
            << "), " << solved.singular_nodes.size() << " singular nodes, alpha_1 "
            << (solved.a1_valid ? "integrated" : "not integrable") << "\n";
  return solved.a1_valid ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

harness::SamplingSpec parse_grid_spec(const std::string& text) {
  const auto cells = split_cells(text);
  if (cells.empty() || cells.size() > 2)
    throw std::invalid_argument("verify: --grid wants GROUP or GROUP,COMASS sample counts");
  harness::SamplingSpec spec;
  spec.group_samples = static_cast<int>(parse_integer(cells[0], "--grid"));
  spec.comass_samples = cells.size() == 2 ? static_cast<int>(parse_integer(cells[1], "--grid")) : 0;
  return spec;
}

int run_verify(const std::string& construction, const std::string& profile_src, const std::string& grid_str,
               double tol, std::uint64_t seed, double example_c, const std::string& format_str,
               const std::string& json_path, const std::string& obj_path, const std::string& obj_proj_str,
               int obj_angles) {
  const orbits::OrbitConstruction c = parse_construction(construction);
  const harness::SamplingSpec spec = parse_grid_spec(grid_str);
  const harness::ReportFormat format = harness::report_format_from_string(format_str);
  const Profile p = resolve_profile(profile_src, example_c, "verify");

  const harness::VerificationReport report = p.surface ? harness::verify(c, p.surfaces, spec, tol, seed)
                                                       : harness::verify(c, p.curves, spec, tol, seed);

  std::cout << harness::report_render(report, format);
  if (!json_path.empty()) {
    std::ofstream out = open_output(json_path, "verify");
    out << harness::report_to_json(report).dump(2) << "\n";
  }
  if (!obj_path.empty()) {
    if (obj_angles < 1) throw std::invalid_argument("verify: --obj-angles must be at least 1");
    const auto proj_cells = split_cells(obj_proj_str);
    if (proj_cells.size() != 3) throw std::invalid_argument("verify: --obj-projection wants three coordinate slots");
    std::array<int, 3> projection{};
    for (int i = 0; i < 3; ++i)
      projection[static_cast<std::size_t>(i)] = static_cast<int>(parse_integer(proj_cells[static_cast<std::size_t>(i)], "--obj-projection"));

    std::vector<RealVector> points;
    const int d = harness::group_coordinate_count(c);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> u(static_cast<std::size_t>(d), 0.0);
    do {
      for (int i = 0; i < d; ++i)
        u[static_cast<std::size_t>(i)] = static_cast<double>(idx[static_cast<std::size_t>(i)]) / obj_angles;
      const orbits::OrbitConstruction cg = harness::at_group_coordinates(c, u);
      if (p.surface)
        for (const auto& jet : p.surfaces) points.push_back(orbits::orbit_point(cg, jet));
      else
        for (const auto& jet : p.curves) points.push_back(orbits::orbit_point(cg, jet));
    } while (advance_grid_index(idx, obj_angles));

    std::ofstream out = open_output(obj_path, "verify");
    harness::write_obj(out, points, projection);
  }
  return report.verdict == harness::Verdict::pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calibron: construct, sweep, trace, and verify group-invariant calibrated submanifolds"};
  app.require_subcommand(1);
  int rc = 0;

  // forms dump
  auto* forms_cmd = app.add_subcommand("forms", "model calibration forms");
  forms_cmd->require_subcommand(1);
  auto* dump_cmd = forms_cmd->add_subcommand("dump", "print a form as one term per line ('+1 e123' style)");
  std::string dump_form;
  int dump_m = 3;
  dump_cmd->add_option("--form", dump_form, "phi | psi | Phi | omega | reOmega | imOmega")->required();
  auto* m_opt = dump_cmd->add_option("--m", dump_m, "complex dimension for omega/reOmega/imOmega (2..4, default 3)");
  dump_cmd->callback([&]() { rc = run_forms_dump(dump_form, dump_m, m_opt->count() > 0); });

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "emit an orbit point cloud (CSV: group coordinates, profile parameters, x1..xN)");
  std::string sweep_construction, sweep_profile, sweep_out;
  int sweep_k = 8;
  double sweep_c = 1.0;
  sweep_cmd->add_option("--construction", sweep_construction, "torus-sl-N | diagonal-so-N | torus-g2 | torus-spin7 | sp1")
      ->required();
  sweep_cmd->add_option("--profile", sweep_profile, "profile CSV path, or example-surface / example-cone")->required();
  sweep_cmd->add_option("--angles-grid", sweep_k, "grid points per group coordinate (default 8)");
  sweep_cmd->add_option("--c", sweep_c, "constant for the example-surface profile (default 1)");
  sweep_cmd->add_option("--out", sweep_out, "output CSV path (default stdout)");
  sweep_cmd->callback([&]() { rc = run_sweep(sweep_construction, sweep_profile, sweep_k, sweep_c, sweep_out); });

  // trace
  auto* trace_cmd = app.add_subcommand("trace", "run a solver family; emits CSV jets plus telemetry columns");
  trace_cmd->set_help_flag("--help", "print help");  // frees -h so --h can be the step size
  std::string trace_family, trace_constants, trace_start, trace_out;
  int trace_steps = 100, trace_orientation = 1;
  double trace_h = 1e-3, trace_tol = 1e-8;
  trace_cmd->add_option("--family", trace_family, "sl-torus | so-n | sp1 | sl-torus-spin7")->required();
  trace_cmd->add_option("--constants", trace_constants,
                        "sl-torus[-spin7]: level differences then product target (default: measured from --start); "
                        "so-n: n,c");
  trace_cmd->add_option("--start", trace_start,
                        "sl-torus[-spin7]: 2n coordinates; so-n: x,y; sp1: v1,v2,v3,u")
      ->required();
  trace_cmd->add_option("--steps", trace_steps, "number of steps (default 100)");
  trace_cmd->add_option("--h", trace_h, "step size (default 1e-3)");
  trace_cmd->add_option("--orientation", trace_orientation, "+1 or -1 (default +1; sl-torus and so-n)");
  trace_cmd->add_option("--tol", trace_tol, "telemetry tolerance deciding the exit code (default 1e-8)");
  trace_cmd->add_option("--out", trace_out, "output CSV path (default stdout)");
  trace_cmd->callback([&]() {
    rc = run_trace(trace_family, trace_constants, trace_start, trace_steps, trace_h, trace_orientation, trace_tol,
                   trace_out);
  });

  // ansatz
  auto* ansatz_cmd = app.add_subcommand("ansatz", "solve the pointwise-linear coassociative ansatz on an s,t grid");
  std::string ansatz_input, ansatz_out;
  double ansatz_c = 1.0, ansatz_curl_tol = -1.0;
  ansatz_cmd->add_option("--input", ansatz_input, "input CSV with header s,t,a2,a4,a7 on a complete uniform lattice")
      ->required();
  ansatz_cmd->add_option("--c", ansatz_c, "product constant (a6 = c / (a2 a4))")->required();
  ansatz_cmd->add_option("--out", ansatz_out, "output surface-jet CSV path")->required();
  ansatz_cmd->add_option("--curl-tol", ansatz_curl_tol,
                         "integrability tolerance (default: 1e-6 scaled by the gradient magnitude)");
  ansatz_cmd->callback([&]() { rc = run_ansatz(ansatz_input, ansatz_c, ansatz_out, ansatz_curl_tol); });

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "verify a profile against a construction and render the report");
  std::string verify_construction, verify_profile, verify_grid = "8", verify_format = "table";
  std::string verify_json, verify_obj, verify_obj_proj = "1,2,3";
  double verify_tol = 1e-10, verify_c = 1.0;
  std::uint64_t verify_seed = 0;
  int verify_obj_angles = 8;
  verify_cmd->add_option("--construction", verify_construction, "torus-sl-N | diagonal-so-N | torus-g2 | torus-spin7 | sp1")
      ->required();
  verify_cmd->add_option("--profile", verify_profile, "profile CSV path, or example-surface / example-cone")->required();
  verify_cmd->add_option("--grid", verify_grid, "group sample count, optionally ',comass samples' (default 8)");
  verify_cmd->add_option("--tol", verify_tol, "residual tolerance (default 1e-10)");
  verify_cmd->add_option("--seed", verify_seed, "sampling seed (default 0)");
  verify_cmd->add_option("--c", verify_c, "constant for the example-surface profile (default 1)");
  verify_cmd->add_option("--format", verify_format, "report format on stdout: table | json (default table)");
  verify_cmd->add_option("--json", verify_json, "also write the JSON report to this path");
  verify_cmd->add_option("--obj", verify_obj, "write an OBJ point cloud of the swept orbit to this path");
  verify_cmd->add_option("--obj-projection", verify_obj_proj, "three 1-based coordinate slots for the OBJ export (default 1,2,3)");
  verify_cmd->add_option("--obj-angles", verify_obj_angles, "grid points per group coordinate for the OBJ export (default 8)");
  verify_cmd->callback([&]() {
    rc = run_verify(verify_construction, verify_profile, verify_grid, verify_tol, verify_seed, verify_c, verify_format,
                    verify_json, verify_obj, verify_obj_proj, verify_obj_angles);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
