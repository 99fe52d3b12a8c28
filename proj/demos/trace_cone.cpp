// Integrates the quaternionic profile flow toward the cone, prints telemetry,
// then verifies the exact cone curve through the harness.

#include <calibron/harness.hpp>
#include <calibron/solvers.hpp>

#include <cmath>
#include <cstdio>
#include <vector>

namespace solvers = calibron::solvers;
namespace harness = calibron::harness;
namespace orbits = calibron::orbits;

int main() {
  // A profile with k = F (5G^2 - 4F)^4 > 0 flows along unit-speed arcs; the
  // conserved value and the direction of v are telemetry.
  const solvers::Sp1State start({0.6, 0.8, 0.0}, 1.0);
  const solvers::Trajectory traj = solvers::sp1_integrate(start, 2.0, 1e-3);

  std::printf("flow from u=%g, |v|=%g  (k = %.12g)\n", start.u, std::sqrt(start.F), start.k);
  std::printf("%8s %12s %12s %14s\n", "t", "u", "|v|", "k drift");
  for (std::size_t i = 0; i < traj.states.size(); i += traj.states.size() / 8) {
    const auto& [t, s] = traj.states[i];
    std::printf("%8.3f %12.6f %12.6f %14.3e\n", t, s.u, std::sqrt(s.F), std::fabs(s.k / start.k - 1.0));
  }
  std::printf("max drifts: conserved %.3e, arc %.3e, direction %.3e%s\n\n", traj.conserved_drift,
              traj.arc_length_drift, traj.direction_drift, traj.conical ? " (stopped at the apex)" : "");

  // The k = 0 member is the exact cone over a distinguished 3-sphere orbit:
  // alpha(u) = u (c, e) with |c|^2 = 5/4.  Verify it as a coassociative.
  std::vector<double> u;
  for (int i = 0; i < 60; ++i) u.push_back(0.2 + 1.8 * i / 59.0);
  const auto jets = solvers::sp1_cone({1.0, 0.5, 0.0}, u);

  harness::SamplingSpec spec;
  spec.group_samples = 8;
  spec.comass_samples = 256;
  const harness::VerificationReport report = harness::verify(orbits::Sp1{}, jets, spec, 1e-10, 2024);
  std::fputs(harness::report_render(report, harness::ReportFormat::table).c_str(), stdout);
  return report.verdict == harness::Verdict::pass ? 0 : 1;
}
