#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reachlab/reach.hpp"

namespace reachlab {

/// Discretization error terms added to continuity tolerances.
struct SlackBudget {
  double dedup = 0.0;        ///< r·sqrt(n): quantization of the two clouds compared
  double integration = 0.0;  ///< RK4 global error estimate (step-halving)
  double net = 0.0;          ///< omega-net mesh × t × max control gain on the cloud

  double total() const noexcept { return dedup + integration + net; }
};

/// Slack for comparing clouds built with `spec` on [0, t] over `omega`;
/// `cloud` supplies the states where the control gain is maximized.
SlackBudget estimate_slack(const ControlAffineSystem& system, std::span<const double> x0, double t,
                           const OmegaSet& omega, const ReachSpec& spec, const PointCloud& cloud);

enum class SweepKind { Omega, Time, State, Joint };

const char* sweep_kind_name(SweepKind kind);

struct SweepRow {
  double delta = 0.0;
  double rho_h = 0.0;
  double dir_ab = 0.0;  ///< directed distance perturbed → base
  double dir_ba = 0.0;  ///< directed distance base → perturbed
  double slack = 0.0;
  std::vector<double> extra;  ///< values for SweepReport::extra_columns
  SlackBudget terms;
};

/// Evidence table of one continuity experiment.
struct SweepReport {
  SweepKind kind = SweepKind::Omega;
  std::vector<std::string> extra_columns;
  std::vector<SweepRow> rows;          ///< sorted by delta ascending
  std::map<std::string, bool> verdicts;
  std::map<std::string, double> metrics;

  bool passed() const;
  double extra(const SweepRow& row, const std::string& column) const;
};

/// Recomputes the verdict flags and metrics from the rows alone.
void judge(SweepReport& report);

/// Perturbed ranges at Hausdorff distance <= delta: outward (inflation, or an
/// expanding homothety for hulls) and inward (shrinking homothety).
OmegaSet omega_outward(const OmegaSet& omega, double delta);
OmegaSet omega_inward(const OmegaSet& omega, double delta);

SweepReport sweep_omega(const ControlAffineSystem& system, std::span<const double> x0, double t,
                        const OmegaSet& omega, std::vector<double> deltas, const ReachSpec& spec);

SweepReport sweep_time(const ControlAffineSystem& system, std::span<const double> x0, double t,
                       std::vector<double> deltas, const OmegaSet& omega, const ReachSpec& spec);

SweepReport sweep_state(const ControlAffineSystem& system, double t, const OmegaSet& omega,
                        std::span<const double> x0, std::vector<double> deltas,
                        const ReachSpec& spec, int probes);

SweepReport joint_sweep(const ControlAffineSystem& system, std::span<const double> x0, double t,
                        const OmegaSet& omega, std::vector<double> deltas, const ReachSpec& spec,
                        std::uint64_t seed);

struct Extremum {
  double min_value = 0.0;
  Vector argmin;
  double max_value = 0.0;
  Vector argmax;
};

/// Exact extremes of J over the cloud; ties go to the lexicographically
/// smallest point.
Extremum extremize_functional(const Expr& functional, const PointCloud& cloud);

/// Checks cloud(omega_small) ⊂ N_slack(cloud(omega_large)). Throws
/// PreconditionError when the small range's net is not inside the large one.
bool monotonicity_check(const ControlAffineSystem& system, std::span<const double> x0, double t,
                        const OmegaSet& omega_small, const OmegaSet& omega_large,
                        const ReachSpec& spec);

/// `pieces` equal pieces on [0, horizon] alternating +amplitude·e_coord and
/// -amplitude·e_coord, starting positive; zero extension.
PiecewiseConstantControl square_wave(int pieces, double horizon, double amplitude, std::size_t m,
                                     std::size_t coordinate = 0);

struct ChatteringRow {
  int pieces = 0;
  double discrepancy = 0.0;        ///< weak-* distance to the zero control
  double endpoint_distance = 0.0;  ///< |phi(t,x,u_k) - phi(t,x,0)|
};

struct ChatteringStudy {
  std::vector<ChatteringRow> rows;
  bool discrepancy_nonincreasing = true;
  double min_shrink_ratio = 0.0;   ///< smallest d(k)/d(2k) over doublings
  bool endpoint_shrinks = true;    ///< every doubling shrinks by >= 1.5
};

/// Square-wave controls versus the zero control: weak-* discrepancy against
/// a dyadic dictionary and the distance between trajectory endpoints.
ChatteringStudy chattering_study(const ControlAffineSystem& system, std::span<const double> x0,
                                 double t, const OmegaSet& omega, std::vector<int> pieces,
                                 double amplitude, int dictionary_depth, double step);

}  // namespace reachlab
