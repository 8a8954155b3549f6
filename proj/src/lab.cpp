#include "reachlab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace reachlab {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> sorted_deltas(std::vector<double> deltas) {
  if (deltas.empty()) throw PreconditionError("sweep needs at least one delta");
  for (double d : deltas) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw PreconditionError("deltas must be finite and >= 0");
  }
  std::sort(deltas.begin(), deltas.end());
  return deltas;
}

// Shares the switching grid across horizons so clouds for nearby times nest.
ReachSpec with_fixed_pieces(const ReachSpec& spec, double t) {
  ReachSpec s = spec;
  if (s.piece_duration <= 0.0) s.piece_duration = t / s.switches;
  return s;
}

void fill_distances(SweepRow& row, const PointCloud& perturbed, const PointCloud& base) {
  const double ab = directed_hausdorff(perturbed, base);
  const double ba = directed_hausdorff(base, perturbed);
  row.dir_ab = std::max(row.dir_ab, ab);
  row.dir_ba = std::max(row.dir_ba, ba);
  row.rho_h = std::max(row.rho_h, std::max(ab, ba));
}

SlackBudget max_budget(const SlackBudget& a, const SlackBudget& b) {
  return {std::max(a.dedup, b.dedup), std::max(a.integration, b.integration),
          std::max(a.net, b.net)};
}

void set_slack(SweepRow& row, const SlackBudget& terms) {
  row.terms = terms;
  row.slack = terms.total();
}

void verify_perturbation(const OmegaSet& base, const OmegaSet& perturbed, double delta) {
  const double d = omega_hausdorff(base, perturbed);
  if (d > delta * (1.0 + 1e-9) + 1e-12) {
    throw PreconditionError("perturbed control range is at Hausdorff distance " + std::to_string(d) +
                            " > delta " + std::to_string(delta));
  }
}

// Rows sorted ascending: distances may not grow as delta shrinks.
bool monotone_rows(const std::vector<SweepRow>& rows) {
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i].rho_h > rows[i + 1].rho_h + rows[i].slack) return false;
  }
  return true;
}

}  // namespace

const char* sweep_kind_name(SweepKind kind) {
  switch (kind) {
    case SweepKind::Omega: return "omega";
    case SweepKind::Time: return "time";
    case SweepKind::State: return "state";
    case SweepKind::Joint: return "joint";
  }
  return "?";
}

bool SweepReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& kv) { return kv.second; });
}

double SweepReport::extra(const SweepRow& row, const std::string& column) const {
  for (std::size_t i = 0; i < extra_columns.size(); ++i) {
    if (extra_columns[i] == column) return row.extra.at(i);
  }
  throw PreconditionError("report has no column '" + column + "'");
}

void judge(SweepReport& report) {
  report.verdicts.clear();
  report.metrics.clear();
  const auto& rows = report.rows;
  bool nonnegative = true;
  bool sorted = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    nonnegative = nonnegative && r.rho_h >= 0.0 && r.dir_ab >= 0.0 && r.dir_ba >= 0.0 && r.slack >= 0.0;
    if (i > 0) sorted = sorted && rows[i - 1].delta <= r.delta;
  }
  report.verdicts["well_formed"] = nonnegative && sorted && !rows.empty();
  if (rows.empty()) return;

  switch (report.kind) {
    case SweepKind::Omega: {
      report.verdicts["monotone"] = monotone_rows(rows);
      double constant = 0.0;
      const std::size_t from = rows.size() > 1 ? 1 : 0;
      for (std::size_t i = from; i < rows.size(); ++i) {
        if (rows[i].delta > 0.0) constant = std::max(constant, rows[i].rho_h / rows[i].delta);
      }
      report.metrics["empirical_constant"] = constant;
      report.verdicts["modulus"] = rows.front().rho_h <= constant * rows.front().delta + rows.front().slack;
      break;
    }
    case SweepKind::Time: {
      report.verdicts["monotone"] = monotone_rows(rows);
      bool bounded = true, nested = true;
      double speed = 0.0;
      for (const auto& r : rows) {
        const double v = report.extra(r, "speed");
        speed = std::max(speed, v);
        bounded = bounded && r.rho_h <= v * r.delta + r.slack;
        nested = nested && report.extra(r, "nest") <= report.extra(r, "resolution");
      }
      report.metrics["max_speed"] = speed;
      report.verdicts["speed_bound"] = bounded;
      report.verdicts["nested"] = nested;
      break;
    }
    case SweepKind::State: {
      report.verdicts["monotone"] = monotone_rows(rows);
      double constant = 0.0;
      for (const auto& r : rows) {
        if (r.delta > 0.0) constant = std::max(constant, r.rho_h / r.delta);
      }
      report.metrics["empirical_constant"] = constant;
      break;
    }
    case SweepKind::Joint: {
      double violations = 0.0;
      for (const auto& r : rows) {
        const double sum = report.extra(r, "rho_x") + report.extra(r, "rho_omega") + report.extra(r, "rho_t");
        if (r.rho_h > sum + r.slack) violations += 1.0;
      }
      report.metrics["violations"] = violations;
      report.verdicts["triangle"] = violations == 0.0;
      break;
    }
  }
}

SlackBudget estimate_slack(const ControlAffineSystem& system, std::span<const double> x0, double t,
                           const OmegaSet& omega, const ReachSpec& spec, const PointCloud& cloud) {
  SlackBudget s;
  s.dedup = spec.resolution * std::sqrt(static_cast<double>(system.state_dim()));

  // Step-halving estimate along constant controls drawn from the net.
  const auto net = omega_net(omega, spec.value_resolution, true);
  const std::size_t probes = std::min<std::size_t>(net.size(), 16);
  const double h = std::min(spec.step, t);
  for (std::size_t i = 0; i < probes; ++i) {
    const auto& c = net[i * net.size() / probes];
    const auto u = PiecewiseConstantControl::constant(c, t);
    const Vector coarse = flow_endpoint(system, x0, u, t, h);
    const Vector fine = flow_endpoint(system, x0, u, t, h / 2.0);
    s.integration = std::max(s.integration, distance(coarse, fine) * 16.0 / 15.0);
  }

  double gain = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) gain = std::max(gain, system.control_gain(cloud.point(i)));
  s.net = omega_net_mesh(omega, spec.value_resolution) * t * gain;
  return s;
}

OmegaSet omega_outward(const OmegaSet& omega, double delta) {
  if (std::holds_alternative<Box>(omega.shape())) {
    return omega_inflate(omega, delta / std::sqrt(static_cast<double>(omega.dim())));
  }
  if (std::holds_alternative<Ball>(omega.shape())) return omega_inflate(omega, delta);
  const double radius = omega.radius_about_center();
  if (radius == 0.0) return OmegaSet::ball(omega.center(), delta);
  return omega_homothety(omega, 1.0 + delta / radius);
}

OmegaSet omega_inward(const OmegaSet& omega, double delta) { return omega_shrink(omega, delta); }

SweepReport sweep_omega(const ControlAffineSystem& system, std::span<const double> x0, double t,
                        const OmegaSet& omega, std::vector<double> deltas, const ReachSpec& spec) {
  deltas = sorted_deltas(std::move(deltas));
  SweepReport report;
  report.kind = SweepKind::Omega;
  report.extra_columns = {"rho_out", "rho_in", "d_omega"};
  const PointCloud base = reachable_cloud(system, x0, t, omega, spec);
  for (double delta : deltas) {
    const OmegaSet outer = omega_outward(omega, delta);
    const OmegaSet inner = omega_inward(omega, delta);
    verify_perturbation(omega, outer, delta);
    verify_perturbation(omega, inner, delta);
    const PointCloud out_cloud = reachable_cloud(system, x0, t, outer, spec);
    const PointCloud in_cloud = reachable_cloud(system, x0, t, inner, spec);

    SweepRow row;
    row.delta = delta;
    fill_distances(row, out_cloud, base);
    fill_distances(row, in_cloud, base);
    set_slack(row, estimate_slack(system, x0, t, outer, spec, out_cloud));
    row.extra = {hausdorff(out_cloud, base), hausdorff(in_cloud, base),
                 std::max(omega_hausdorff(omega, outer), omega_hausdorff(omega, inner))};
    report.rows.push_back(std::move(row));
  }
  judge(report);
  return report;
}

SweepReport sweep_time(const ControlAffineSystem& system, std::span<const double> x0, double t,
                       std::vector<double> deltas, const OmegaSet& omega, const ReachSpec& spec) {
  deltas = sorted_deltas(std::move(deltas));
  const ReachSpec fixed = with_fixed_pieces(spec, t);
  const auto net = omega_net(omega, spec.value_resolution, true);
  SweepReport report;
  report.kind = SweepKind::Time;
  report.extra_columns = {"speed", "nest", "resolution"};
  const PointCloud base = reachable_cloud(system, x0, t, omega, fixed);
  const SlackBudget base_slack = estimate_slack(system, x0, t, omega, fixed, base);
  for (double delta : deltas) {
    SweepRow row;
    row.delta = delta;
    double nest = 0.0;
    SlackBudget terms = base_slack;
    if (delta > 0.0) {
      const PointCloud later = reachable_cloud(system, x0, t + delta, omega, fixed);
      fill_distances(row, later, base);
      nest = std::max(nest, directed_hausdorff(base, later));
      terms = max_budget(terms, estimate_slack(system, x0, t + delta, omega, fixed, later));

      double speed = 0.0;
      Vector f(system.state_dim());
      for (std::size_t i = 0; i < later.size(); ++i) {
        for (const auto& c : net) {
          system.rhs(later.point(i), c, f);
          speed = std::max(speed, norm(f));
        }
      }
      row.extra = {speed, 0.0, fixed.resolution};
      if (delta < t) {
        const PointCloud earlier = reachable_cloud(system, x0, t - delta, omega, fixed);
        fill_distances(row, earlier, base);
        nest = std::max(nest, directed_hausdorff(earlier, base));
      }
    } else {
      row.extra = {0.0, 0.0, fixed.resolution};
    }
    row.extra[1] = nest;
    set_slack(row, terms);
    report.rows.push_back(std::move(row));
  }
  judge(report);
  return report;
}

SweepReport sweep_state(const ControlAffineSystem& system, double t, const OmegaSet& omega,
                        std::span<const double> x0, std::vector<double> deltas,
                        const ReachSpec& spec, int probes) {
  deltas = sorted_deltas(std::move(deltas));
  if (probes < 1) throw PreconditionError("sweep_state: probes must be at least 1");
  const auto directions = direction_net(system.state_dim(), static_cast<std::size_t>(probes));
  SweepReport report;
  report.kind = SweepKind::State;
  report.extra_columns = {"probes"};
  const PointCloud base = reachable_cloud(system, x0, t, omega, spec);
  const SlackBudget base_slack = estimate_slack(system, x0, t, omega, spec, base);
  for (double delta : deltas) {
    SweepRow row;
    row.delta = delta;
    SlackBudget terms = base_slack;
    for (const auto& d : directions) {
      Vector y(x0.begin(), x0.end());
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += delta * d[i];
      const PointCloud moved = reachable_cloud(system, y, t, omega, spec);
      fill_distances(row, moved, base);
      terms = max_budget(terms, estimate_slack(system, y, t, omega, spec, moved));
    }
    set_slack(row, terms);
    row.extra = {static_cast<double>(directions.size())};
    report.rows.push_back(std::move(row));
  }
  judge(report);
  return report;
}

SweepReport joint_sweep(const ControlAffineSystem& system, std::span<const double> x0, double t,
                        const OmegaSet& omega, std::vector<double> deltas, const ReachSpec& spec,
                        std::uint64_t seed) {
  deltas = sorted_deltas(std::move(deltas));
  const ReachSpec fixed = with_fixed_pieces(spec, t);
  const auto directions = direction_net(system.state_dim(), 64);
  SweepReport report;
  report.kind = SweepKind::Joint;
  report.extra_columns = {"rho_x", "rho_omega", "rho_t", "t_shift", "omega_out"};
  const PointCloud base = reachable_cloud(system, x0, t, omega, fixed);
  for (std::size_t row_index = 0; row_index < deltas.size(); ++row_index) {
    const double delta = deltas[row_index];
    // Each row draws from its own stream, so rows are schedule independent.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(row_index)};
    std::mt19937_64 rng(seq);
    const bool later = (rng() & 1U) != 0U || delta >= t;
    const Vector& dir = directions[rng() % directions.size()];
    const bool outward = (rng() & 1U) != 0U;

    const double t2 = later ? t + delta : t - delta;
    Vector y(x0.begin(), x0.end());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += delta * dir[i];
    const OmegaSet omega2 = outward ? omega_outward(omega, delta) : omega_inward(omega, delta);
    verify_perturbation(omega, omega2, delta);

    const PointCloud all = reachable_cloud(system, y, t2, omega2, fixed);      // (t', x', Ω')
    const PointCloud no_x = reachable_cloud(system, x0, t2, omega2, fixed);    // (t', x, Ω')
    const PointCloud only_t = reachable_cloud(system, x0, t2, omega, fixed);   // (t', x, Ω)

    SweepRow row;
    row.delta = delta;
    fill_distances(row, all, base);
    const double rho_x = hausdorff(all, no_x);
    const double rho_omega = hausdorff(no_x, only_t);
    const double rho_t = hausdorff(only_t, base);
    row.extra = {rho_x, rho_omega, rho_t, t2 - t, outward ? 1.0 : 0.0};
    SlackBudget terms = estimate_slack(system, y, t2, omega2, fixed, all);
    terms = max_budget(terms, estimate_slack(system, x0, t, omega, fixed, base));
    set_slack(row, terms);
    report.rows.push_back(std::move(row));
  }
  judge(report);
  return report;
}

Extremum extremize_functional(const Expr& functional, const PointCloud& cloud) {
  if (functional.variables().size() > cloud.dim()) {
    throw DimensionError("functional references more variables than the state dimension");
  }
  auto lex_less = [](std::span<const double> a, std::span<const double> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::size_t arg_min = 0, arg_max = 0;
  double lo = functional.eval(cloud.point(0));
  double hi = lo;
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    const double v = functional.eval(p);
    if (v < lo || (v == lo && lex_less(p, cloud.point(arg_min)))) {
      lo = v;
      arg_min = i;
    }
    if (v > hi || (v == hi && lex_less(p, cloud.point(arg_max)))) {
      hi = v;
      arg_max = i;
    }
  }
  const auto pmin = cloud.point(arg_min);
  const auto pmax = cloud.point(arg_max);
  return {lo, Vector(pmin.begin(), pmin.end()), hi, Vector(pmax.begin(), pmax.end())};
}

bool monotonicity_check(const ControlAffineSystem& system, std::span<const double> x0, double t,
                        const OmegaSet& omega_small, const OmegaSet& omega_large,
                        const ReachSpec& spec) {
  for (const auto& p : omega_net(omega_small, spec.value_resolution, true)) {
    if (!omega_contains(omega_large, p, 1e-9)) {
      throw PreconditionError("monotonicity_check: the first control range is not contained in the second");
    }
  }
  const PointCloud small = reachable_cloud(system, x0, t, omega_small, spec);
  const PointCloud large = reachable_cloud(system, x0, t, omega_large, spec);
  const SlackBudget slack = estimate_slack(system, x0, t, omega_large, spec, large);
  return within_neighborhood(small, large, slack.total());
}

PiecewiseConstantControl square_wave(int pieces, double horizon, double amplitude, std::size_t m,
                                     std::size_t coordinate) {
  if (pieces < 1) throw PreconditionError("square_wave: need at least one piece");
  if (!(horizon > 0.0)) throw PreconditionError("square_wave: horizon must be positive");
  if (coordinate >= m) throw DimensionError("square_wave: coordinate out of range");
  std::vector<double> bps(static_cast<std::size_t>(pieces) + 1);
  std::vector<Vector> values;
  for (int i = 0; i <= pieces; ++i) {
    bps[static_cast<std::size_t>(i)] = i == pieces ? horizon : horizon * i / pieces;
  }
  for (int i = 0; i < pieces; ++i) {
    Vector v(m, 0.0);
    v[coordinate] = i % 2 == 0 ? amplitude : -amplitude;
    values.push_back(std::move(v));
  }
  return PiecewiseConstantControl(std::move(bps), std::move(values), Vector(m, 0.0));
}

ChatteringStudy chattering_study(const ControlAffineSystem& system, std::span<const double> x0,
                                 double t, const OmegaSet& omega, std::vector<int> pieces,
                                 double amplitude, int dictionary_depth, double step) {
  if (pieces.empty()) throw PreconditionError("chattering_study: need at least one square wave");
  std::sort(pieces.begin(), pieces.end());
  const std::size_t m = system.control_dim();
  const auto zero = PiecewiseConstantControl::constant(Vector(m, 0.0), t);
  if (!zero.admissible(omega)) throw PreconditionError("chattering_study: zero control is not in omega");
  const auto dict = dyadic_dictionary(m, t, dictionary_depth);
  const Vector reference = flow_endpoint(system, x0, zero, t, step);

  ChatteringStudy study;
  for (int k : pieces) {
    const auto u = square_wave(k, t, amplitude, m);
    if (!u.admissible(omega)) {
      throw PreconditionError("chattering_study: square wave amplitude leaves omega");
    }
    ChatteringRow row;
    row.pieces = k;
    row.discrepancy = weak_star_discrepancy(u, zero, dict);
    row.endpoint_distance = distance(flow_endpoint(system, x0, u, t, step), reference);
    study.rows.push_back(row);
  }
  study.min_shrink_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < study.rows.size(); ++i) {
    const auto& a = study.rows[i];
    const auto& b = study.rows[i + 1];
    study.discrepancy_nonincreasing = study.discrepancy_nonincreasing && b.discrepancy <= a.discrepancy;
    if (b.pieces == 2 * a.pieces) {
      const double ratio = b.endpoint_distance > 0.0 ? a.endpoint_distance / b.endpoint_distance
                                                     : std::numeric_limits<double>::infinity();
      study.min_shrink_ratio = std::min(study.min_shrink_ratio, ratio);
      study.endpoint_shrinks = study.endpoint_shrinks && ratio >= 1.5;
    }
  }
  if (!std::isfinite(study.min_shrink_ratio)) study.min_shrink_ratio = 0.0;
  return study;
}

}  // namespace reachlab
