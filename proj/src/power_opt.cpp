#include "fdnoma/power_opt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace fdnoma {

Eigen::VectorXd UdpoProblem::from_allocation(const PowerAllocation& powers) const {
  Eigen::VectorXd p(size());
  for (int k = 0; k < size(); ++k) {
    const auto& v = vars[k];
    p[k] = v.direction == Direction::kUplink ? powers.ul[v.user] : powers.dl[v.user];
  }
  return p;
}

PowerAllocation UdpoProblem::to_allocation(const Eigen::VectorXd& p, int num_users) const {
  PowerAllocation out(num_users);
  for (int k = 0; k < size(); ++k) {
    const auto& v = vars[k];
    (v.direction == Direction::kUplink ? out.ul : out.dl)[v.user] = std::max(p[k], 0.0);
  }
  return out;
}

Eigen::VectorXd UdpoProblem::slack(const Eigen::VectorXd& p) const {
  return bound - constraint * p;
}

UdpoProblem build_udpo(const LinkAssignment& assignment, const QueueState& queues,
                       const GainTable& g, const PhyParams& phy, const ScenarioConfig& config) {
  UdpoProblem pr;
  std::map<std::pair<int, Direction>, int> index;
  for (int b = 0; b < assignment.num_sbs(); ++b) {
    for (Direction d : kDirections) {
      for (int u : assignment.cells[b].users(d)) {
        index[{u, d}] = static_cast<int>(pr.vars.size());
        pr.vars.push_back({u, b, d});
      }
    }
  }
  const int n = pr.size();
  const double rate_scale = config.bandwidth * config.subframe_duration / std::numbers::ln2;
  pr.noise = phy.noise;
  pr.coeff.resize(n);
  pr.signal_gain.resize(n);
  pr.interference = Eigen::MatrixXd::Zero(n, n);
  pr.power_cost.resize(n);
  pr.upper.resize(n);
  pr.omega_constant = 0.0;
  for (int b = 0; b < assignment.num_sbs(); ++b) pr.omega_constant += queues.z_dl[b] * config.delta_dl;

  for (int k = 0; k < n; ++k) {
    const auto [u, b, d] = pr.vars[k];
    pr.coeff[k] = queues.weight(u, d) * rate_scale;
    pr.signal_gain[k] = g.sbs_user(b, u);
    auto row = pr.interference.row(k);
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      const auto [v, c, dv] = pr.vars[j];
      if (d == Direction::kUplink) {
        if (dv == Direction::kUplink) {
          if (c != b || ranks_stronger(g, b, u, v)) row[j] = g.sbs_user(b, v);
        } else {
          row[j] = c != b ? g.sbs_sbs(c, b) : 1.0 / phy.si_cancellation;
        }
      } else {
        if (dv == Direction::kUplink) {
          row[j] = g.user_user(v, u);
        } else if (c != b) {
          row[j] = g.sbs_user(c, u);
        } else if (ranks_stronger(g, b, v, u)) {
          row[j] = g.sbs_user(b, u);
        }
      }
    }
    if (d == Direction::kUplink) {
      pr.power_cost[k] = queues.z_ul[u];
      pr.omega_constant += queues.z_ul[u] * config.delta_ul;
      pr.upper[k] = config.p_max_ul;
    } else {
      pr.power_cost[k] = queues.z_dl[b];
      pr.upper[k] = config.p_max_dl;
    }
  }

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> bounds;
  for (int k = 0; k < n; ++k) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    r[k] = -1.0;
    rows.push_back(r);
    bounds.push_back(0.0);
  }
  for (int k = 0; k < n; ++k) {
    if (pr.vars[k].direction != Direction::kUplink) continue;
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    r[k] = 1.0;
    rows.push_back(r);
    bounds.push_back(config.p_max_ul);
  }
  for (int b = 0; b < assignment.num_sbs(); ++b) {
    const auto& dl = assignment.cells[b].dl;
    if (dl.empty()) continue;
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    for (int u : dl) r[index.at({u, Direction::kDownlink})] = 1.0;
    rows.push_back(r);
    bounds.push_back(config.p_max_dl);
  }
  for (int b = 0; b < assignment.num_sbs(); ++b) {
    const auto& dl = assignment.cells[b].dl;
    for (int weak : dl) {
      for (int strong : dl) {
        if (strong == weak || !ranks_stronger(g, b, strong, weak)) continue;
        const int kw = index.at({weak, Direction::kDownlink});
        const int ks = index.at({strong, Direction::kDownlink});
        const double hw = g.sbs_user(b, weak);
        const double hs = g.sbs_user(b, strong);
        // hs (N0 + A_w p) - hw (N0 + s_s p_s + A_s p) >= 0
        Eigen::RowVectorXd r = -(hs * pr.interference.row(kw) - hw * pr.interference.row(ks));
        r[ks] += hw * pr.signal_gain[ks];
        double d = phy.noise * (hs - hw);
        const double scale = std::max(std::abs(d), r.cwiseAbs().maxCoeff() * pr.upper.maxCoeff());
        if (scale > 0.0) {
          r /= scale;
          d /= scale;
        }
        rows.push_back(r);
        bounds.push_back(d);
        ++pr.num_sic_rows;
      }
    }
  }
  pr.constraint.resize(static_cast<Eigen::Index>(rows.size()), n);
  pr.bound.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    pr.constraint.row(static_cast<Eigen::Index>(i)) = rows[i];
    pr.bound[static_cast<Eigen::Index>(i)] = bounds[i];
  }
  return pr;
}

double udpo_objective(const UdpoProblem& pr, const Eigen::VectorXd& p) {
  double total = pr.omega_constant - pr.power_cost.dot(p);
  for (int k = 0; k < pr.size(); ++k) {
    const double interference = pr.noise + pr.interference.row(k).dot(p);
    total += pr.coeff[k] * std::log1p(pr.signal_gain[k] * p[k] / interference);
  }
  return total;
}

double udpo_objective(const LinkAssignment& assignment, const PowerAllocation& powers,
                      const QueueState& queues, const GainTable& gains, const PhyParams& phy,
                      const ScenarioConfig& config) {
  double total = 0.0;
  for (int b = 0; b < assignment.num_sbs(); ++b) {
    const auto& cell = assignment.cells[b];
    for (Direction d : kDirections) {
      for (int u : cell.users(d)) {
        const double sinr = compute_sinr(assignment, powers, gains, phy, d, b, u).sinr;
        total += queues.weight(u, d) * service_rate(sinr, phy.bandwidth) * config.subframe_duration;
      }
    }
    for (int u : cell.ul) total += queues.z_ul[u] * (config.delta_ul - powers.ul[u]);
    total += queues.z_dl[b] * (config.delta_dl - powers.sbs_dl_total(cell));
  }
  return total;
}

DcSplit dc_split(const UdpoProblem& pr, const Eigen::VectorXd& p) {
  const int n = pr.size();
  DcSplit out;
  out.grad_f = Eigen::VectorXd::Zero(n);
  out.grad_g = Eigen::VectorXd::Zero(n);
  out.grad_omega = -pr.power_cost;
  out.omega = pr.omega_constant - pr.power_cost.dot(p);
  for (int k = 0; k < n; ++k) {
    const double interference = pr.noise + pr.interference.row(k).dot(p);
    const double total = interference + pr.signal_gain[k] * p[k];
    out.f += pr.coeff[k] * std::log(total);
    out.g -= pr.coeff[k] * std::log(interference);
    out.grad_f += (pr.coeff[k] / total) * pr.interference.row(k).transpose();
    out.grad_f[k] += pr.coeff[k] * pr.signal_gain[k] / total;
    out.grad_g -= (pr.coeff[k] / interference) * pr.interference.row(k).transpose();
  }
  return out;
}

AffineModel linearize_convex(const UdpoProblem& pr, const Eigen::VectorXd& reference) {
  const DcSplit dc = dc_split(pr, reference);
  return {reference, dc.g, dc.grad_g};
}

namespace {

double f_part(const UdpoProblem& pr, const Eigen::VectorXd& p) {
  double f = 0.0;
  for (int k = 0; k < pr.size(); ++k)
    f += pr.coeff[k] * std::log(pr.noise + pr.interference.row(k).dot(p) + pr.signal_gain[k] * p[k]);
  return f;
}

}  // namespace

double surrogate_objective(const UdpoProblem& pr, const AffineModel& tangent,
                           const Eigen::VectorXd& p) {
  return f_part(pr, p) + tangent(p) + pr.omega_constant - pr.power_cost.dot(p);
}

namespace {

bool strictly_feasible(const UdpoProblem& pr, const Eigen::VectorXd& p) {
  return (pr.slack(p).array() > 0.0).all();
}

double objective_scale(const UdpoProblem& pr) {
  const double s = pr.coeff.cwiseAbs().sum() + pr.power_cost.cwiseAbs().dot(pr.upper);
  return s > 0.0 ? s : 1.0;
}

}  // namespace

InnerResult solve_inner_convex(const UdpoProblem& pr, const AffineModel& tangent,
                               const Eigen::VectorXd& start, const BarrierOptions& opt) {
  const int n = pr.size();
  InnerResult res;
  res.p = start;
  if (n == 0) {
    res.surrogate = surrogate_objective(pr, tangent, start);
    res.converged = true;
    return res;
  }
  const double scale = objective_scale(pr);
  const double m = static_cast<double>(pr.bound.size());
  // Linear part of the surrogate: tangent gradient and power costs.
  const Eigen::VectorXd linear = tangent.gradient - pr.power_cost;

  auto phi = [&](const Eigen::VectorXd& p, double t, bool& ok) {
    const Eigen::VectorXd s = pr.slack(p);
    ok = (s.array() > 0.0).all();
    if (!ok) return 0.0;
    const double value = f_part(pr, p) + linear.dot(p);
    return -t * value / scale - s.array().log().sum();
  };

  double t = opt.t0;
  Eigen::VectorXd p = start;
  while (true) {
    for (int step = 0; step < opt.max_newton_steps; ++step) {
      Eigen::VectorXd grad = -linear;
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
      for (int k = 0; k < n; ++k) {
        Eigen::VectorXd e = pr.interference.row(k).transpose();
        e[k] += pr.signal_gain[k];
        const double den = pr.noise + e.dot(p);
        grad -= (pr.coeff[k] / den) * e;
        hess += (pr.coeff[k] / (den * den)) * e * e.transpose();
      }
      grad *= t / scale;
      hess *= t / scale;
      const Eigen::VectorXd s = pr.slack(p);
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        const Eigen::VectorXd c = pr.constraint.row(i).transpose();
        grad += c / s[i];
        hess += (c * c.transpose()) / (s[i] * s[i]);
      }
      const Eigen::VectorXd dir = hess.ldlt().solve(-grad);
      const double decrement = -grad.dot(dir);
      ++res.newton_steps;
      if (!(decrement > 2.0 * opt.newton_tolerance)) break;

      bool ok = false;
      const double base = phi(p, t, ok);
      double step_len = 1.0;
      for (int ls = 0; ls < 80; ++ls) {
        const Eigen::VectorXd trial = p + step_len * dir;
        const double val = phi(trial, t, ok);
        if (ok && val <= base - 0.25 * step_len * decrement) break;
        step_len *= 0.5;
      }
      const Eigen::VectorXd trial = p + step_len * dir;
      phi(trial, t, ok);
      if (!ok || trial == p) break;
      p = trial;
    }
    if (m / t < opt.gap_tolerance) break;
    t *= opt.mu;
  }
  res.p = p;
  res.surrogate = surrogate_objective(pr, tangent, p);
  res.duality_gap = m / t * scale;
  res.converged = true;
  return res;
}

std::optional<Eigen::VectorXd> find_feasible_start(const UdpoProblem& pr,
                                                   const Eigen::VectorXd& guess) {
  Eigen::VectorXd p = guess;
  for (int i = 0; i <= 10; ++i) {
    if (strictly_feasible(pr, p)) return p;
    p *= 0.5;
  }
  // Near-zero powers; strictly inside whenever each SIC pair has distinct gains.
  p = 1e-6 * pr.upper / std::max(1, pr.size());
  if (strictly_feasible(pr, p)) return p;
  return std::nullopt;
}

CcpResult run_ccp(const UdpoProblem& pr, const Eigen::VectorXd& guess, const CcpOptions& opt) {
  CcpResult res;
  const auto start = find_feasible_start(pr, guess);
  if (!start) {
    res.p = guess;
    res.infeasible = true;
    return res;
  }
  Eigen::VectorXd p = *start;
  double f = udpo_objective(pr, p);
  res.objective_trace.push_back(f);
  const double threshold = opt.relative_tolerance * std::abs(f);
  while (true) {
    if (res.iterations >= opt.max_iterations) {
      res.hit_iteration_cap = true;
      break;
    }
    ++res.iterations;
    const AffineModel tangent = linearize_convex(pr, p);
    const InnerResult inner = solve_inner_convex(pr, tangent, p, opt.barrier);
    const double f_next = udpo_objective(pr, inner.p);
    if (!(f_next >= f)) break;
    p = inner.p;
    res.objective_trace.push_back(f_next);
    const double improvement = f_next - f;
    f = f_next;
    if (improvement <= threshold) break;
  }
  res.p = p;
  return res;
}

CcpOptions ccp_options(const ScenarioConfig& config) {
  CcpOptions opt;
  opt.max_iterations = config.ccp_max_iterations;
  opt.relative_tolerance = config.ccp_relative_tolerance;
  return opt;
}

}  // namespace fdnoma
