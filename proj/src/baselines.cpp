#include "fdnoma/baselines.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fdnoma {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kProposed: return "proposed";
    case Scheme::kHdOma: return "hd-oma";
    case Scheme::kHdNoma: return "hd-noma";
    case Scheme::kFdOma: return "fd-oma";
    case Scheme::kUncoordinated: return "uncoordinated";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes)
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected proposed, hd-oma, hd-noma, fd-oma or uncoordinated)");
}

std::vector<int> home_users(const NetworkTopology& topology, int sbs) {
  std::vector<int> out;
  for (int u = 0; u < topology.num_users(); ++u)
    if (topology.home_sbs[u] == sbs) out.push_back(u);
  return out;
}

std::vector<double> noma_power_fractions(int k, Direction direction) {
  std::vector<double> f(k);
  const double total = 0.5 * k * (k + 1);
  for (int i = 0; i < k; ++i) f[i] = (k - i) / total;
  if (direction == Direction::kDownlink) std::reverse(f.begin(), f.end());
  return f;
}

void assign_fixed_powers(const CellAssignment& cell, int sbs, const GainTable& gains,
                         const ScenarioConfig& config, PowerAllocation& powers) {
  for (Direction d : kDirections) {
    const auto& users = cell.users(d);
    const double budget = d == Direction::kUplink ? config.p_max_ul : config.p_max_dl;
    auto& out = d == Direction::kUplink ? powers.ul : powers.dl;
    if (users.size() == 1) {
      out[users[0]] = budget;
      continue;
    }
    const auto order = noma_decode_order(users, gains, sbs, d);
    const auto frac = noma_power_fractions(static_cast<int>(order.size()), d);
    for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = budget * frac[i];
  }
}

bool noma_groupable(std::span<const int> users, const GainTable& gains, int sbs, double ratio) {
  const auto order = noma_decode_order(users, gains, sbs, Direction::kDownlink);
  for (std::size_t i = 1; i < order.size(); ++i)
    if (gains.sbs_user(sbs, order[i - 1]) < ratio * gains.sbs_user(sbs, order[i])) return false;
  return true;
}

bool fd_pairable(double mutual_gain, const ScenarioConfig& config) {
  return config.fd_pair_above_threshold ? mutual_gain > config.fd_pair_gain_threshold
                                        : mutual_gain <= config.fd_pair_gain_threshold;
}

namespace {

bool has_backlog(const QueueState& q, int u, Direction d) { return q.traffic(d)[u] > 0; }

// Per-cell (user, direction) request list, UL block then DL block, so that
// consecutive turns rotate over users.
struct RequestList {
  std::vector<int> users;
  int size() const { return 2 * static_cast<int>(users.size()); }
  int user(int idx) const { return users[idx % users.size()]; }
  Direction direction(int idx) const {
    return idx < static_cast<int>(users.size()) ? Direction::kUplink : Direction::kDownlink;
  }
};

class HomeCellScheduler : public Scheduler {
 protected:
  void ensure_cells(const SchedulerContext& ctx) {
    if (!cells_.empty()) return;
    cells_.resize(ctx.topology.num_sbs());
    for (int b = 0; b < ctx.topology.num_sbs(); ++b) cells_[b].users = home_users(ctx.topology, b);
    rr_.resize(ctx.topology.num_sbs());
  }

  std::vector<RequestList> cells_;
  std::vector<RoundRobin> rr_;
};

class HdOmaScheduler : public HomeCellScheduler {
 public:
  Scheme scheme() const override { return Scheme::kHdOma; }

  SchedulerDecision schedule(const SchedulerContext& ctx) override {
    ensure_cells(ctx);
    SchedulerDecision out;
    out.assignment = LinkAssignment(ctx.topology.num_sbs());
    out.powers = PowerAllocation(ctx.topology.num_users());
    for (int b = 0; b < ctx.topology.num_sbs(); ++b) {
      const auto& req = cells_[b];
      const auto pick = rr_[b].peek(req.size(), [&](int i) {
        return has_backlog(ctx.queues, req.user(i), req.direction(i));
      });
      if (!pick) continue;
      rr_[b].advance_past(*pick, req.size());
      const int u = req.user(*pick);
      if (req.direction(*pick) == Direction::kUplink) {
        out.assignment.cells[b].ul = {u};
        out.powers.ul[u] = ctx.config.p_max_ul;
      } else {
        out.assignment.cells[b].dl = {u};
        out.powers.dl[u] = ctx.config.p_max_dl;
      }
    }
    return out;
  }
};

class HdNomaScheduler : public HomeCellScheduler {
 public:
  Scheme scheme() const override { return Scheme::kHdNoma; }

  SchedulerDecision schedule(const SchedulerContext& ctx) override {
    ensure_cells(ctx);
    if (dir_rr_.empty()) dir_rr_.resize(ctx.topology.num_sbs());
    SchedulerDecision out;
    out.assignment = LinkAssignment(ctx.topology.num_sbs());
    out.powers = PowerAllocation(ctx.topology.num_users());
    for (int b = 0; b < ctx.topology.num_sbs(); ++b) {
      const auto& users = cells_[b].users;
      const int n = static_cast<int>(users.size());
      Bits ul = 0, dl = 0;
      for (int u : users) {
        ul += ctx.queues.q_ul[u];
        dl += ctx.queues.q_dl[u];
      }
      if (ul == 0 && dl == 0) continue;
      const Direction d = ul >= dl ? Direction::kUplink : Direction::kDownlink;
      auto& rr = dir_rr_[b][d == Direction::kUplink ? 0 : 1];
      const auto head = rr.peek(n, [&](int i) { return has_backlog(ctx.queues, users[i], d); });
      rr.advance_past(*head, n);
      std::vector<int> group = {users[*head]};
      for (int i = 1; i < n && static_cast<int>(group.size()) < ctx.config.noma_quota; ++i) {
        const int v = users[(*head + i) % n];
        if (!has_backlog(ctx.queues, v, d)) continue;
        group.push_back(v);
        if (!noma_groupable(group, ctx.gains, b, ctx.config.noma_gain_ratio)) group.pop_back();
      }
      std::sort(group.begin(), group.end());
      auto& cell = out.assignment.cells[b];
      (d == Direction::kUplink ? cell.ul : cell.dl) = group;
      assign_fixed_powers(cell, b, ctx.gains, ctx.config, out.powers);
    }
    return out;
  }

 private:
  std::vector<std::array<RoundRobin, 2>> dir_rr_;
};

class FdOmaScheduler : public HomeCellScheduler {
 public:
  Scheme scheme() const override { return Scheme::kFdOma; }

  SchedulerDecision schedule(const SchedulerContext& ctx) override {
    ensure_cells(ctx);
    SchedulerDecision out;
    out.assignment = LinkAssignment(ctx.topology.num_sbs());
    out.powers = PowerAllocation(ctx.topology.num_users());
    for (int b = 0; b < ctx.topology.num_sbs(); ++b) {
      const auto& req = cells_[b];
      const auto pick = rr_[b].peek(req.size(), [&](int i) {
        return has_backlog(ctx.queues, req.user(i), req.direction(i));
      });
      if (!pick) continue;
      rr_[b].advance_past(*pick, req.size());
      const int u = req.user(*pick);
      const Direction d = req.direction(*pick);
      const Direction other = d == Direction::kUplink ? Direction::kDownlink : Direction::kUplink;
      const auto partner = rr_[b].peek(req.size(), [&](int i) {
        const int v = req.user(i);
        return req.direction(i) == other && v != u && has_backlog(ctx.queues, v, other) &&
               fd_pairable(ctx.gains.user_user(u, v), ctx.config);
      });
      auto& cell = out.assignment.cells[b];
      (d == Direction::kUplink ? cell.ul : cell.dl) = {u};
      if (partner) (other == Direction::kUplink ? cell.ul : cell.dl) = {req.user(*partner)};
      assign_fixed_powers(cell, b, ctx.gains, ctx.config, out.powers);
    }
    return out;
  }
};

class MatchingScheduler : public Scheduler {
 public:
  explicit MatchingScheduler(bool optimize) : optimize_(optimize) {}
  Scheme scheme() const override {
    return optimize_ ? Scheme::kProposed : Scheme::kUncoordinated;
  }

  SchedulerDecision schedule(const SchedulerContext& ctx) override {
    const auto match =
        run_matching(ctx.config, ctx.topology, ctx.gains, ctx.queues, ctx.learned);
    SchedulerDecision out;
    out.assignment = match.assignment;
    out.matching_rounds = match.rounds;
    out.matching_proposals = match.proposals;
    out.matching_converged = match.converged;
    const int num_users = ctx.topology.num_users();
    out.powers = PowerAllocation(num_users);
    if (!optimize_) {
      for (int b = 0; b < out.assignment.num_sbs(); ++b)
        assign_fixed_powers(out.assignment.cells[b], b, ctx.gains, ctx.config, out.powers);
      return out;
    }
    PowerAllocation guess(num_users);
    for (const auto& cell : out.assignment.cells) {
      const auto p = matching_powers(cell, ctx.config, num_users);
      for (int u : cell.ul) guess.ul[u] = p.ul[u];
      for (int u : cell.dl) guess.dl[u] = p.dl[u];
    }
    const auto problem = build_udpo(out.assignment, ctx.queues, ctx.gains,
                                    PhyParams::from(ctx.config), ctx.config);
    const auto ccp = run_ccp(problem, problem.from_allocation(guess), ccp_options(ctx.config));
    out.ccp_iterations = ccp.iterations;
    out.ccp_warning = ccp.hit_iteration_cap;
    out.ccp_infeasible = ccp.infeasible;
    out.powers = ccp.infeasible ? guess : problem.to_allocation(ccp.p, num_users);
    return out;
  }

 private:
  bool optimize_;
};

}  // namespace

std::unique_ptr<Scheduler> make_scheduler(Scheme scheme) {
  switch (scheme) {
    case Scheme::kProposed: return std::make_unique<MatchingScheduler>(true);
    case Scheme::kUncoordinated: return std::make_unique<MatchingScheduler>(false);
    case Scheme::kHdOma: return std::make_unique<HdOmaScheduler>();
    case Scheme::kHdNoma: return std::make_unique<HdNomaScheduler>();
    case Scheme::kFdOma: return std::make_unique<FdOmaScheduler>();
  }
  throw std::invalid_argument("unknown scheme");
}

}  // namespace fdnoma
