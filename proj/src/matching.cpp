#include "fdnoma/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include <json.hpp>

namespace fdnoma {

LearnedInterference update_learning(const LearnedInterference& prev,
                                    const InterferenceMeasurement& measured, double nu1,
                                    double nu2) {
  LearnedInterference next = prev;
  for (std::size_t b = 0; b < next.sbs.size() && b < measured.sbs.size(); ++b)
    if (measured.sbs[b]) next.sbs[b] = nu1 * *measured.sbs[b] + (1.0 - nu1) * prev.sbs[b];
  for (std::size_t u = 0; u < next.user.size() && u < measured.user.size(); ++u)
    if (measured.user[u]) next.user[u] = nu2 * *measured.user[u] + (1.0 - nu2) * prev.user[u];
  return next;
}

double bits_per_subframe(double sinr, const ScenarioConfig& config) {
  return service_rate(sinr, config.bandwidth) * config.subframe_duration;
}

PowerAllocation matching_powers(const CellAssignment& cell, const ScenarioConfig& config,
                                int num_users) {
  PowerAllocation p(num_users);
  for (int u : cell.ul) p.ul[u] = config.delta_ul;
  for (int u : cell.dl) p.dl[u] = config.delta_dl / static_cast<double>(cell.dl.size());
  return p;
}

double UtilityTerms::total() const {
  double sum = omega_dl;
  for (const auto& t : users) sum += t.psi + t.omega;
  return sum;
}

namespace {

bool structurally_valid(const CellAssignment& cell, int quota) {
  if (static_cast<int>(cell.ul.size()) > quota || static_cast<int>(cell.dl.size()) > quota)
    return false;
  if (cell.ul.size() * cell.dl.size() > 1) return false;
  std::vector<int> all(cell.ul);
  all.insert(all.end(), cell.dl.begin(), cell.dl.end());
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) == all.end();
}

}  // namespace

UtilityTerms utility_terms(const CellAssignment& cell, int sbs, const PowerAllocation& powers,
                           const QueueState& queues, const LearnedInterference& learned,
                           const GainTable& gains, const PhyParams& phy,
                           const ScenarioConfig& config) {
  UtilityTerms terms;
  if (!structurally_valid(cell, config.noma_quota)) {
    terms.feasible = false;
    return terms;
  }
  LinkAssignment local(gains.num_sbs());
  local.cells[sbs] = cell;
  for (Direction d : kDirections) {
    for (int u : cell.users(d)) {
      const double sinr = estimated_sinr(local, powers, gains, phy, learned, sbs, u, d);
      UserTerm t;
      t.user = u;
      t.direction = d;
      t.psi = queues.weight(u, d) * bits_per_subframe(sinr, config);
      if (d == Direction::kUplink) t.omega = queues.z_ul[u] * (config.delta_ul - powers.ul[u]);
      terms.users.push_back(t);
    }
  }
  terms.omega_dl = queues.z_dl[sbs] * (config.delta_dl - powers.sbs_dl_total(cell));
  if (cell.dl.size() > 1)
    terms.feasible = sic_feasible(estimated_sic_margins(local, powers, gains, phy, learned, sbs));
  return terms;
}

namespace {

// Strict preference between two candidate choices; see PreferenceProfile::choose.
bool better_choice(double value, std::span<const int> users, double best_value,
                   std::span<const int> best_users) {
  if (value != best_value) return value > best_value;
  if (users.size() != best_users.size()) return users.size() < best_users.size();
  return std::lexicographical_compare(users.begin(), users.end(), best_users.begin(),
                                      best_users.end());
}

std::vector<int> sorted_users(const CellAssignment& cell) {
  std::vector<int> all(cell.ul);
  all.insert(all.end(), cell.dl.begin(), cell.dl.end());
  std::sort(all.begin(), all.end());
  return all;
}

// Calls `fn` with every subset of `items` of size 1..max_size, in order of
// increasing size and lexicographic position.
template <typename Fn>
void for_each_subset(std::span<const int> items, int max_size, Fn fn) {
  const int n = static_cast<int>(items.size());
  std::vector<int> pick;
  for (int k = 1; k <= std::min(n, max_size); ++k) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      pick.clear();
      for (int i : idx) pick.push_back(items[i]);
      fn(pick);
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

}  // namespace

std::optional<CellChoice> PreferenceProfile::choose(int sbs,
                                                    std::span<const int> proposers) const {
  std::optional<CellChoice> best;
  std::vector<int> best_users;
  for_each_subset(proposers, static_cast<int>(proposers.size()), [&](const std::vector<int>& t) {
    auto c = evaluate(sbs, t);
    if (!c) return;
    if (!best || better_choice(c->value, t, best->value, best_users)) {
      best = std::move(c);
      best_users = t;
    }
  });
  return best;
}

PhysicalPreferenceProfile::PhysicalPreferenceProfile(const ScenarioConfig& config,
                                                     const NetworkTopology& topology,
                                                     const GainTable& gains,
                                                     const QueueState& queues,
                                                     const LearnedInterference& learned)
    : config_(config),
      topology_(topology),
      gains_(gains),
      queues_(queues),
      learned_(learned),
      phy_(PhyParams::from(config)) {
  rankings_.resize(num_users());
  for (int u = 0; u < num_users(); ++u) {
    if (!backlogged(u, Direction::kUplink) && !backlogged(u, Direction::kDownlink)) continue;
    std::vector<std::pair<double, int>> scored;
    for (int b : topology_.coverage[u]) scored.emplace_back(user_score(u, b), b);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (const auto& [score, b] : scored) rankings_[u].push_back(b);
  }
}

bool PhysicalPreferenceProfile::backlogged(int user, Direction d) const {
  return queues_.traffic(d)[user] > 0;
}

double PhysicalPreferenceProfile::user_score(int user, int sbs) const {
  double score = 0.0;
  for (Direction d : kDirections) {
    if (!backlogged(user, d)) continue;
    CellAssignment alone;
    (d == Direction::kUplink ? alone.ul : alone.dl).push_back(user);
    LinkAssignment local(num_sbs());
    local.cells[sbs] = alone;
    const auto p = matching_powers(alone, config_, num_users());
    const double sinr = estimated_sinr(local, p, gains_, phy_, learned_, sbs, user, d);
    score += queues_.weight(user, d) * bits_per_subframe(sinr, config_);
  }
  return score;
}

std::vector<int> PhysicalPreferenceProfile::user_ranking(int user) const {
  return rankings_.at(user);
}

std::optional<double> PhysicalPreferenceProfile::value(int sbs, const CellAssignment& cell) const {
  for (Direction d : kDirections)
    for (int u : cell.users(d))
      if (!backlogged(u, d)) return std::nullopt;
  const auto p = matching_powers(cell, config_, num_users());
  const auto terms =
      utility_terms(cell, sbs, p, queues_, learned_, gains_, phy_, config_);
  if (!terms.feasible) return std::nullopt;
  return terms.total();
}

std::vector<CellAssignment> PhysicalPreferenceProfile::configurations(
    int sbs, std::span<const int> users, bool exact) const {
  std::vector<CellAssignment> out;
  const int n = static_cast<int>(users.size());
  const int quota = config_.noma_quota;
  auto capable = [&](Direction d) {
    std::vector<int> c;
    for (int u : users)
      if (backlogged(u, d)) c.push_back(u);
    return c;
  };
  auto add_noma = [&](Direction d) {
    const auto c = capable(d);
    auto emit = [&](const std::vector<int>& set) {
      CellAssignment cell;
      (d == Direction::kUplink ? cell.ul : cell.dl) = set;
      out.push_back(std::move(cell));
    };
    if (exact) {
      if (static_cast<int>(c.size()) == n && n <= quota) emit(c);
      return;
    }
    if (n <= kExhaustiveProposalLimit) {
      for_each_subset(c, quota, emit);
      return;
    }
    for (int u : c) emit({u});
    std::vector<int> by_gain = c;
    std::sort(by_gain.begin(), by_gain.end(),
              [&](int a, int b) { return ranks_stronger(gains_, sbs, a, b); });
    for (int k = 2; k <= std::min<int>(quota, static_cast<int>(by_gain.size())); ++k) {
      std::vector<int> prefix(by_gain.begin(), by_gain.begin() + k);
      std::sort(prefix.begin(), prefix.end());
      emit(prefix);
    }
  };
  add_noma(Direction::kUplink);
  add_noma(Direction::kDownlink);
  if (!exact || n == 2) {
    for (int a : capable(Direction::kUplink))
      for (int b : capable(Direction::kDownlink))
        if (a != b) out.push_back(CellAssignment{{a}, {b}});
  }
  return out;
}

std::optional<CellChoice> PhysicalPreferenceProfile::evaluate(int sbs,
                                                              std::span<const int> users) const {
  std::optional<CellChoice> best;
  for (auto& cell : configurations(sbs, users, true)) {
    const auto v = value(sbs, cell);
    if (v && (!best || *v > best->value)) best = CellChoice{std::move(cell), *v};
  }
  return best;
}

std::optional<CellChoice> PhysicalPreferenceProfile::choose(
    int sbs, std::span<const int> proposers) const {
  std::optional<CellChoice> best;
  std::vector<int> best_users;
  for (auto& cell : configurations(sbs, proposers, false)) {
    const auto v = value(sbs, cell);
    if (!v) continue;
    const auto users = sorted_users(cell);
    if (!best || better_choice(*v, users, best->value, best_users)) {
      best = CellChoice{std::move(cell), *v};
      best_users = users;
    }
  }
  return best;
}

MatchingOutcome deferred_acceptance(const PreferenceProfile& profile) {
  const int num_sbs = profile.num_sbs();
  const int num_users = profile.num_users();
  MatchingOutcome out;
  out.assignment = LinkAssignment(num_sbs);
  out.user_sbs.assign(num_users, -1);
  out.proposals_per_sbs.assign(num_sbs, 0);

  std::vector<std::vector<int>> lists(num_users);
  std::vector<std::vector<int>> rank_of(num_users, std::vector<int>(num_sbs, -1));
  for (int u = 0; u < num_users; ++u) {
    lists[u] = profile.user_ranking(u);
    for (std::size_t i = 0; i < lists[u].size(); ++i) rank_of[u][lists[u][i]] = static_cast<int>(i);
  }
  std::vector<std::size_t> next(num_users, 0);
  // Every user that ever proposed to the SBS. An SBS may take back an earlier
  // proposer that currently sits at an SBS it ranks lower.
  std::vector<std::vector<int>> proposed(num_sbs);
  std::vector<std::vector<int>> held(num_sbs);

  auto available = [&](int b) {
    std::vector<int> pool;
    for (int u : proposed[b]) {
      const int at = out.user_sbs[u];
      if (at < 0 || at == b || rank_of[u][at] > rank_of[u][b]) pool.push_back(u);
    }
    return pool;
  };

  const int round_cap = 4 * std::max(1, num_users) * std::max(1, num_sbs) + 8;
  while (out.rounds < round_cap) {
    std::vector<std::vector<int>> incoming(num_sbs);
    for (int u = 0; u < num_users; ++u) {
      if (out.user_sbs[u] >= 0 || next[u] >= lists[u].size()) continue;
      const int b = lists[u][next[u]++];
      incoming[b].push_back(u);
      proposed[b].insert(std::upper_bound(proposed[b].begin(), proposed[b].end(), u), u);
      ++out.proposals;
      ++out.proposals_per_sbs[b];
    }
    bool changed = false;
    for (int b = 0; b < num_sbs; ++b) {
      const auto pool = available(b);
      std::optional<CellChoice> choice;
      if (pool.size() == 1) {
        // A lone proposer is always taken.
        choice = profile.evaluate(b, pool);
        if (!choice) choice = CellChoice{CellAssignment{pool, {}}, 0.0};
      } else if (!pool.empty()) {
        choice = profile.choose(b, pool);
      }
      const std::vector<int> accepted = choice ? sorted_users(choice->cell) : std::vector<int>{};
      const CellAssignment cell = choice ? choice->cell : CellAssignment{};
      const auto& current = out.assignment.cells[b];
      if (accepted == held[b] && incoming[b].empty() && cell.ul == current.ul &&
          cell.dl == current.dl)
        continue;

      MatchingEvent ev;
      ev.round = out.rounds + 1;
      ev.sbs = b;
      ev.proposers = incoming[b];
      ev.accepted = accepted;
      for (int u : held[b]) {
        if (std::binary_search(accepted.begin(), accepted.end(), u)) continue;
        out.user_sbs[u] = -1;
        ev.rejected.push_back(u);
      }
      for (int u : incoming[b])
        if (!std::binary_search(accepted.begin(), accepted.end(), u)) ev.rejected.push_back(u);
      for (int u : accepted) {
        const int from = out.user_sbs[u];
        if (from >= 0 && from != b) {
          auto& h = held[from];
          h.erase(std::find(h.begin(), h.end(), u));
          auto& cell = out.assignment.cells[from];
          std::erase(cell.ul, u);
          std::erase(cell.dl, u);
          ev.recalled.push_back(u);
        }
        out.user_sbs[u] = b;
      }
      changed = true;
      held[b] = accepted;
      out.assignment.cells[b] = cell;
      out.trace.push_back(std::move(ev));
    }
    const bool proposals_made =
        std::any_of(incoming.begin(), incoming.end(), [](const auto& v) { return !v.empty(); });
    if (!proposals_made && !changed) break;
    ++out.rounds;
  }
  out.converged = out.rounds < round_cap;
  return out;
}

MatchingOutcome run_matching(const ScenarioConfig& config, const NetworkTopology& topology,
                             const GainTable& gains, const QueueState& queues,
                             const LearnedInterference& learned) {
  PhysicalPreferenceProfile profile(config, topology, gains, queues, learned);
  return deferred_acceptance(profile);
}

std::optional<BlockingPair> find_blocking_pair(const MatchingOutcome& outcome,
                                               const PreferenceProfile& profile) {
  const int num_sbs = profile.num_sbs();
  std::vector<std::vector<int>> members(num_sbs);
  std::vector<std::optional<double>> current(num_sbs);
  for (int b = 0; b < num_sbs; ++b) {
    members[b] = sorted_users(outcome.assignment.cells[b]);
    if (members[b].empty()) continue;
    const auto c = profile.evaluate(b, members[b]);
    if (c) current[b] = c->value;
  }
  for (int u = 0; u < profile.num_users(); ++u) {
    const auto ranking = profile.user_ranking(u);
    const int mine = outcome.user_sbs[u];
    for (int b : ranking) {
      if (b == mine) break;  // the rest are ranked below the current match
      std::vector<int> joined = members[b];
      joined.insert(std::upper_bound(joined.begin(), joined.end(), u), u);
      const auto with_u = profile.evaluate(b, joined);
      if (!with_u) continue;
      // An empty SBS prefers any feasible set; otherwise strict improvement.
      if (members[b].empty() || !current[b] || with_u->value > *current[b])
        return BlockingPair{u, b};
    }
  }
  return std::nullopt;
}

bool verify_pairwise_stability(const MatchingOutcome& outcome, const PreferenceProfile& profile,
                               BlockingPair* witness) {
  const auto pair = find_blocking_pair(outcome, profile);
  if (pair && witness != nullptr) *witness = *pair;
  return !pair;
}

void write_trace_jsonl(std::ostream& out, const MatchingOutcome& outcome) {
  for (const auto& ev : outcome.trace) {
    nlohmann::json j = {{"round", ev.round},
                        {"sbs", ev.sbs},
                        {"proposers", ev.proposers},
                        {"accepted", ev.accepted},
                        {"rejected", ev.rejected},
                        {"recalled", ev.recalled}};
    out << j.dump() << '\n';
  }
}

}  // namespace fdnoma
