#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fdnoma/config.hpp"
#include "fdnoma/net_model.hpp"
#include "fdnoma/phy.hpp"
#include "fdnoma/traffic_queues.hpp"

namespace fdnoma {

/// EWMA step per receiving node: est = nu * measured + (1 - nu) * prev. Nodes
/// without a measurement keep their previous estimate.
LearnedInterference update_learning(const LearnedInterference& prev,
                                    const InterferenceMeasurement& measured, double nu1,
                                    double nu2);

/// Per-subframe service in bits for a link at `sinr`.
double bits_per_subframe(double sinr, const ScenarioConfig& config);

/// Powers used while evaluating preferences: delta_ul per UL user and
/// delta_dl split equally over the cell's DL users.
PowerAllocation matching_powers(const CellAssignment& cell, const ScenarioConfig& config,
                                int num_users);

struct UserTerm {
  int user = -1;
  Direction direction = Direction::kUplink;
  double psi = 0.0;    // (Q + H) * estimated bits
  double omega = 0.0;  // Z_u^UL (delta_ul - p_u) for UL, 0 for DL
};

struct UtilityTerms {
  bool feasible = true;
  std::vector<UserTerm> users;
  double omega_dl = 0.0;  // Z_b^DL (delta_dl - p_b^DL)

  double total() const;
};

/// Estimated-utility terms of serving `cell` at `sbs` with the given powers.
/// `feasible` is false when the cell breaks the quota, mixes FD with NOMA,
/// repeats a user, or fails the estimated SIC check.
UtilityTerms utility_terms(const CellAssignment& cell, int sbs, const PowerAllocation& powers,
                           const QueueState& queues, const LearnedInterference& learned,
                           const GainTable& gains, const PhyParams& phy,
                           const ScenarioConfig& config);

/// Result of an SBS choosing among users.
struct CellChoice {
  CellAssignment cell;
  double value = 0.0;
};

/// Both sides' preferences for the deferred-acceptance run.
class PreferenceProfile {
 public:
  virtual ~PreferenceProfile() = default;
  virtual int num_sbs() const = 0;
  virtual int num_users() const = 0;
  /// Acceptable SBSs of `user`, most preferred first. Empty for users that do
  /// not take part.
  virtual std::vector<int> user_ranking(int user) const = 0;
  /// Best feasible configuration serving exactly `users` (sorted) at `sbs`.
  virtual std::optional<CellChoice> evaluate(int sbs, std::span<const int> users) const = 0;
  /// Most preferred non-empty subset of `proposers` (sorted) with its
  /// configuration. Ties prefer the smaller subset, then the
  /// lexicographically smaller one.
  virtual std::optional<CellChoice> choose(int sbs, std::span<const int> proposers) const;
};

/// SBS valuations from estimated utilities at the fixed matching powers; user
/// rankings from the lone-user estimated utilities over the covering SBSs.
class PhysicalPreferenceProfile : public PreferenceProfile {
 public:
  PhysicalPreferenceProfile(const ScenarioConfig& config, const NetworkTopology& topology,
                            const GainTable& gains, const QueueState& queues,
                            const LearnedInterference& learned);

  int num_sbs() const override { return gains_.num_sbs(); }
  int num_users() const override { return gains_.num_users(); }
  std::vector<int> user_ranking(int user) const override;
  std::optional<CellChoice> evaluate(int sbs, std::span<const int> users) const override;
  std::optional<CellChoice> choose(int sbs, std::span<const int> proposers) const override;

  /// Lone-user score sum over backlogged directions.
  double user_score(int user, int sbs) const;
  /// Value of one configuration, nullopt when infeasible.
  std::optional<double> value(int sbs, const CellAssignment& cell) const;
  bool backlogged(int user, Direction d) const;

 private:
  /// Every feasible configuration over `users`, restricted to gain-sorted
  /// prefixes for NOMA when there are many users.
  std::vector<CellAssignment> configurations(int sbs, std::span<const int> users,
                                             bool exact) const;

  const ScenarioConfig& config_;
  const NetworkTopology& topology_;
  const GainTable& gains_;
  const QueueState& queues_;
  const LearnedInterference& learned_;
  PhyParams phy_;
  std::vector<std::vector<int>> rankings_;
};

/// Above this many proposers NOMA candidates are limited to gain-sorted prefixes.
inline constexpr int kExhaustiveProposalLimit = 12;

struct MatchingEvent {
  int round = 0;
  int sbs = -1;
  std::vector<int> proposers;  // new this round
  std::vector<int> accepted;
  std::vector<int> rejected;
  std::vector<int> recalled;  // earlier proposers taken back from another SBS
};

struct MatchingOutcome {
  LinkAssignment assignment;
  std::vector<int> user_sbs;  // -1 when unmatched
  int rounds = 0;
  int proposals = 0;
  std::vector<int> proposals_per_sbs;
  std::vector<MatchingEvent> trace;
  bool converged = true;
};

/// Deferred acceptance: unmatched users propose to their best remaining SBS
/// and never propose to the same SBS twice. Each SBS keeps every proposal it
/// has received and holds the best subset of the proposers still willing to
/// join it (unmatched, already held, or held by an SBS they rank lower).
/// Stops when nobody proposes and no SBS changes its choice; at that point no
/// pair outside the matching blocks it.
MatchingOutcome deferred_acceptance(const PreferenceProfile& profile);

MatchingOutcome run_matching(const ScenarioConfig& config, const NetworkTopology& topology,
                             const GainTable& gains, const QueueState& queues,
                             const LearnedInterference& learned);

struct BlockingPair {
  int user = -1;
  int sbs = -1;
};

/// Nullopt when no pair (u, b) outside the matching has {u} + M_b preferred by
/// b over M_b and b preferred by u over its current SBS.
std::optional<BlockingPair> find_blocking_pair(const MatchingOutcome& outcome,
                                               const PreferenceProfile& profile);

bool verify_pairwise_stability(const MatchingOutcome& outcome, const PreferenceProfile& profile,
                               BlockingPair* witness = nullptr);

/// One JSON object per event.
void write_trace_jsonl(std::ostream& out, const MatchingOutcome& outcome);

}  // namespace fdnoma
