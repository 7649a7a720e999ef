#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdnoma/config.hpp"
#include "fdnoma/matching.hpp"
#include "fdnoma/net_model.hpp"
#include "fdnoma/phy.hpp"
#include "fdnoma/power_opt.hpp"
#include "fdnoma/traffic_queues.hpp"

namespace fdnoma {

enum class Scheme { kProposed, kHdOma, kHdNoma, kFdOma, kUncoordinated };

inline constexpr std::array<Scheme, 5> kAllSchemes = {
    Scheme::kProposed, Scheme::kHdOma, Scheme::kHdNoma, Scheme::kFdOma, Scheme::kUncoordinated};

std::string_view to_string(Scheme scheme);
/// Throws std::invalid_argument for unknown names.
Scheme parse_scheme(std::string_view name);

/// Inputs of one scheduling decision. `gains` are this subframe's channels.
struct SchedulerContext {
  const ScenarioConfig& config;
  const NetworkTopology& topology;
  const GainTable& gains;
  const QueueState& queues;
  const LearnedInterference& learned;
};

struct SchedulerDecision {
  LinkAssignment assignment;
  PowerAllocation powers;
  int matching_rounds = 0;
  int matching_proposals = 0;
  bool matching_converged = true;
  int ccp_iterations = 0;
  bool ccp_warning = false;      // iteration cap reached
  bool ccp_infeasible = false;   // fell back to the matching powers
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual Scheme scheme() const = 0;
  virtual SchedulerDecision schedule(const SchedulerContext& ctx) = 0;
};

std::unique_ptr<Scheduler> make_scheduler(Scheme scheme);

/// Users whose nearest SBS is `sbs`, ascending.
std::vector<int> home_users(const NetworkTopology& topology, int sbs);

/// Fractions of the power budget for k NOMA users listed strongest first:
/// rank weights k, k-1, ..., 1 normalized, descending for UL and reversed
/// (weakest gets most) for DL.
std::vector<double> noma_power_fractions(int k, Direction direction);

/// Fixed powers for a matched cell: P_max for OMA (including FD pairs), the
/// rank fractions above for NOMA.
void assign_fixed_powers(const CellAssignment& cell, int sbs, const GainTable& gains,
                         const ScenarioConfig& config, PowerAllocation& powers);

/// True when every consecutive gain ratio of `users` (sorted by gain at
/// `sbs`) is at least `ratio`.
bool noma_groupable(std::span<const int> users, const GainTable& gains, int sbs, double ratio);

/// True when the mutual gain passes the FD pairing test.
bool fd_pairable(double mutual_gain, const ScenarioConfig& config);

/// Round-robin pointer over a cyclic list of candidates.
class RoundRobin {
 public:
  /// First index at or after the pointer (cyclically) accepted by `ok`, or
  /// nullopt. Does not move the pointer.
  template <typename Pred>
  std::optional<int> peek(int size, Pred ok) const {
    for (int i = 0; i < size; ++i) {
      const int idx = (pointer_ + i) % size;
      if (ok(idx)) return idx;
    }
    return std::nullopt;
  }
  void advance_past(int idx, int size) { pointer_ = size > 0 ? (idx + 1) % size : 0; }
  int pointer() const { return pointer_; }

 private:
  int pointer_ = 0;
};

}  // namespace fdnoma
