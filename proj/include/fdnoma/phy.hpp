#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fdnoma/config.hpp"
#include "fdnoma/direction.hpp"
#include "fdnoma/net_model.hpp"

namespace fdnoma {

enum class CellMode { kIdle, kHdOmaUl, kHdOmaDl, kHdNomaUl, kHdNomaDl, kFdOma };

std::string_view to_string(CellMode mode);

/// Users served by one SBS in each direction during a subframe.
struct CellAssignment {
  std::vector<int> ul;
  std::vector<int> dl;

  CellMode mode() const;
  bool idle() const { return ul.empty() && dl.empty(); }
  const std::vector<int>& users(Direction d) const { return d == Direction::kUplink ? ul : dl; }
};

/// Per-SBS served sets. Indicator x_bu^UL is `u in cells[b].ul`, likewise DL.
struct LinkAssignment {
  struct Serving {
    int sbs;
    Direction direction;
  };

  LinkAssignment() = default;
  explicit LinkAssignment(int num_sbs) : cells(num_sbs) {}

  int num_sbs() const { return static_cast<int>(cells.size()); }
  std::optional<Serving> serving(int user) const;

  /// Throws std::logic_error when a user is served twice, an SBS mixes FD with
  /// NOMA, or a direction exceeds the quota.
  void validate(int num_users, int quota) const;

  std::vector<CellAssignment> cells;
};

/// UL power per user and DL power per user (from its serving SBS), in watts.
/// Entries for unscheduled users are zero.
struct PowerAllocation {
  PowerAllocation() = default;
  explicit PowerAllocation(int num_users) : ul(num_users, 0.0), dl(num_users, 0.0) {}

  /// p_b^DL: the SBS's total DL power over its served DL users.
  double sbs_dl_total(const CellAssignment& cell) const;

  std::vector<double> ul;
  std::vector<double> dl;
};

struct PhyParams {
  double noise = 0.0;
  double si_cancellation = 1.0;
  double bandwidth = 0.0;

  static PhyParams from(const ScenarioConfig& config);
};

/// Interference terms seen by one receiver, in watts.
struct InterferenceBreakdown {
  double ul_ul = 0.0;
  double dl_ul = 0.0;
  double dl_dl = 0.0;
  double ul_dl = 0.0;
  double noma_ul = 0.0;
  double noma_dl = 0.0;
  double self_interference = 0.0;

  double total() const {
    return ul_ul + dl_ul + dl_dl + ul_dl + noma_ul + noma_dl + self_interference;
  }
};

struct SinrResult {
  double sinr = 0.0;
  double signal = 0.0;
  double noise = 0.0;
  InterferenceBreakdown interference;

  double denominator() const { return noise + interference.total(); }
};

/// Strength ranking of `users` at `sbs`: descending gain, ties by ascending
/// index. Both SIC orders derive from it: in DL a user suffers NOMA
/// interference from users ranked before it, in UL from users ranked after it.
std::vector<int> noma_decode_order(std::span<const int> users, const GainTable& gains, int sbs,
                                   Direction direction);

/// True when `a` ranks strictly before `b` in the strength order at `sbs`.
bool ranks_stronger(const GainTable& gains, int sbs, int a, int b);

/// Exact SINR of `user` served by `sbs` in `direction` under `assignment`.
SinrResult compute_sinr(const LinkAssignment& assignment, const PowerAllocation& powers,
                        const GainTable& gains, const PhyParams& phy, Direction direction, int sbs,
                        int user);

/// SIC margin Y for a DL NOMA pair: `decoder` (stronger) decoding the message
/// of `user` (weaker). Feasible iff margin >= 0.
struct SicMargin {
  int user = -1;
  int decoder = -1;
  double margin = 0.0;
};

std::vector<SicMargin> sic_feasibility(const LinkAssignment& assignment,
                                       const PowerAllocation& powers, const GainTable& gains,
                                       const PhyParams& phy, int sbs);

bool sic_feasible(std::span<const SicMargin> margins);

/// Shannon rate f_b log2(1 + sinr) in bits/second.
double service_rate(double sinr, double bandwidth);

/// Time-averaged inter-cell interference estimates per SBS receiver and per
/// user receiver, in watts.
struct LearnedInterference {
  LearnedInterference() = default;
  LearnedInterference(int num_sbs, int num_users) : sbs(num_sbs, 0.0), user(num_users, 0.0) {}

  std::vector<double> sbs;
  std::vector<double> user;
};

/// SINR with the inter-cell terms replaced by the learned estimates; the
/// intra-cell terms (NOMA, self-interference, own-cell UL-to-DL) are exact.
double estimated_sinr(const LinkAssignment& assignment, const PowerAllocation& powers,
                      const GainTable& gains, const PhyParams& phy,
                      const LearnedInterference& learned, int sbs, int user, Direction direction);

/// SIC margins computed with learned inter-cell interference.
std::vector<SicMargin> estimated_sic_margins(const LinkAssignment& assignment,
                                             const PowerAllocation& powers, const GainTable& gains,
                                             const PhyParams& phy,
                                             const LearnedInterference& learned, int sbs);

/// Realized inter-cell interference at each active receiver; nullopt for nodes
/// that were not receiving.
struct InterferenceMeasurement {
  std::vector<std::optional<double>> sbs;
  std::vector<std::optional<double>> user;
};

InterferenceMeasurement measure_inter_cell(const LinkAssignment& assignment,
                                           const PowerAllocation& powers, const GainTable& gains);

}  // namespace fdnoma
