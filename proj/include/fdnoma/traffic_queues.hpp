#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "fdnoma/config.hpp"
#include "fdnoma/direction.hpp"
#include "fdnoma/rng.hpp"

namespace fdnoma {

/// Traffic is counted in whole bits so that queue bookkeeping is exact.
using Bits = std::int64_t;

/// max(q - served, 0) + arrival.
Bits update_traffic_queue(Bits queue, Bits served, Bits arrival);

/// Same law over reals, used by the virtual queues.
double update_virtual_queue(double queue, double service, double arrival);

/// Traffic, auxiliary and power queues for every user and SBS.
struct QueueState {
  QueueState() = default;
  QueueState(int num_users, int num_sbs);

  int num_users() const { return static_cast<int>(q_ul.size()); }
  int num_sbs() const { return static_cast<int>(z_dl.size()); }

  const std::vector<Bits>& traffic(Direction d) const { return d == Direction::kUplink ? q_ul : q_dl; }
  const std::vector<double>& auxiliary(Direction d) const { return d == Direction::kUplink ? h_ul : h_dl; }
  /// Scheduling weight Q + H.
  double weight(int user, Direction d) const;

  std::vector<Bits> q_ul, q_dl;
  std::vector<double> h_ul, h_dl;
  std::vector<double> z_ul;  // per user, watt-subframes
  std::vector<double> z_dl;  // per SBS, watt-subframes
  std::vector<double> gamma_ul, gamma_dl;
};

struct ArrivalProcess {
  double lambda = 0.0;            // packets per second
  double mean_size = 0.0;         // bits
  Bits max_bits = 0;              // per-subframe cap
  double subframe_duration = 1e-3;
};

struct SubframeArrivals {
  Bits total = 0;
  std::vector<Bits> packets;  // sizes, in arrival order
};

/// Poisson packet count with exponential sizes (rounded to whole bits, at least
/// one). Packets that would push the subframe total past `max_bits` are
/// truncated to fit and later ones dropped.
SubframeArrivals draw_arrivals(const ArrivalProcess& process, Rng& rng);

/// Auxiliary rate choice for a linear utility: r_max if H <= v, else 0.
double select_auxiliary(double h, double v, double r_max);

/// Applies the auxiliary-rate and power virtual queue updates in place.
/// `rate_*` are per-user service rates in bits/subframe, `p_ul` per-user UL
/// powers, `p_dl_sbs` total DL power per SBS. Gamma must already be set.
void update_virtual_queues(QueueState& state, std::span<const double> rate_ul,
                           std::span<const double> rate_dl, std::span<const double> p_ul,
                           std::span<const double> p_dl_sbs, const ScenarioConfig& config);

struct DriftBounds {
  int num_users = 0;
  int num_sbs = 0;
  double a_max_ul = 0.0;
  double a_max_dl = 0.0;
  double p_max_ul = 0.0;
  double p_max_dl = 0.0;
  double r_max_ul = 0.0;
  double r_max_dl = 0.0;
};

/// Constant C of the per-subframe drift-plus-penalty bound.
double drift_bound_constant(const DriftBounds& bounds);
double drift_bound_constant(const ScenarioConfig& config, int num_users);

/// Completion record of one packet.
struct PacketRecord {
  int arrival_subframe = 0;
  int completion_subframe = 0;
  Bits size = 0;
};

/// FIFO of partially served packets backing one user-direction queue.
class PacketFifo {
 public:
  void push(int arrival_subframe, Bits size);
  /// Serves up to `bits` in FIFO order and appends every packet whose last bit
  /// is served to `completed`. Returns the bits actually served.
  Bits serve(Bits bits, int subframe, std::vector<PacketRecord>& completed);
  Bits backlog() const { return backlog_; }
  std::size_t size() const { return packets_.size(); }

 private:
  struct Pending {
    int arrival_subframe;
    Bits size;
    Bits remaining;
  };
  std::deque<Pending> packets_;
  Bits backlog_ = 0;
};

}  // namespace fdnoma
