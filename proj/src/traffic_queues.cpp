#include "fdnoma/traffic_queues.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdnoma {

Bits update_traffic_queue(Bits queue, Bits served, Bits arrival) {
  return std::max<Bits>(queue - served, 0) + arrival;
}

double update_virtual_queue(double queue, double service, double arrival) {
  return std::max(queue - service, 0.0) + arrival;
}

QueueState::QueueState(int num_users, int num_sbs)
    : q_ul(num_users, 0),
      q_dl(num_users, 0),
      h_ul(num_users, 0.0),
      h_dl(num_users, 0.0),
      z_ul(num_users, 0.0),
      z_dl(num_sbs, 0.0),
      gamma_ul(num_users, 0.0),
      gamma_dl(num_users, 0.0) {}

double QueueState::weight(int user, Direction d) const {
  return d == Direction::kUplink ? static_cast<double>(q_ul[user]) + h_ul[user]
                                 : static_cast<double>(q_dl[user]) + h_dl[user];
}

SubframeArrivals draw_arrivals(const ArrivalProcess& process, Rng& rng) {
  SubframeArrivals out;
  const double mean_count = process.lambda * process.subframe_duration;
  if (mean_count <= 0.0 || process.max_bits <= 0) return out;
  const int count = std::poisson_distribution<int>(mean_count)(rng);
  std::exponential_distribution<double> size(1.0 / process.mean_size);
  for (int i = 0; i < count; ++i) {
    Bits bits = std::max<Bits>(1, std::llround(size(rng)));
    if (out.total >= process.max_bits) continue;  // keep the stream aligned
    bits = std::min(bits, process.max_bits - out.total);
    out.total += bits;
    out.packets.push_back(bits);
  }
  return out;
}

double select_auxiliary(double h, double v, double r_max) { return h <= v ? r_max : 0.0; }

void update_virtual_queues(QueueState& state, std::span<const double> rate_ul,
                           std::span<const double> rate_dl, std::span<const double> p_ul,
                           std::span<const double> p_dl_sbs, const ScenarioConfig& config) {
  const auto users = static_cast<std::size_t>(state.num_users());
  const auto sbs = static_cast<std::size_t>(state.num_sbs());
  if (rate_ul.size() != users || rate_dl.size() != users || p_ul.size() != users ||
      p_dl_sbs.size() != sbs)
    throw std::invalid_argument("update_virtual_queues: size mismatch");
  for (std::size_t u = 0; u < users; ++u) {
    state.h_ul[u] = update_virtual_queue(state.h_ul[u], rate_ul[u], state.gamma_ul[u]);
    state.h_dl[u] = update_virtual_queue(state.h_dl[u], rate_dl[u], state.gamma_dl[u]);
    state.z_ul[u] = update_virtual_queue(state.z_ul[u], config.delta_ul, p_ul[u]);
  }
  for (std::size_t b = 0; b < sbs; ++b)
    state.z_dl[b] = update_virtual_queue(state.z_dl[b], config.delta_dl, p_dl_sbs[b]);
}

double drift_bound_constant(const DriftBounds& k) {
  const double per_user = k.a_max_ul * k.a_max_ul + k.a_max_dl * k.a_max_dl +
                          2.0 * k.p_max_ul * k.p_max_ul + 3.0 * k.r_max_ul * k.r_max_ul +
                          3.0 * k.r_max_dl * k.r_max_dl;
  return 0.5 * k.num_users * per_user + k.num_sbs * 2.0 * k.p_max_dl * k.p_max_dl;
}

double drift_bound_constant(const ScenarioConfig& config, int num_users) {
  DriftBounds k;
  k.num_users = num_users;
  k.num_sbs = config.num_sbs;
  k.a_max_ul = k.a_max_dl = config.max_arrival_bits();
  k.p_max_ul = config.p_max_ul;
  k.p_max_dl = config.p_max_dl;
  k.r_max_ul = k.r_max_dl = config.max_service_bits();
  return drift_bound_constant(k);
}

void PacketFifo::push(int arrival_subframe, Bits size) {
  if (size <= 0) return;
  packets_.push_back({arrival_subframe, size, size});
  backlog_ += size;
}

Bits PacketFifo::serve(Bits bits, int subframe, std::vector<PacketRecord>& completed) {
  Bits served = 0;
  while (bits > 0 && !packets_.empty()) {
    Pending& head = packets_.front();
    const Bits take = std::min(bits, head.remaining);
    head.remaining -= take;
    bits -= take;
    served += take;
    if (head.remaining == 0) {
      completed.push_back({head.arrival_subframe, subframe, head.size});
      packets_.pop_front();
    }
  }
  backlog_ -= served;
  return served;
}

}  // namespace fdnoma
