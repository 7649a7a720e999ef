#include "fdnoma/sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "fdnoma/matching.hpp"

namespace fdnoma {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

long ModeShares::active() const {
  return std::accumulate(counts.begin(), counts.end(), 0L) -
         counts[static_cast<int>(CellMode::kIdle)];
}

ModeShares mode_shares(const std::array<long, kNumCellModes>& counts) {
  ModeShares m;
  m.counts = counts;
  const long active = m.active();
  if (active == 0) return m;
  auto at = [&](CellMode mode) { return static_cast<double>(counts[static_cast<int>(mode)]); };
  const double n = static_cast<double>(active);
  m.hd_oma = (at(CellMode::kHdOmaUl) + at(CellMode::kHdOmaDl)) / n;
  m.fd = at(CellMode::kFdOma) / n;
  m.ul_noma = at(CellMode::kHdNomaUl) / n;
  m.dl_noma = at(CellMode::kHdNomaDl) / n;
  return m;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

struct UserAccount {
  std::array<PacketFifo, 2> fifo;
  std::array<Bits, 2> arrivals{};
  std::array<Bits, 2> served{};
  std::array<double, 2> throughput_sum{};
  std::array<int, 2> packets{};
  double power_ul_sum = 0.0;
};

int dir_index(Direction d) { return d == Direction::kUplink ? 0 : 1; }

}  // namespace

ExperimentReport run_replication(const ScenarioConfig& config, std::uint64_t seed, Scheme scheme,
                                 const ReplicationOptions& options) {
  config.validate();
  const NetworkTopology topo = generate_topology(config, seed);
  const int num_users = topo.num_users();
  const int num_sbs = topo.num_sbs();
  const double tau = config.subframe_duration;
  const double r_max = config.max_service_bits();
  const PhyParams phy = PhyParams::from(config);

  Rng arrival_rng = make_stream(seed, Stream::kArrivals);
  Rng fading_rng = make_stream(seed, Stream::kFading);
  const ArrivalProcess proc_ul{config.lambda_ul, config.mean_packet_size,
                               std::llround(config.max_arrival_bits()), tau};
  const ArrivalProcess proc_dl{config.lambda_dl, config.mean_packet_size,
                               std::llround(config.max_arrival_bits()), tau};

  QueueState queues(num_users, num_sbs);
  LearnedInterference learned(num_sbs, num_users);
  InterferenceMeasurement last_measurement;
  auto scheduler = make_scheduler(scheme);
  std::vector<UserAccount> acct(num_users);
  std::vector<double> power_dl_sum(num_sbs, 0.0);
  std::array<long, kNumCellModes> mode_counts{};
  std::vector<PacketRecord> completed;
  std::vector<double> all_throughput[2];
  double delay_sum = 0.0;

  ExperimentReport rep;
  rep.scheme = std::string(to_string(scheme));
  rep.seed = seed;
  rep.num_subframes = config.num_subframes;
  rep.num_sbs = num_sbs;
  rep.num_users = num_users;

  for (int t = 0; t < config.num_subframes; ++t) {
    const GainTable gains = config.fast_fading ? apply_fading(topo.gains, fading_rng) : topo.gains;
    for (int u = 0; u < num_users; ++u) {
      queues.gamma_ul[u] = select_auxiliary(queues.h_ul[u], config.lyapunov_v, r_max);
      queues.gamma_dl[u] = select_auxiliary(queues.h_dl[u], config.lyapunov_v, r_max);
    }
    if (t > 0) learned = update_learning(learned, last_measurement, config.nu1, config.nu2);

    const SchedulerContext ctx{config, topo, gains, queues, learned};
    const SchedulerDecision decision = scheduler->schedule(ctx);
    const LinkAssignment& assign = decision.assignment;
    assign.validate(num_users, config.noma_quota);

    SubframeRecord rec;
    rec.subframe = t;
    rec.matching_proposals = decision.matching_proposals;
    rec.ccp_iterations = decision.ccp_iterations;
    rep.matching_proposals += decision.matching_proposals;
    rep.matching_not_converged += decision.matching_converged ? 0 : 1;
    rep.ccp_iterations += decision.ccp_iterations;
    rep.ccp_iteration_cap_hits += decision.ccp_warning ? 1 : 0;
    rep.ccp_infeasible += decision.ccp_infeasible ? 1 : 0;

    // Offered bits per link, capped at r_max; service is further capped by
    // the queue content.
    std::vector<double> offered_ul(num_users, 0.0), offered_dl(num_users, 0.0);
    for (int b = 0; b < num_sbs; ++b) {
      const auto& cell = assign.cells[b];
      const CellMode mode = cell.mode();
      ++mode_counts[static_cast<int>(mode)];
      ++rec.modes[static_cast<int>(mode)];
      for (Direction d : kDirections) {
        for (int u : cell.users(d)) {
          const double sinr = compute_sinr(assign, decision.powers, gains, phy, d, b, u).sinr;
          const double bits = std::min(service_rate(sinr, config.bandwidth) * tau, r_max);
          (d == Direction::kUplink ? offered_ul : offered_dl)[u] = bits;
        }
      }
    }

    completed.clear();
    for (int u = 0; u < num_users; ++u) {
      for (Direction d : kDirections) {
        const int x = dir_index(d);
        auto& a = acct[u];
        const double offered = (d == Direction::kUplink ? offered_ul : offered_dl)[u];
        const std::size_t first = completed.size();
        const Bits served = a.fifo[x].serve(static_cast<Bits>(std::floor(offered)), t, completed);
        for (std::size_t i = first; i < completed.size(); ++i) {
          const auto& pkt = completed[i];
          const double delay = (pkt.completion_subframe - pkt.arrival_subframe) * tau;
          const double thr = static_cast<double>(pkt.size) / delay;
          a.throughput_sum[x] += thr;
          ++a.packets[x];
          all_throughput[x].push_back(thr);
          delay_sum += delay;
        }
        const auto arrivals = draw_arrivals(d == Direction::kUplink ? proc_ul : proc_dl, arrival_rng);
        for (Bits size : arrivals.packets) a.fifo[x].push(t, size);
        auto& q = d == Direction::kUplink ? queues.q_ul[u] : queues.q_dl[u];
        q = update_traffic_queue(q, served, arrivals.total);
        if (q != a.fifo[x].backlog())
          throw std::logic_error("queue and packet backlog diverged");
        a.arrivals[x] += arrivals.total;
        a.served[x] += served;
        (d == Direction::kUplink ? rec.arrivals_ul : rec.arrivals_dl) += arrivals.total;
        (d == Direction::kUplink ? rec.served_ul : rec.served_dl) += served;
        (d == Direction::kUplink ? rec.backlog_ul : rec.backlog_dl) += q;
      }
    }
    rec.packets_completed = static_cast<int>(completed.size());

    std::vector<double> p_dl_sbs(num_sbs, 0.0);
    for (int b = 0; b < num_sbs; ++b) p_dl_sbs[b] = decision.powers.sbs_dl_total(assign.cells[b]);
    std::vector<double> p_ul(num_users, 0.0);
    for (int u = 0; u < num_users; ++u) {
      const auto s = assign.serving(u);
      if (s && s->direction == Direction::kUplink) p_ul[u] = decision.powers.ul[u];
      acct[u].power_ul_sum += p_ul[u];
      rec.power_ul += p_ul[u];
    }
    for (int b = 0; b < num_sbs; ++b) {
      power_dl_sum[b] += p_dl_sbs[b];
      rec.power_dl += p_dl_sbs[b];
    }
    update_virtual_queues(queues, offered_ul, offered_dl, p_ul, p_dl_sbs, config);
    for (int u = 0; u < num_users; ++u) {
      rec.virtual_h_ul += queues.h_ul[u];
      rec.virtual_h_dl += queues.h_dl[u];
    }
    last_measurement = measure_inter_cell(assign, decision.powers, gains);
    if (options.record_subframes) rep.subframes.push_back(rec);
  }

  const double horizon = config.num_subframes * tau;
  std::vector<double> user_packet, user_rate;
  double rate_ul = 0.0, rate_dl = 0.0;
  for (int u = 0; u < num_users; ++u) {
    const auto& a = acct[u];
    UserSummary s;
    s.user = u;
    s.home_sbs = topo.home_sbs[u];
    s.arrivals_ul = a.arrivals[0];
    s.arrivals_dl = a.arrivals[1];
    s.served_ul = a.served[0];
    s.served_dl = a.served[1];
    s.queue_ul = queues.q_ul[u];
    s.queue_dl = queues.q_dl[u];
    s.packets_completed = a.packets[0] + a.packets[1];
    if (s.packets_completed > 0) {
      s.packet_throughput = (a.throughput_sum[0] + a.throughput_sum[1]) / s.packets_completed;
      user_packet.push_back(s.packet_throughput);
    }
    s.rate_throughput = horizon > 0 ? static_cast<double>(a.served[0] + a.served[1]) / horizon : 0.0;
    user_rate.push_back(s.rate_throughput);
    s.avg_power_ul = config.num_subframes > 0 ? a.power_ul_sum / config.num_subframes : 0.0;
    rate_ul += static_cast<double>(a.served[0]);
    rate_dl += static_cast<double>(a.served[1]);
    for (int x = 0; x < 2; ++x) {
      rep.total_arrivals += a.arrivals[x];
      rep.total_served += a.served[x];
      const Bits residual = x == 0 ? s.queue_ul : s.queue_dl;
      rep.total_residual += residual;
      if (a.arrivals[x] != a.served[x] + residual) rep.conservation_ok = false;
    }
    rep.max_avg_power_ul = std::max(rep.max_avg_power_ul, s.avg_power_ul);
    rep.avg_power_ul += s.avg_power_ul;
    rep.users.push_back(s);
  }
  if (num_users > 0) {
    rep.avg_power_ul /= num_users;
    rep.mean_rate_throughput_ul = rate_ul / horizon / num_users;
    rep.mean_rate_throughput_dl = rate_dl / horizon / num_users;
  }
  for (int b = 0; b < num_sbs; ++b) {
    const double avg = config.num_subframes > 0 ? power_dl_sum[b] / config.num_subframes : 0.0;
    rep.avg_power_dl += avg / num_sbs;
    rep.max_avg_power_dl = std::max(rep.max_avg_power_dl, avg);
  }

  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  std::vector<double> both = all_throughput[0];
  both.insert(both.end(), all_throughput[1].begin(), all_throughput[1].end());
  rep.packets_completed = static_cast<long>(both.size());
  rep.mean_packet_throughput = mean(both);
  rep.mean_packet_throughput_ul = mean(all_throughput[0]);
  rep.mean_packet_throughput_dl = mean(all_throughput[1]);
  rep.mean_packet_delay = both.empty() ? 0.0 : delay_sum / both.size();
  rep.cell_edge_packet_throughput = percentile(user_packet, 0.1);
  rep.cell_edge_rate_throughput = percentile(user_rate, 0.1);
  std::sort(user_packet.begin(), user_packet.end());
  for (std::size_t i = 0; i < user_packet.size(); ++i)
    rep.cdf.emplace_back(user_packet[i], static_cast<double>(i + 1) / user_packet.size());
  rep.modes = mode_shares(mode_counts);
  return rep;
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
  return {{"area_side", c.area_side},
          {"num_sbs", c.num_sbs},
          {"mean_users_per_sbs", c.mean_users_per_sbs},
          {"cell_radius", c.cell_radius},
          {"bandwidth", c.bandwidth},
          {"p_max_ul", c.p_max_ul},
          {"p_max_dl", c.p_max_dl},
          {"si_cancellation", c.si_cancellation},
          {"noma_quota", c.noma_quota},
          {"lyapunov_v", c.lyapunov_v},
          {"delta_ul", c.delta_ul},
          {"delta_dl", c.delta_dl},
          {"nu1", c.nu1},
          {"nu2", c.nu2},
          {"lambda_ul", c.lambda_ul},
          {"lambda_dl", c.lambda_dl},
          {"mean_packet_size", c.mean_packet_size},
          {"subframe_duration", c.subframe_duration},
          {"num_subframes", c.num_subframes},
          {"rng_seed", c.rng_seed},
          {"shadowing_std_db", c.shadowing_std_db},
          {"fast_fading", c.fast_fading},
          {"noise_psd_dbm_hz", c.noise_psd_dbm_hz},
          {"noise_figure_db", c.noise_figure_db},
          {"sinr_cap_db", c.sinr_cap_db},
          {"arrival_cap_factor", c.arrival_cap_factor},
          {"noma_gain_ratio", c.noma_gain_ratio},
          {"fd_pair_gain_threshold", c.fd_pair_gain_threshold},
          {"fd_pair_above_threshold", c.fd_pair_above_threshold},
          {"ccp_max_iterations", c.ccp_max_iterations},
          {"ccp_relative_tolerance", c.ccp_relative_tolerance},
          {"pathloss_sbs_user_intercept", c.pathloss.sbs_user_intercept},
          {"pathloss_sbs_user_slope", c.pathloss.sbs_user_slope},
          {"pathloss_user_user_intercept", c.pathloss.user_user_intercept},
          {"pathloss_user_user_slope", c.pathloss.user_user_slope},
          {"pathloss_sbs_sbs_intercept", c.pathloss.sbs_sbs_intercept},
          {"pathloss_sbs_sbs_slope", c.pathloss.sbs_sbs_slope}};
}

namespace {

nlohmann::json modes_json(const ModeShares& m) {
  nlohmann::json counts;
  for (int i = 0; i < kNumCellModes; ++i)
    counts[std::string(to_string(static_cast<CellMode>(i)))] = m.counts[i];
  return {{"counts", counts},
          {"active", m.active()},
          {"hd_oma", m.hd_oma},
          {"fd", m.fd},
          {"ul_noma", m.ul_noma},
          {"dl_noma", m.dl_noma}};
}

}  // namespace

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : r.users) {
    users.push_back({{"user", u.user},
                     {"home_sbs", u.home_sbs},
                     {"arrivals_ul", u.arrivals_ul},
                     {"arrivals_dl", u.arrivals_dl},
                     {"served_ul", u.served_ul},
                     {"served_dl", u.served_dl},
                     {"queue_ul", u.queue_ul},
                     {"queue_dl", u.queue_dl},
                     {"packets_completed", u.packets_completed},
                     {"packet_throughput", u.packet_throughput},
                     {"rate_throughput", u.rate_throughput},
                     {"avg_power_ul", u.avg_power_ul}});
  }
  nlohmann::json cdf = nlohmann::json::array();
  for (const auto& [x, f] : r.cdf) cdf.push_back({x, f});
  return {{"scheme", r.scheme},
          {"seed", r.seed},
          {"num_subframes", r.num_subframes},
          {"num_sbs", r.num_sbs},
          {"num_users", r.num_users},
          {"packets_completed", r.packets_completed},
          {"mean_packet_throughput", r.mean_packet_throughput},
          {"mean_packet_throughput_ul", r.mean_packet_throughput_ul},
          {"mean_packet_throughput_dl", r.mean_packet_throughput_dl},
          {"mean_packet_delay", r.mean_packet_delay},
          {"mean_rate_throughput_ul", r.mean_rate_throughput_ul},
          {"mean_rate_throughput_dl", r.mean_rate_throughput_dl},
          {"cell_edge_packet_throughput", r.cell_edge_packet_throughput},
          {"cell_edge_rate_throughput", r.cell_edge_rate_throughput},
          {"cdf", cdf},
          {"modes", modes_json(r.modes)},
          {"avg_power_ul", r.avg_power_ul},
          {"max_avg_power_ul", r.max_avg_power_ul},
          {"avg_power_dl", r.avg_power_dl},
          {"max_avg_power_dl", r.max_avg_power_dl},
          {"total_arrivals", r.total_arrivals},
          {"total_served", r.total_served},
          {"total_residual", r.total_residual},
          {"conservation_ok", r.conservation_ok},
          {"matching_proposals", r.matching_proposals},
          {"matching_not_converged", r.matching_not_converged},
          {"ccp_iterations", r.ccp_iterations},
          {"ccp_iteration_cap_hits", r.ccp_iteration_cap_hits},
          {"ccp_infeasible", r.ccp_infeasible},
          {"users", users}};
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_outputs(const ExperimentReport& r, const ScenarioConfig& config,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    nlohmann::json j = to_json(r);
    j["config"] = config_to_json(config);
    open_out(dir / "report.json") << j.dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "metrics.csv");
    out << "subframe,arrivals_ul,arrivals_dl,served_ul,served_dl,backlog_ul,backlog_dl,"
           "virtual_h_ul,virtual_h_dl,power_ul,power_dl";
    for (int i = 0; i < kNumCellModes; ++i) out << ",mode_" << to_string(static_cast<CellMode>(i));
    out << ",packets_completed,matching_proposals,ccp_iterations\n";
    for (const auto& s : r.subframes) {
      out << s.subframe << ',' << s.arrivals_ul << ',' << s.arrivals_dl << ',' << s.served_ul
          << ',' << s.served_dl << ',' << s.backlog_ul << ',' << s.backlog_dl << ','
          << format_double(s.virtual_h_ul) << ',' << format_double(s.virtual_h_dl) << ','
          << format_double(s.power_ul) << ',' << format_double(s.power_dl);
      for (int m : s.modes) out << ',' << m;
      out << ',' << s.packets_completed << ',' << s.matching_proposals << ',' << s.ccp_iterations
          << '\n';
    }
  }
  {
    auto out = open_out(dir / "cdf.csv");
    out << "packet_throughput,cdf\n";
    for (const auto& [x, f] : r.cdf) out << format_double(x) << ',' << format_double(f) << '\n';
  }
  {
    auto out = open_out(dir / "modes.csv");
    out << "mode,count,share\n";
    const auto& m = r.modes;
    auto count = [&](CellMode mode) { return m.counts[static_cast<int>(mode)]; };
    out << "hd_oma," << count(CellMode::kHdOmaUl) + count(CellMode::kHdOmaDl) << ','
        << format_double(m.hd_oma) << '\n';
    out << "fd," << count(CellMode::kFdOma) << ',' << format_double(m.fd) << '\n';
    out << "ul_noma," << count(CellMode::kHdNomaUl) << ',' << format_double(m.ul_noma) << '\n';
    out << "dl_noma," << count(CellMode::kHdNomaDl) << ',' << format_double(m.dl_noma) << '\n';
    out << "idle," << count(CellMode::kIdle) << ",\n";
  }
}

SweepAxis parse_axis(std::string_view name) {
  if (name == "traffic") return SweepAxis::kTraffic;
  if (name == "density") return SweepAxis::kDensity;
  if (name == "si") return SweepAxis::kSi;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) +
                              "' (expected traffic, density or si)");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kTraffic: return "traffic";
    case SweepAxis::kDensity: return "density";
    case SweepAxis::kSi: return "si";
  }
  return "unknown";
}

void apply_axis(ScenarioConfig& config, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::kTraffic:
      config.mean_packet_size = value * 1e3;
      break;
    case SweepAxis::kDensity:
      if (value < 1.0 || value != std::floor(value))
        throw std::invalid_argument("density values must be positive integers");
      config.num_sbs = static_cast<int>(value);
      break;
    case SweepAxis::kSi:
      config.si_cancellation = db_to_linear(value);
      break;
  }
}

MetricSummary summarize(const std::vector<double>& samples) {
  MetricSummary s;
  if (samples.empty()) return s;
  const double n = static_cast<double>(samples.size());
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

const SweepCell& SweepResult::at(double value, Scheme scheme) const {
  for (const auto& c : cells)
    if (c.value == value && c.scheme == scheme) return c;
  throw std::out_of_range("sweep has no such point");
}

namespace {

using MetricFn = double (*)(const ExperimentReport&);

const std::vector<std::pair<std::string, MetricFn>>& sweep_metrics() {
  static const std::vector<std::pair<std::string, MetricFn>> m = {
      {"mean_packet_throughput", [](const ExperimentReport& r) { return r.mean_packet_throughput; }},
      {"cell_edge_packet_throughput",
       [](const ExperimentReport& r) { return r.cell_edge_packet_throughput; }},
      {"mean_rate_throughput_ul", [](const ExperimentReport& r) { return r.mean_rate_throughput_ul; }},
      {"mean_rate_throughput_dl", [](const ExperimentReport& r) { return r.mean_rate_throughput_dl; }},
      {"share_hd_oma", [](const ExperimentReport& r) { return r.modes.hd_oma; }},
      {"share_fd", [](const ExperimentReport& r) { return r.modes.fd; }},
      {"share_ul_noma", [](const ExperimentReport& r) { return r.modes.ul_noma; }},
      {"share_dl_noma", [](const ExperimentReport& r) { return r.modes.dl_noma; }},
      {"share_fd_noma",
       [](const ExperimentReport& r) { return r.modes.fd + r.modes.ul_noma + r.modes.dl_noma; }},
      {"avg_power_ul", [](const ExperimentReport& r) { return r.avg_power_ul; }},
      {"avg_power_dl", [](const ExperimentReport& r) { return r.avg_power_dl; }},
  };
  return m;
}

}  // namespace

SweepResult run_sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values,
                      const std::vector<Scheme>& schemes, int replications,
                      std::uint64_t base_seed, int threads) {
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  SweepResult result;
  result.axis = axis;
  struct Job {
    std::size_t cell;
    int replication;
    ScenarioConfig config;
  };
  std::vector<Job> jobs;
  for (double v : values) {
    ScenarioConfig config = base;
    apply_axis(config, axis, v);
    config.validate();
    for (Scheme s : schemes) {
      SweepCell cell;
      cell.value = v;
      cell.scheme = s;
      cell.reports.resize(replications);
      for (int r = 0; r < replications; ++r) {
        cell.seeds.push_back(base_seed + static_cast<std::uint64_t>(r));
        jobs.push_back({result.cells.size(), r, config});
      }
      result.cells.push_back(std::move(cell));
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const auto& job = jobs[i];
      auto& cell = result.cells[job.cell];
      try {
        cell.reports[job.replication] =
            run_replication(job.config, cell.seeds[job.replication], cell.scheme, {false});
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, threads);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& cell : result.cells) {
    for (const auto& [name, fn] : sweep_metrics()) {
      std::vector<double> samples;
      for (const auto& r : cell.reports) samples.push_back(fn(r));
      cell.metrics.emplace_back(name, summarize(samples));
    }
  }
  return result;
}

nlohmann::json to_json(const SweepResult& sweep) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : sweep.cells) {
    nlohmann::json metrics;
    for (const auto& [name, s] : c.metrics)
      metrics[name] = {{"mean", s.mean}, {"stderr", s.std_error}};
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : c.reports) reps.push_back(to_json(r));
    cells.push_back({{"value", c.value},
                     {"scheme", to_string(c.scheme)},
                     {"seeds", c.seeds},
                     {"metrics", metrics},
                     {"replications", reps}});
  }
  return {{"axis", to_string(sweep.axis)}, {"points", cells}};
}

void write_sweep(const SweepResult& sweep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  open_out(dir / "sweep.json") << to_json(sweep).dump(2) << '\n';
  auto out = open_out(dir / "sweep.csv");
  out << "axis,value,scheme,replications";
  if (!sweep.cells.empty())
    for (const auto& [name, s] : sweep.cells.front().metrics) out << ',' << name << ',' << name << "_stderr";
  out << '\n';
  for (const auto& c : sweep.cells) {
    out << to_string(sweep.axis) << ',' << format_double(c.value) << ',' << to_string(c.scheme)
        << ',' << c.reports.size();
    for (const auto& [name, s] : c.metrics)
      out << ',' << format_double(s.mean) << ',' << format_double(s.std_error);
    out << '\n';
  }
}

}  // namespace fdnoma
