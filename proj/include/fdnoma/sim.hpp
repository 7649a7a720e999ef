#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fdnoma/baselines.hpp"
#include "fdnoma/config.hpp"
#include "fdnoma/phy.hpp"
#include "fdnoma/traffic_queues.hpp"

namespace fdnoma {

inline constexpr int kNumCellModes = 6;

/// Network-wide totals for one subframe.
struct SubframeRecord {
  int subframe = 0;
  Bits arrivals_ul = 0;
  Bits arrivals_dl = 0;
  Bits served_ul = 0;
  Bits served_dl = 0;
  Bits backlog_ul = 0;  // after the update
  Bits backlog_dl = 0;
  double virtual_h_ul = 0.0;
  double virtual_h_dl = 0.0;
  double power_ul = 0.0;  // sum over users, watts
  double power_dl = 0.0;  // sum over SBSs
  std::array<int, kNumCellModes> modes{};  // indexed by CellMode
  int packets_completed = 0;
  int matching_proposals = 0;
  int ccp_iterations = 0;
};

struct UserSummary {
  int user = 0;
  int home_sbs = 0;
  Bits arrivals_ul = 0;
  Bits arrivals_dl = 0;
  Bits served_ul = 0;
  Bits served_dl = 0;
  Bits queue_ul = 0;
  Bits queue_dl = 0;
  int packets_completed = 0;
  double packet_throughput = 0.0;  // mean size/delay over its packets, bits/s
  double rate_throughput = 0.0;    // served UL+DL bits per second
  double avg_power_ul = 0.0;
};

struct ModeShares {
  std::array<long, kNumCellModes> counts{};  // SBS-subframes per CellMode
  double hd_oma = 0.0;
  double fd = 0.0;
  double ul_noma = 0.0;
  double dl_noma = 0.0;

  long active() const;
};

ModeShares mode_shares(const std::array<long, kNumCellModes>& counts);

struct ExperimentReport {
  std::string scheme;
  std::uint64_t seed = 0;
  int num_subframes = 0;
  int num_sbs = 0;
  int num_users = 0;

  long packets_completed = 0;
  double mean_packet_throughput = 0.0;  // bits/s over completed packets, UL+DL
  double mean_packet_throughput_ul = 0.0;
  double mean_packet_throughput_dl = 0.0;
  double mean_packet_delay = 0.0;       // seconds
  double mean_rate_throughput_ul = 0.0;  // per user, bits/s
  double mean_rate_throughput_dl = 0.0;
  double cell_edge_packet_throughput = 0.0;  // 10th percentile over users
  double cell_edge_rate_throughput = 0.0;
  std::vector<std::pair<double, double>> cdf;  // (user packet throughput, F)

  ModeShares modes;

  double avg_power_ul = 0.0;      // mean over users of the time average
  double max_avg_power_ul = 0.0;  // worst user
  double avg_power_dl = 0.0;      // mean over SBSs
  double max_avg_power_dl = 0.0;

  Bits total_arrivals = 0;
  Bits total_served = 0;
  Bits total_residual = 0;
  bool conservation_ok = true;

  long matching_proposals = 0;
  int matching_not_converged = 0;
  long ccp_iterations = 0;
  int ccp_iteration_cap_hits = 0;
  int ccp_infeasible = 0;

  std::vector<UserSummary> users;
  std::vector<SubframeRecord> subframes;
};

struct ReplicationOptions {
  bool record_subframes = true;
};

/// Runs one topology for config.num_subframes subframes. Each subframe: draw
/// the channel, pick auxiliaries, update learning, schedule, serve the
/// queues at the realized rates, add arrivals, update virtual queues.
ExperimentReport run_replication(const ScenarioConfig& config, std::uint64_t seed, Scheme scheme,
                                 const ReplicationOptions& options = {});

/// Linear-interpolated percentile of `values` (q in [0, 1]); 0 when empty.
double percentile(std::vector<double> values, double q);

nlohmann::json config_to_json(const ScenarioConfig& config);
nlohmann::json to_json(const ExperimentReport& report);

/// Writes report.json, metrics.csv, cdf.csv and modes.csv into `dir`.
void write_outputs(const ExperimentReport& report, const ScenarioConfig& config,
                   const std::filesystem::path& dir);

enum class SweepAxis { kTraffic, kDensity, kSi };

SweepAxis parse_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

/// traffic: mean packet size in kb; density: number of SBSs; si: cancellation
/// in dB.
void apply_axis(ScenarioConfig& config, SweepAxis axis, double value);

struct MetricSummary {
  double mean = 0.0;
  double std_error = 0.0;
};

MetricSummary summarize(const std::vector<double>& samples);

struct SweepCell {
  double value = 0.0;
  Scheme scheme = Scheme::kProposed;
  std::vector<std::uint64_t> seeds;
  std::vector<ExperimentReport> reports;  // per replication, without subframes
  std::vector<std::pair<std::string, MetricSummary>> metrics;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kTraffic;
  std::vector<SweepCell> cells;  // value-major, then scheme

  const SweepCell& at(double value, Scheme scheme) const;
};

/// Replication r uses seed base_seed + r for every value and scheme, so the
/// points of a sweep share topologies and traffic.
SweepResult run_sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values,
                      const std::vector<Scheme>& schemes, int replications,
                      std::uint64_t base_seed, int threads = 1);

nlohmann::json to_json(const SweepResult& sweep);
void write_sweep(const SweepResult& sweep, const std::filesystem::path& dir);

/// Shortest decimal that round-trips.
std::string format_double(double value);

}  // namespace fdnoma
