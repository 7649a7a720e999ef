#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fdnoma/sim.hpp"
#include "helpers.hpp"

using namespace fdnoma;
using namespace fdnoma::testing;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.num_subframes = 120;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("percentile and summaries") {
  CHECK(percentile({}, 0.1) == 0.0);
  CHECK(percentile({3.0}, 0.9) == 3.0);
  CHECK(percentile({4.0, 1.0, 3.0, 2.0}, 0.5) == doctest::Approx(2.5));
  CHECK(percentile({0.0, 10.0}, 0.1) == doctest::Approx(1.0));
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(summarize({7.0}).std_error == 0.0);
}

TEST_CASE("mode shares") {
  std::array<long, kNumCellModes> counts{};
  counts[static_cast<int>(CellMode::kIdle)] = 100;
  counts[static_cast<int>(CellMode::kHdOmaUl)] = 3;
  counts[static_cast<int>(CellMode::kHdOmaDl)] = 3;
  counts[static_cast<int>(CellMode::kFdOma)] = 2;
  counts[static_cast<int>(CellMode::kHdNomaDl)] = 2;
  const auto m = mode_shares(counts);
  CHECK(m.active() == 10);
  CHECK(m.hd_oma == doctest::Approx(0.6));
  CHECK(m.fd == doctest::Approx(0.2));
  CHECK(m.dl_noma == doctest::Approx(0.2));
  CHECK(m.ul_noma == 0.0);
  CHECK(mode_shares({}).hd_oma == 0.0);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-13) == "1e-13");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("no arrivals gives an idle report") {
  ScenarioConfig c = small_config();
  c.lambda_ul = c.lambda_dl = 0.0;
  for (Scheme s : kAllSchemes) {
    const auto r = run_replication(c, 3, s);
    CHECK(r.packets_completed == 0);
    CHECK(r.mean_packet_throughput == 0.0);
    CHECK(r.total_arrivals == 0);
    CHECK(r.modes.active() == 0);
    CHECK(r.modes.counts[static_cast<int>(CellMode::kIdle)] == c.num_subframes * r.num_sbs);
  }
}

TEST_CASE("single user with ample capacity finishes every packet one subframe after arrival") {
  ScenarioConfig c = small_config();
  c.num_sbs = 1;
  c.area_side = 100.0;
  c.mean_users_per_sbs = 1.0;
  c.fast_fading = false;
  c.shadowing_std_db = 0.0;
  c.lambda_dl = 0.0;
  c.lambda_ul = 200.0;
  c.mean_packet_size = 1000.0;
  c.num_subframes = 20;
  std::uint64_t seed = 0;
  while (generate_topology(c, seed).num_users() != 1) ++seed;
  const auto r = run_replication(c, seed, Scheme::kHdOma);
  REQUIRE(r.packets_completed > 0);
  // Arrivals of the last subframe are still queued.
  const Bits last = r.subframes.back().arrivals_ul;
  CHECK(r.total_residual == last);
  CHECK(r.total_served == r.total_arrivals - last);
  CHECK(r.mean_packet_delay == doctest::Approx(c.subframe_duration));
  const double mean_size = static_cast<double>(r.total_served) / r.packets_completed;
  CHECK(r.mean_packet_throughput == doctest::Approx(mean_size / c.subframe_duration).epsilon(1e-12));
}

TEST_CASE("conservation and power bookkeeping for every scheme") {
  ScenarioConfig c = small_config();
  c.mean_packet_size = 300e3;
  for (Scheme s : kAllSchemes) {
    const auto r = run_replication(c, 11, s);
    CHECK(r.conservation_ok);
    CHECK(r.total_arrivals == r.total_served + r.total_residual);
    Bits arrivals = 0, served = 0;
    for (const auto& f : r.subframes) {
      arrivals += f.arrivals_ul + f.arrivals_dl;
      served += f.served_ul + f.served_dl;
      int cells = 0;
      for (int m : f.modes) cells += m;
      CHECK(cells == r.num_sbs);
    }
    CHECK(arrivals == r.total_arrivals);
    CHECK(served == r.total_served);
    CHECK(r.max_avg_power_ul <= c.p_max_ul);
    CHECK(r.max_avg_power_dl <= c.p_max_dl * (1 + 1e-12));
    const auto& m = r.modes;
    if (m.active() > 0) CHECK(m.hd_oma + m.fd + m.ul_noma + m.dl_noma == doctest::Approx(1.0));
    if (s != Scheme::kProposed && s != Scheme::kUncoordinated) CHECK(r.matching_proposals == 0);
    if (s == Scheme::kHdOma) CHECK(m.hd_oma == doctest::Approx(1.0));
  }
}

TEST_CASE("light traffic is mean-rate stable") {
  // Backlog that survived service at the horizon, over all users, stays below
  // 1% of one user's mean arrival rate times the horizon.
  ScenarioConfig c;
  c.mean_packet_size = 50e3;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto r = run_replication(c, seed, Scheme::kProposed);
    const auto& last = r.subframes.back();
    const double carried_ul = static_cast<double>(last.backlog_ul - last.arrivals_ul);
    const double carried_dl = static_cast<double>(last.backlog_dl - last.arrivals_dl);
    const double per_subframe_rate = c.lambda_ul * c.mean_packet_size * c.subframe_duration;
    CHECK(carried_ul / c.num_subframes < 0.01 * per_subframe_rate);
    CHECK(carried_dl / c.num_subframes < 0.01 * per_subframe_rate);
  }
}

TEST_CASE("auxiliary queues stay bounded") {
  ScenarioConfig c = small_config();
  c.num_subframes = 300;
  const auto r = run_replication(c, 4, Scheme::kProposed);
  const double r_max = c.max_service_bits();
  for (const auto& f : r.subframes) {
    CHECK(f.virtual_h_ul <= r.num_users * (c.lyapunov_v + r_max));
    CHECK(f.virtual_h_dl <= r.num_users * (c.lyapunov_v + r_max));
  }
}

TEST_CASE("determinism") {
  const ScenarioConfig c = small_config();
  const auto a = run_replication(c, 21, Scheme::kProposed);
  const auto b = run_replication(c, 21, Scheme::kProposed);
  CHECK(to_json(a).dump() == to_json(b).dump());
  const auto other = run_replication(c, 22, Scheme::kProposed);
  CHECK(to_json(a).dump() != to_json(other).dump());
}

TEST_CASE("sweep of one point and one replication equals a single run") {
  ScenarioConfig c = small_config();
  const auto sweep = run_sweep(c, SweepAxis::kTraffic, {100.0}, {Scheme::kHdNoma}, 1, 8);
  REQUIRE(sweep.cells.size() == 1);
  const auto& cell = sweep.at(100.0, Scheme::kHdNoma);
  REQUIRE(cell.reports.size() == 1);
  const auto single = run_replication(c, 8, Scheme::kHdNoma, {false});
  CHECK(to_json(cell.reports[0]).dump() == to_json(single).dump());
  CHECK_THROWS_AS(sweep.at(50.0, Scheme::kHdNoma), std::out_of_range);
}

TEST_CASE("sweep axes") {
  ScenarioConfig c;
  apply_axis(c, SweepAxis::kTraffic, 200.0);
  CHECK(c.mean_packet_size == 200e3);
  apply_axis(c, SweepAxis::kDensity, 7.0);
  CHECK(c.num_sbs == 7);
  apply_axis(c, SweepAxis::kSi, 90.0);
  CHECK(c.si_cancellation == doctest::Approx(1e9));
  CHECK_THROWS_AS(apply_axis(c, SweepAxis::kDensity, 2.5), std::invalid_argument);
  CHECK(parse_axis("si") == SweepAxis::kSi);
  CHECK(to_string(SweepAxis::kDensity) == "density");
  CHECK_THROWS_AS(parse_axis("power"), std::invalid_argument);
}

TEST_CASE("threaded sweep matches the sequential one") {
  ScenarioConfig c = small_config();
  c.num_subframes = 40;
  const std::vector<Scheme> schemes{Scheme::kProposed, Scheme::kFdOma};
  const auto seq = run_sweep(c, SweepAxis::kSi, {50.0, 110.0}, schemes, 2, 1, 1);
  const auto par = run_sweep(c, SweepAxis::kSi, {50.0, 110.0}, schemes, 2, 1, 3);
  CHECK(to_json(seq).dump() == to_json(par).dump());
  REQUIRE(seq.cells.size() == 4);
  CHECK(seq.cells[0].seeds == std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("output files") {
  ScenarioConfig c = small_config();
  c.num_subframes = 30;
  const auto r = run_replication(c, 2, Scheme::kProposed);
  const auto dir = std::filesystem::temp_directory_path() / "fdnoma_sim_outputs_test";
  std::filesystem::remove_all(dir);
  write_outputs(r, c, dir);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["scheme"] == "proposed");
  CHECK(report["config"]["num_subframes"] == 30);
  CHECK(report["users"].size() == static_cast<std::size_t>(r.num_users));
  std::istringstream metrics(slurp(dir / "metrics.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(metrics, line)) ++rows;
  CHECK(rows == 30);
  CHECK(slurp(dir / "modes.csv").rfind("mode,count,share\n", 0) == 0);
  CHECK(slurp(dir / "cdf.csv").rfind("packet_throughput,cdf\n", 0) == 0);

  const auto sweep = run_sweep(c, SweepAxis::kTraffic, {50.0}, {Scheme::kHdOma}, 2, 1);
  write_sweep(sweep, dir / "sweep");
  const auto sj = nlohmann::json::parse(slurp(dir / "sweep" / "sweep.json"));
  CHECK(sj["axis"] == "traffic");
  CHECK(sj["points"][0]["metrics"].contains("mean_packet_throughput"));
  std::filesystem::remove_all(dir);
}
