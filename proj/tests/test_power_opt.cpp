#include <doctest.h>

#include "fdnoma/power_opt.hpp"
#include "helpers.hpp"
#include "instances.hpp"

using namespace fdnoma;
using namespace fdnoma::testing;

namespace {

// Lone UL link at one SBS: weight w, power queue z, gain s.
PowerInstance single_link(double w, double z, double s) {
  PowerInstance in;
  in.config = quiet_config();
  in.gains = make_gains(1, 1, {{0, 0, s}});
  in.assignment = LinkAssignment(1);
  in.assignment.cells[0] = {{0}, {}};
  in.queues = QueueState(1, 1);
  in.queues.q_ul[0] = static_cast<Bits>(w);
  in.queues.z_ul[0] = z;
  in.phy = PhyParams{kNoise, in.config.si_cancellation, in.config.bandwidth};
  in.num_users = 1;
  return in;
}

}  // namespace

TEST_CASE("problem structure") {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto in = random_power_instance(rng);
    const auto pr = in.problem();
    int served = 0, sic_pairs = 0, dl_cells = 0, ul_users = 0;
    for (const auto& cell : in.assignment.cells) {
      served += static_cast<int>(cell.ul.size() + cell.dl.size());
      ul_users += static_cast<int>(cell.ul.size());
      sic_pairs += static_cast<int>(cell.dl.size() * (cell.dl.size() - 1) / 2);
      dl_cells += cell.dl.empty() ? 0 : 1;
    }
    CHECK(pr.size() == served);
    CHECK(pr.num_sic_rows == sic_pairs);
    CHECK(pr.constraint.rows() == served + ul_users + dl_cells + sic_pairs);
    CHECK(pr.interference.diagonal().isZero());
    CHECK((pr.interference.array() >= 0.0).all());
    const auto alloc = pr.to_allocation(random_powers(pr, rng), in.num_users);
    CHECK(pr.from_allocation(alloc).isApprox(pr.from_allocation(pr.to_allocation(pr.from_allocation(alloc), in.num_users))));
  }
}

TEST_CASE("zero weights give a zero objective") {
  auto in = single_link(0.0, 0.0, 1e-10);
  const auto pr = in.problem();
  for (double p : {0.0, 0.03, 0.1}) CHECK(udpo_objective(pr, Eigen::VectorXd::Constant(1, p)) == 0.0);
}

TEST_CASE("single isolated UL link") {
  const auto in = single_link(2e4, 1e10, 2e-10);
  const auto pr = in.problem();
  SUBCASE("objective matches the hand evaluation") {
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 0.027272761987695078);
    CHECK(rel_diff(udpo_objective(pr, p), 1065218464.200765) < 1e-9);
  }
  SUBCASE("CCP reaches the stationary point in at most two iterations") {
    const auto res = run_ccp(pr, Eigen::VectorXd::Constant(1, 0.05));
    CHECK_FALSE(res.infeasible);
    CHECK(res.iterations <= 2);
    CHECK(std::abs(res.p[0] - 0.027272761987695078) < 1e-6);
  }
  SUBCASE("without a power cost the optimum is full power") {
    const auto free = single_link(2e4, 0.0, 2e-10).problem();
    const auto res = run_ccp(free, Eigen::VectorXd::Constant(1, 0.05));
    CHECK(std::abs(res.p[0] - 0.1) < 1e-6);
  }
  SUBCASE("objective increases with power when there is no power cost") {
    const auto free = single_link(2e4, 0.0, 2e-10).problem();
    double last = -1.0;
    for (int i = 0; i <= 20; ++i) {
      const double v = udpo_objective(free, Eigen::VectorXd::Constant(1, 0.005 * i));
      CHECK(v > last);
      last = v;
    }
  }
}

TEST_CASE("linear model agrees with the exact SINR objective") {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto in = random_power_instance(rng);
    const auto pr = in.problem();
    const Eigen::VectorXd p = random_powers(pr, rng);
    const double exact =
        udpo_objective(in.assignment, pr.to_allocation(p, in.num_users), in.queues, in.gains,
                       in.phy, in.config);
    CHECK(rel_diff(udpo_objective(pr, p), exact) < 1e-9);
  }
}

TEST_CASE("DC split") {
  Rng rng(3);
  SUBCASE("reconstructs the objective") {
    for (int i = 0; i < 50; ++i) {
      const auto in = random_power_instance(rng);
      const auto pr = in.problem();
      const Eigen::VectorXd p = random_powers(pr, rng);
      CHECK(rel_diff(dc_split(pr, p).total(), udpo_objective(pr, p)) < 1e-9);
    }
  }
  SUBCASE("G is constant without interference") {
    const auto pr = single_link(3e4, 0.0, 1e-10).problem();
    const double expected = -pr.coeff[0] * std::log(kNoise);
    for (double p : {0.0, 0.05, 0.1})
      CHECK(rel_diff(dc_split(pr, Eigen::VectorXd::Constant(1, p)).g, expected) < 1e-12);
  }
  SUBCASE("more interference lowers G") {
    const auto in = random_power_instance(rng);
    auto pr = in.problem();
    const Eigen::VectorXd p = random_powers(pr, rng);
    const double g1 = dc_split(pr, p).g;
    pr.interference *= 2.0;
    CHECK(dc_split(pr, p).g < g1);
  }
}

TEST_CASE("gradients match central differences") {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto in = random_power_instance(rng);
    const auto pr = in.problem();
    const Eigen::VectorXd p = random_powers(pr, rng);
    const auto dc = dc_split(pr, p);
    for (int k = 0; k < pr.size(); ++k) {
      const double h = 1e-6 * p[k];
      Eigen::VectorXd hi = p, lo = p;
      hi[k] += h;
      lo[k] -= h;
      const auto a = dc_split(pr, hi);
      const auto b = dc_split(pr, lo);
      const double fd_f = (a.f - b.f) / (2 * h);
      const double fd_g = (a.g - b.g) / (2 * h);
      // Relative to the gradient norm so near-zero components are not ill-posed.
      CHECK(std::abs(fd_f - dc.grad_f[k]) <= 1e-4 * std::max(std::abs(dc.grad_f[k]), 1e-3 * dc.grad_f.norm()));
      CHECK(std::abs(fd_g - dc.grad_g[k]) <= 1e-4 * std::max(std::abs(dc.grad_g[k]), 1e-3 * dc.grad_g.norm()));
    }
  }
}

TEST_CASE("tangent of G is a global under-estimator and touches at the reference") {
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    const auto in = random_power_instance(rng);
    const auto pr = in.problem();
    const Eigen::VectorXd ref = random_powers(pr, rng);
    const auto tangent = linearize_convex(pr, ref);
    CHECK(rel_diff(tangent(ref), dc_split(pr, ref).g) < 1e-14);
    for (int j = 0; j < 20; ++j) {
      const Eigen::VectorXd p = random_powers(pr, rng);
      const double g = dc_split(pr, p).g;
      CHECK(tangent(p) <= g + 1e-9 * std::abs(g));
      CHECK(surrogate_objective(pr, tangent, p) <= udpo_objective(pr, p) + 1e-9 * std::abs(g));
    }
  }
}

TEST_CASE("inner solver") {
  SUBCASE("symmetric two-link problem has a symmetric solution") {
    PowerInstance in;
    in.config = quiet_config();
    in.gains = make_gains(2, 2, {{0, 0, 5e-10}, {1, 1, 5e-10}, {0, 1, 2e-12}, {1, 0, 2e-12}});
    in.assignment = LinkAssignment(2);
    in.assignment.cells[0] = {{0}, {}};
    in.assignment.cells[1] = {{1}, {}};
    in.queues = QueueState(2, 2);
    in.queues.q_ul = {30000, 30000};
    in.queues.z_ul = {3e9, 3e9};
    in.phy = PhyParams{kNoise, 1e11, 10e6};
    const auto pr = in.problem();
    CcpOptions opt;
    opt.relative_tolerance = 1e-12;
    opt.max_iterations = 500;
    const auto res = run_ccp(pr, Eigen::Vector2d(0.02, 0.07), opt);
    CHECK(std::abs(res.p[0] - res.p[1]) < 1e-6);
  }
  SUBCASE("never leaves the feasible set") {
    Rng rng(6);
    for (int i = 0; i < 30; ++i) {
      const auto in = random_power_instance(rng);
      const auto pr = in.problem();
      const auto start = find_feasible_start(pr, random_powers(pr, rng));
      REQUIRE(start);
      const auto tangent = linearize_convex(pr, *start);
      const auto res = solve_inner_convex(pr, tangent, *start);
      CHECK((pr.slack(res.p).array() > 0.0).all());
      CHECK(res.surrogate >= surrogate_objective(pr, tangent, *start) - 1e-9 * std::abs(res.surrogate));
    }
  }
}

TEST_CASE("CCP") {
  Rng rng(7);
  for (int i = 0; i < 30; ++i) {
    const auto in = random_power_instance(rng);
    const auto pr = in.problem();
    const auto res = run_ccp(pr, random_powers(pr, rng));
    if (res.infeasible) continue;
    for (std::size_t j = 1; j < res.objective_trace.size(); ++j)
      CHECK(res.objective_trace[j] >= res.objective_trace[j - 1] - 1e-9 * std::abs(res.objective_trace[j - 1]));
    CHECK((pr.slack(res.p).array() >= 0.0).all());
    // The affine SIC rows imply non-negative SIC margins at the result.
    const auto alloc = pr.to_allocation(res.p, in.num_users);
    for (int b = 0; b < in.assignment.num_sbs(); ++b)
      for (const auto& m : sic_feasibility(in.assignment, alloc, in.gains, in.phy, b))
        CHECK(m.margin >= -1e-9);
  }
  SUBCASE("iteration cap is reported") {
    const auto in = random_power_instance(rng);
    CcpOptions opt;
    opt.max_iterations = 1;
    opt.relative_tolerance = 1e-300;
    const auto pr = in.problem();
    const auto res = run_ccp(pr, random_powers(pr, rng), opt);
    CHECK(res.iterations == 1);
  }
  SUBCASE("empty assignment") {
    PowerInstance in;
    in.assignment = LinkAssignment(1);
    in.queues = QueueState(0, 1);
    in.gains = GainTable(1, 0);
    const auto pr = in.problem();
    const auto res = run_ccp(pr, Eigen::VectorXd());
    CHECK_FALSE(res.infeasible);
    CHECK(res.p.size() == 0);
  }
}

TEST_CASE("better SI cancellation never hurts an FD cell") {
  PowerInstance in;
  in.config = quiet_config();
  in.gains = make_gains(1, 2, {{0, 0, 3e-10}, {0, 1, 2e-10}}, {{0, 1, 1e-12}});
  in.assignment = LinkAssignment(1);
  in.assignment.cells[0] = {{0}, {1}};
  in.queues = QueueState(2, 1);
  in.queues.q_ul = {40000, 0};
  in.queues.q_dl = {0, 40000};
  in.queues.z_ul = {1e9, 0.0};
  in.queues.z_dl = {1e9};
  double last = -std::numeric_limits<double>::infinity();
  double last_sinr = 0.0;
  for (double db : {30.0, 50.0, 70.0, 90.0, 110.0}) {
    in.config.si_cancellation = db_to_linear(db);
    in.phy = PhyParams::from(in.config);
    const auto pr = in.problem();
    const auto res = run_ccp(pr, Eigen::Vector2d(0.05, 0.1));
    const double value = res.objective_trace.back();
    CHECK(value >= last - 1e-9 * std::abs(value));
    last = value;
    PowerAllocation fixed(2);
    fixed.ul[0] = 0.05;
    fixed.dl[1] = 0.1;
    const double sinr = compute_sinr(in.assignment, fixed, in.gains, in.phy, Direction::kUplink, 0, 0).sinr;
    CHECK(sinr > last_sinr);
    last_sinr = sinr;
  }
}
