#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "fdnoma/config.hpp"

using namespace fdnoma;

TEST_CASE("default scenario is valid and matches the simulation table") {
  ScenarioConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.num_sbs == 4);
  CHECK(c.mean_users_per_sbs == 5.0);
  CHECK(c.num_subframes == 500);
  CHECK(c.cell_radius == 40.0);
  CHECK(c.bandwidth == 10e6);
  CHECK(c.lyapunov_v == 5e7);
  CHECK(c.nu1 == 0.1);
  CHECK(c.delta_ul == doctest::Approx(0.5 * c.p_max_ul).epsilon(1e-15));
  CHECK(c.delta_dl == doctest::Approx(0.9 * c.p_max_dl).epsilon(1e-15));
  CHECK(c.p_max_ul == doctest::Approx(dbm_to_watts(20.0)).epsilon(1e-15));
  CHECK(c.p_max_dl == doctest::Approx(dbm_to_watts(22.0)).epsilon(1e-15));
  CHECK(c.si_cancellation == doctest::Approx(db_to_linear(110.0)).epsilon(1e-15));
}

TEST_CASE("noise power and service bound") {
  ScenarioConfig c;
  // -174 dBm/Hz + 70 dB + 9 dB noise figure.
  CHECK(c.noise_power() == doctest::Approx(3.1622776601683797e-13).epsilon(1e-12));
  CHECK(c.max_service_bits() == doctest::Approx(99672.26258835992).epsilon(1e-12));
  CHECK(c.max_arrival_bits() == 20.0 * c.mean_packet_size);
}

TEST_CASE("unit conversions") {
  CHECK(db_to_linear(30.0) == doctest::Approx(1000.0));
  CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
}

TEST_CASE("config file parsing") {
  std::istringstream in(R"(# scenario
num_sbs = 6
mean_users_per_sbs = 7.5   # trailing comment
p_max_ul_dbm = 23
si_cancellation_db = 90
fast_fading = false
rng_seed = 12345678901
pathloss_sbs_user_slope = 37.0
)");
  const auto c = parse_config(in);
  CHECK(c.num_sbs == 6);
  CHECK(c.mean_users_per_sbs == 7.5);
  CHECK(c.p_max_ul == doctest::Approx(0.19952623149688797).epsilon(1e-12));
  CHECK(c.si_cancellation == doctest::Approx(1e9).epsilon(1e-12));
  CHECK_FALSE(c.fast_fading);
  CHECK(c.rng_seed == 12345678901ULL);
  CHECK(c.pathloss.sbs_user_slope == 37.0);
  SUBCASE("power thresholds follow the maximum powers unless given") {
    CHECK(c.delta_ul == doctest::Approx(0.5 * c.p_max_ul));
    CHECK(c.delta_dl == doctest::Approx(0.9 * c.p_max_dl));
  }
}

TEST_CASE("explicit thresholds are kept") {
  std::istringstream in("p_max_ul = 0.2\ndelta_ul = 0.03\n");
  const auto c = parse_config(in);
  CHECK(c.delta_ul == 0.03);
}

TEST_CASE("malformed config input is rejected") {
  auto parse = [](const char* text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  CHECK_THROWS_AS(parse("no_such_key = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("num_sbs\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("num_sbs = four\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("num_sbs = 2.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("fast_fading = maybe\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("num_sbs = 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("nu1 = 1.5\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("delta_ul = 5\n"), std::invalid_argument);
  CHECK_THROWS_AS(load_config("/nonexistent/scenario.cfg"), std::runtime_error);
}

TEST_CASE("full-scale preset") {
  ScenarioConfig c;
  apply_full_scale(c);
  CHECK(c.num_sbs == 10);
  CHECK(c.mean_users_per_sbs == 10.0);
  CHECK(c.num_subframes == 4000);
  CHECK_NOTHROW(c.validate());
}
