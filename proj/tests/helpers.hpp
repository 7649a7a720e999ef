#pragma once

#include <cmath>
#include <initializer_list>
#include <tuple>

#include "fdnoma/config.hpp"
#include "fdnoma/net_model.hpp"

namespace fdnoma::testing {

inline constexpr double kNoise = 3.1622776601683797e-13;

/// Deterministic channel: no shadowing, no fast fading.
inline ScenarioConfig quiet_config() {
  ScenarioConfig c;
  c.shadowing_std_db = 0.0;
  c.fast_fading = false;
  return c;
}

struct GainEntry {
  int a;
  int b;
  double gain;
};

/// Gain table with every entry at `floor` except the listed ones.
inline GainTable make_gains(int num_sbs, int num_users, std::initializer_list<GainEntry> sbs_user,
                            std::initializer_list<GainEntry> user_user = {},
                            std::initializer_list<GainEntry> sbs_sbs = {},
                            double floor = 1e-20) {
  GainTable g(num_sbs, num_users);
  for (auto& v : g.raw()) v = floor;
  for (const auto& e : sbs_user) g.set_sbs_user(e.a, e.b, e.gain);
  for (const auto& e : user_user) g.set_user_user(e.a, e.b, e.gain);
  for (const auto& e : sbs_sbs) g.set_sbs_sbs(e.a, e.b, e.gain);
  return g;
}

/// Relative difference scaled by max(|a|, |b|, 1e-300).
inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace fdnoma::testing
