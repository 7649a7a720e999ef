#include "fdnoma/net_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fdnoma {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double pathloss_db(const PathlossModel& model, LinkKind kind, double d) {
  const double log_km = std::log10(std::max(d, kMinLinkDistance) / 1000.0);
  switch (kind) {
    case LinkKind::kSbsUser:
      return model.sbs_user_intercept + model.sbs_user_slope * log_km;
    case LinkKind::kUserUser:
      return model.user_user_intercept + model.user_user_slope * log_km;
    case LinkKind::kSbsSbs:
      return model.sbs_sbs_intercept + model.sbs_sbs_slope * log_km;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double link_gain(LinkKind kind, double d, double shadow_db, const PathlossModel& model) {
  return std::pow(10.0, -(pathloss_db(model, kind, d) + shadow_db) / 10.0);
}

GainTable::GainTable(int num_sbs, int num_users) : num_sbs_(num_sbs), num_users_(num_users) {
  const auto n = static_cast<std::size_t>(num_sbs + num_users);
  values_.assign(n * (n - (n > 0 ? 1 : 0)) / 2, 0.0);
}

std::size_t GainTable::index(int a, int b) const {
  if (a == b || a < 0 || b < 0 || a >= num_nodes() || b >= num_nodes())
    throw std::out_of_range("GainTable: invalid node pair");
  if (a > b) std::swap(a, b);
  // Row-major packed strict upper triangle.
  const auto n = static_cast<std::size_t>(num_nodes());
  const auto i = static_cast<std::size_t>(a);
  const auto j = static_cast<std::size_t>(b);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

GainTable apply_fading(const GainTable& gains, Rng& rng) {
  GainTable faded = gains;
  std::exponential_distribution<double> fading(1.0);
  for (double& g : faded.raw()) g *= fading(rng);
  return faded;
}

namespace {

Point uniform_in_disc(Point center, double radius, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double theta = 2.0 * std::numbers::pi * unit(rng);
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace

NetworkTopology build_topology(const ScenarioConfig& config, std::vector<Point> sbs_positions,
                               std::vector<Point> user_positions, Rng* shadow_rng) {
  if (sbs_positions.empty()) throw GeometryError("topology needs at least one SBS");
  NetworkTopology topo;
  topo.sbs_positions = std::move(sbs_positions);
  topo.user_positions = std::move(user_positions);
  const int num_sbs = topo.num_sbs();
  const int num_users = topo.num_users();

  topo.home_sbs.resize(num_users);
  topo.coverage.resize(num_users);
  for (int u = 0; u < num_users; ++u) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int b = 0; b < num_sbs; ++b) {
      const double d = distance(topo.user_positions[u], topo.sbs_positions[b]);
      if (d < best_d) {
        best_d = d;
        best = b;
      }
      if (d <= config.cell_radius) topo.coverage[u].push_back(b);
    }
    topo.home_sbs[u] = best;
    if (std::find(topo.coverage[u].begin(), topo.coverage[u].end(), best) == topo.coverage[u].end()) {
      topo.coverage[u].push_back(best);
      std::sort(topo.coverage[u].begin(), topo.coverage[u].end());
    }
  }

  topo.gains = GainTable(num_sbs, num_users);
  std::normal_distribution<double> shadow(0.0, config.shadowing_std_db);
  auto draw = [&]() { return shadow_rng != nullptr ? shadow(*shadow_rng) : 0.0; };
  auto position = [&](int node) {
    return node < num_sbs ? topo.sbs_positions[node] : topo.user_positions[node - num_sbs];
  };
  const int num_nodes = num_sbs + num_users;
  for (int a = 0; a < num_nodes; ++a) {
    for (int b = a + 1; b < num_nodes; ++b) {
      LinkKind kind = LinkKind::kUserUser;
      if (a < num_sbs && b < num_sbs) {
        kind = LinkKind::kSbsSbs;
      } else if (a < num_sbs || b < num_sbs) {
        kind = LinkKind::kSbsUser;
      }
      topo.gains.set(a, b, link_gain(kind, distance(position(a), position(b)), draw(), config.pathloss));
    }
  }
  return topo;
}

NetworkTopology generate_topology(const ScenarioConfig& config, std::uint64_t seed,
                                  const PlacementOverrides& overrides) {
  if (config.num_sbs <= 0 && !overrides.sbs_positions)
    throw GeometryError("num_sbs must be at least 1");
  config.validate();
  Rng rng = make_stream(seed, Stream::kTopology);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Point> sbs;
  if (overrides.sbs_positions) {
    sbs = *overrides.sbs_positions;
    if (sbs.empty()) throw GeometryError("num_sbs must be at least 1");
  } else {
    const double margin = config.cell_radius;
    const double span = config.area_side - 2.0 * margin;
    if (span < 0.0)
      throw GeometryError("area too small: side " + std::to_string(config.area_side) +
                          " m cannot hold a cell of radius " + std::to_string(config.cell_radius) + " m");
    sbs.reserve(config.num_sbs);
    for (int b = 0; b < config.num_sbs; ++b)
      sbs.push_back({margin + span * unit(rng), margin + span * unit(rng)});
  }

  int num_users = 0;
  if (overrides.num_users) {
    num_users = *overrides.num_users;
  } else {
    const double mean = config.mean_users_per_sbs * static_cast<double>(sbs.size());
    if (mean > 0.0) num_users = std::poisson_distribution<int>(mean)(rng);
  }

  std::vector<Point> users;
  users.reserve(num_users);
  std::uniform_int_distribution<int> pick_cell(0, static_cast<int>(sbs.size()) - 1);
  for (int u = 0; u < num_users; ++u)
    users.push_back(uniform_in_disc(sbs[pick_cell(rng)], config.cell_radius, rng));

  Rng shadow_rng = make_stream(seed, Stream::kShadowing);
  return build_topology(config, std::move(sbs), std::move(users), &shadow_rng);
}

nlohmann::json to_json(const NetworkTopology& topo) {
  nlohmann::json j;
  auto points = [](const std::vector<Point>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back({p.x, p.y});
    return arr;
  };
  j["sbs_positions"] = points(topo.sbs_positions);
  j["user_positions"] = points(topo.user_positions);
  j["home_sbs"] = topo.home_sbs;
  j["coverage"] = topo.coverage;
  nlohmann::json gains = nlohmann::json::array();
  const int n = topo.gains.num_nodes();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) gains.push_back({a, b, topo.gains.between(a, b)});
  j["gains"] = std::move(gains);
  j["num_sbs"] = topo.num_sbs();
  j["num_users"] = topo.num_users();
  return j;
}

}  // namespace fdnoma
