#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "fdnoma/config.hpp"
#include "fdnoma/rng.hpp"

namespace fdnoma {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

enum class LinkKind { kSbsUser, kUserUser, kSbsSbs };

/// Thrown when the requested geometry cannot be realized.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distances below this are clamped before evaluating pathloss.
inline constexpr double kMinLinkDistance = 1.0;

double pathloss_db(const PathlossModel& model, LinkKind kind, double distance);

/// Linear gain 10^(-(PL + shadow)/10).
double link_gain(LinkKind kind, double distance, double shadow_db,
                 const PathlossModel& model = {});

/// Symmetric table of linear gains between every pair of distinct nodes.
/// Nodes [0, B) are SBSs, nodes [B, B+U) are users. Each unordered pair is
/// stored once, so lookups of (x, y) and (y, x) read the same value.
class GainTable {
 public:
  GainTable() = default;
  GainTable(int num_sbs, int num_users);

  int num_sbs() const { return num_sbs_; }
  int num_users() const { return num_users_; }
  int num_nodes() const { return num_sbs_ + num_users_; }
  int sbs_node(int b) const { return b; }
  int user_node(int u) const { return num_sbs_ + u; }
  std::size_t num_stored_pairs() const { return values_.size(); }

  double between(int node_a, int node_b) const { return values_[index(node_a, node_b)]; }
  void set(int node_a, int node_b, double gain) { values_[index(node_a, node_b)] = gain; }

  double sbs_user(int b, int u) const { return between(sbs_node(b), user_node(u)); }
  double user_user(int u, int v) const { return between(user_node(u), user_node(v)); }
  double sbs_sbs(int a, int b) const { return between(sbs_node(a), sbs_node(b)); }
  void set_sbs_user(int b, int u, double g) { set(sbs_node(b), user_node(u), g); }
  void set_user_user(int u, int v, double g) { set(user_node(u), user_node(v), g); }
  void set_sbs_sbs(int a, int b, double g) { set(sbs_node(a), sbs_node(b), g); }

  std::span<double> raw() { return values_; }
  std::span<const double> raw() const { return values_; }

 private:
  std::size_t index(int a, int b) const;

  int num_sbs_ = 0;
  int num_users_ = 0;
  std::vector<double> values_;
};

/// Multiplies every stored gain by an independent unit-mean exponential draw.
GainTable apply_fading(const GainTable& gains, Rng& rng);

struct NetworkTopology {
  std::vector<Point> sbs_positions;
  std::vector<Point> user_positions;
  /// Nearest SBS per user.
  std::vector<int> home_sbs;
  /// SBSs within the cell radius of each user, ascending; always holds home_sbs.
  std::vector<std::vector<int>> coverage;
  /// Large-scale gains (pathloss and shadowing, no fast fading).
  GainTable gains;

  int num_sbs() const { return static_cast<int>(sbs_positions.size()); }
  int num_users() const { return static_cast<int>(user_positions.size()); }
};

struct PlacementOverrides {
  std::optional<std::vector<Point>> sbs_positions;
  std::optional<int> num_users;
};

/// Places SBSs uniformly over the area (keeping each cell disc inside it), draws
/// a Poisson user count with mean num_sbs * mean_users_per_sbs and drops each
/// user uniformly in a uniformly chosen cell disc. Pure function of
/// (config, seed, overrides).
NetworkTopology generate_topology(const ScenarioConfig& config, std::uint64_t seed,
                                  const PlacementOverrides& overrides = {});

/// Builds a topology from fixed positions. Shadowing is drawn from `shadow_rng`
/// when given, otherwise zero.
NetworkTopology build_topology(const ScenarioConfig& config, std::vector<Point> sbs_positions,
                               std::vector<Point> user_positions, Rng* shadow_rng = nullptr);

nlohmann::json to_json(const NetworkTopology& topology);

}  // namespace fdnoma
