#include "fdnoma/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fdnoma {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  require(num_sbs >= 1, "num_sbs must be >= 1");
  require(area_side > 0.0, "area_side must be positive");
  require(cell_radius > 0.0, "cell_radius must be positive");
  require(mean_users_per_sbs >= 0.0, "mean_users_per_sbs must be >= 0");
  require(bandwidth > 0.0, "bandwidth must be positive");
  require(p_max_ul > 0.0 && p_max_dl > 0.0, "maximum powers must be positive");
  require(si_cancellation > 0.0, "si_cancellation must be positive");
  require(noma_quota >= 1, "noma_quota must be >= 1");
  require(lyapunov_v >= 0.0, "lyapunov_v must be >= 0");
  require(delta_ul > 0.0 && delta_ul <= p_max_ul, "delta_ul must lie in (0, p_max_ul]");
  require(delta_dl > 0.0 && delta_dl <= p_max_dl, "delta_dl must lie in (0, p_max_dl]");
  require(nu1 > 0.0 && nu1 <= 1.0, "nu1 must lie in (0, 1]");
  require(nu2 > 0.0 && nu2 <= 1.0, "nu2 must lie in (0, 1]");
  require(lambda_ul >= 0.0 && lambda_dl >= 0.0, "arrival rates must be >= 0");
  require(mean_packet_size > 0.0, "mean_packet_size must be positive");
  require(subframe_duration > 0.0, "subframe_duration must be positive");
  require(num_subframes >= 0, "num_subframes must be >= 0");
  require(shadowing_std_db >= 0.0, "shadowing_std_db must be >= 0");
  require(arrival_cap_factor > 0.0, "arrival_cap_factor must be positive");
  require(noma_gain_ratio >= 1.0, "noma_gain_ratio must be >= 1");
  require(fd_pair_gain_threshold > 0.0, "fd_pair_gain_threshold must be positive");
  require(ccp_max_iterations >= 1, "ccp_max_iterations must be >= 1");
  require(ccp_relative_tolerance > 0.0, "ccp_relative_tolerance must be positive");
}

double ScenarioConfig::noise_power() const {
  return dbm_to_watts(noise_psd_dbm_hz + noise_figure_db + linear_to_db(bandwidth));
}

double ScenarioConfig::max_service_bits() const {
  return bandwidth * std::log2(1.0 + db_to_linear(sinr_cap_db)) * subframe_duration;
}

double ScenarioConfig::max_arrival_bits() const {
  return arrival_cap_factor * mean_packet_size;
}

namespace {

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw std::invalid_argument("config key '" + key + "': not a number: " + value);
  return out;
}

int to_int(const std::string& key, const std::string& value) {
  double v = to_double(key, value);
  if (v != std::floor(v)) throw std::invalid_argument("config key '" + key + "': not an integer");
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config key '" + key + "': not a boolean: " + value);
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const char* key, double ScenarioConfig::*field) {
      t[key] = [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
        c.*field = to_double(k, v);
      };
    };
    auto path = [&t](const char* key, double PathlossModel::*field) {
      t[key] = [field](ScenarioConfig& c, const std::string& k, const std::string& v) {
        c.pathloss.*field = to_double(k, v);
      };
    };
    real("area_side", &ScenarioConfig::area_side);
    real("mean_users_per_sbs", &ScenarioConfig::mean_users_per_sbs);
    real("cell_radius", &ScenarioConfig::cell_radius);
    real("bandwidth", &ScenarioConfig::bandwidth);
    real("p_max_ul", &ScenarioConfig::p_max_ul);
    real("p_max_dl", &ScenarioConfig::p_max_dl);
    real("si_cancellation", &ScenarioConfig::si_cancellation);
    real("lyapunov_v", &ScenarioConfig::lyapunov_v);
    real("delta_ul", &ScenarioConfig::delta_ul);
    real("delta_dl", &ScenarioConfig::delta_dl);
    real("nu1", &ScenarioConfig::nu1);
    real("nu2", &ScenarioConfig::nu2);
    real("lambda_ul", &ScenarioConfig::lambda_ul);
    real("lambda_dl", &ScenarioConfig::lambda_dl);
    real("mean_packet_size", &ScenarioConfig::mean_packet_size);
    real("subframe_duration", &ScenarioConfig::subframe_duration);
    real("shadowing_std_db", &ScenarioConfig::shadowing_std_db);
    real("noise_psd_dbm_hz", &ScenarioConfig::noise_psd_dbm_hz);
    real("noise_figure_db", &ScenarioConfig::noise_figure_db);
    real("sinr_cap_db", &ScenarioConfig::sinr_cap_db);
    real("arrival_cap_factor", &ScenarioConfig::arrival_cap_factor);
    real("noma_gain_ratio", &ScenarioConfig::noma_gain_ratio);
    real("fd_pair_gain_threshold", &ScenarioConfig::fd_pair_gain_threshold);
    real("ccp_relative_tolerance", &ScenarioConfig::ccp_relative_tolerance);
    path("pathloss_sbs_user_intercept", &PathlossModel::sbs_user_intercept);
    path("pathloss_sbs_user_slope", &PathlossModel::sbs_user_slope);
    path("pathloss_user_user_intercept", &PathlossModel::user_user_intercept);
    path("pathloss_user_user_slope", &PathlossModel::user_user_slope);
    path("pathloss_sbs_sbs_intercept", &PathlossModel::sbs_sbs_intercept);
    path("pathloss_sbs_sbs_slope", &PathlossModel::sbs_sbs_slope);
    t["num_sbs"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.num_sbs = to_int(k, v);
    };
    t["noma_quota"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.noma_quota = to_int(k, v);
    };
    t["num_subframes"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.num_subframes = to_int(k, v);
    };
    t["ccp_max_iterations"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.ccp_max_iterations = to_int(k, v);
    };
    t["rng_seed"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      try {
        c.rng_seed = std::stoull(v);
      } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + k + "': not a seed: " + v);
      }
    };
    t["fast_fading"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.fast_fading = to_bool(k, v);
    };
    t["fd_pair_above_threshold"] = [](ScenarioConfig& c, const std::string& k,
                                      const std::string& v) {
      c.fd_pair_above_threshold = to_bool(k, v);
    };
    t["p_max_ul_dbm"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.p_max_ul = dbm_to_watts(to_double(k, v));
    };
    t["p_max_dl_dbm"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.p_max_dl = dbm_to_watts(to_double(k, v));
    };
    t["si_cancellation_db"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.si_cancellation = db_to_linear(to_double(k, v));
    };
    return t;
  }();
  return table;
}

}  // namespace

void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end()) throw std::invalid_argument("unknown config key: " + key);
  it->second(config, key, value);
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig config;
  bool delta_ul_given = false;
  bool delta_dl_given = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    set_config_value(config, key, value);
    delta_ul_given |= key == "delta_ul";
    delta_dl_given |= key == "delta_dl";
  }
  if (!delta_ul_given) config.delta_ul = 0.5 * config.p_max_ul;
  if (!delta_dl_given) config.delta_dl = 0.9 * config.p_max_dl;
  config.validate();
  return config;
}

void apply_full_scale(ScenarioConfig& config) {
  config.num_sbs = 10;
  config.mean_users_per_sbs = 10.0;
  config.num_subframes = 4000;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  return parse_config(in);
}

}  // namespace fdnoma
