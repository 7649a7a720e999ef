#include "fdnoma/phy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fdnoma {

std::string_view to_string(CellMode mode) {
  switch (mode) {
    case CellMode::kIdle: return "idle";
    case CellMode::kHdOmaUl: return "hd-oma-ul";
    case CellMode::kHdOmaDl: return "hd-oma-dl";
    case CellMode::kHdNomaUl: return "hd-noma-ul";
    case CellMode::kHdNomaDl: return "hd-noma-dl";
    case CellMode::kFdOma: return "fd-oma";
  }
  return "unknown";
}

CellMode CellAssignment::mode() const {
  if (!ul.empty() && !dl.empty()) return CellMode::kFdOma;
  if (ul.size() == 1) return CellMode::kHdOmaUl;
  if (ul.size() > 1) return CellMode::kHdNomaUl;
  if (dl.size() == 1) return CellMode::kHdOmaDl;
  if (dl.size() > 1) return CellMode::kHdNomaDl;
  return CellMode::kIdle;
}

std::optional<LinkAssignment::Serving> LinkAssignment::serving(int user) const {
  for (int b = 0; b < num_sbs(); ++b) {
    const auto& cell = cells[b];
    if (std::find(cell.ul.begin(), cell.ul.end(), user) != cell.ul.end())
      return Serving{b, Direction::kUplink};
    if (std::find(cell.dl.begin(), cell.dl.end(), user) != cell.dl.end())
      return Serving{b, Direction::kDownlink};
  }
  return std::nullopt;
}

void LinkAssignment::validate(int num_users, int quota) const {
  std::vector<int> seen(num_users, 0);
  for (int b = 0; b < num_sbs(); ++b) {
    const auto& cell = cells[b];
    const auto tag = "SBS " + std::to_string(b) + ": ";
    if (static_cast<int>(cell.ul.size()) > quota || static_cast<int>(cell.dl.size()) > quota)
      throw std::logic_error(tag + "NOMA quota exceeded");
    if (cell.ul.size() * cell.dl.size() > 1)
      throw std::logic_error(tag + "FD combined with NOMA");
    for (const auto* set : {&cell.ul, &cell.dl}) {
      for (int u : *set) {
        if (u < 0 || u >= num_users) throw std::logic_error(tag + "user index out of range");
        if (++seen[u] > 1)
          throw std::logic_error("user " + std::to_string(u) + " served more than once");
      }
    }
  }
}

double PowerAllocation::sbs_dl_total(const CellAssignment& cell) const {
  double total = 0.0;
  for (int u : cell.dl) total += dl[u];
  return total;
}

PhyParams PhyParams::from(const ScenarioConfig& config) {
  return {config.noise_power(), config.si_cancellation, config.bandwidth};
}

bool ranks_stronger(const GainTable& gains, int sbs, int a, int b) {
  const double ga = gains.sbs_user(sbs, a);
  const double gb = gains.sbs_user(sbs, b);
  return ga > gb || (ga == gb && a < b);
}

std::vector<int> noma_decode_order(std::span<const int> users, const GainTable& gains, int sbs,
                                   Direction /*direction*/) {
  std::vector<int> order(users.begin(), users.end());
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return ranks_stronger(gains, sbs, a, b); });
  return order;
}

namespace {

// Intra-cell NOMA interference at `user` under the strength ranking.
double noma_ul_term(const CellAssignment& cell, const PowerAllocation& p, const GainTable& g,
                    int sbs, int user) {
  double sum = 0.0;
  for (int v : cell.ul)
    if (v != user && ranks_stronger(g, sbs, user, v)) sum += p.ul[v] * g.sbs_user(sbs, v);
  return sum;
}

double noma_dl_term(const CellAssignment& cell, const PowerAllocation& p, const GainTable& g,
                    int sbs, int user) {
  double sum = 0.0;
  for (int v : cell.dl)
    if (v != user && ranks_stronger(g, sbs, v, user)) sum += p.dl[v] * g.sbs_user(sbs, user);
  return sum;
}

double own_cell_ul_to_dl(const CellAssignment& cell, const PowerAllocation& p, const GainTable& g,
                         int user) {
  double sum = 0.0;
  for (int v : cell.ul)
    if (v != user) sum += p.ul[v] * g.user_user(v, user);
  return sum;
}

void require_served(const LinkAssignment& a, Direction d, int sbs, int user) {
  const auto& set = a.cells.at(sbs).users(d);
  if (std::find(set.begin(), set.end(), user) == set.end())
    throw std::invalid_argument("user " + std::to_string(user) + " is not served by SBS " +
                                std::to_string(sbs) + " in " + std::string(to_string(d)));
}

// Interference at the strong user `decoder` while decoding `user`'s message,
// excluding the decoder's own signal; `inter_cell` is the DL-DL plus
// inter-cell UL-DL term at the decoder.
double sic_decoder_denominator(const CellAssignment& cell, const PowerAllocation& p,
                               const GainTable& g, const PhyParams& phy, int sbs, int decoder,
                               double inter_cell) {
  return p.dl[decoder] * g.sbs_user(sbs, decoder) + phy.noise + inter_cell +
         own_cell_ul_to_dl(cell, p, g, decoder) + noma_dl_term(cell, p, g, sbs, decoder);
}

template <typename InterCellAtUser, typename SinrOf>
std::vector<SicMargin> sic_margins(const LinkAssignment& a, const PowerAllocation& p,
                                   const GainTable& g, const PhyParams& phy, int sbs,
                                   InterCellAtUser inter_cell_at, SinrOf sinr_of) {
  std::vector<SicMargin> out;
  const auto& cell = a.cells.at(sbs);
  for (int weak : cell.dl) {
    for (int strong : cell.dl) {
      if (strong == weak || !ranks_stronger(g, sbs, strong, weak)) continue;
      const double denom =
          sic_decoder_denominator(cell, p, g, phy, sbs, strong, inter_cell_at(strong));
      const double decode_sinr = p.dl[weak] * g.sbs_user(sbs, strong) / denom;
      out.push_back({weak, strong, decode_sinr - sinr_of(weak)});
    }
  }
  return out;
}

}  // namespace

SinrResult compute_sinr(const LinkAssignment& a, const PowerAllocation& p, const GainTable& g,
                        const PhyParams& phy, Direction direction, int sbs, int user) {
  require_served(a, direction, sbs, user);
  SinrResult r;
  r.noise = phy.noise;
  auto& in = r.interference;
  const auto& cell = a.cells[sbs];
  if (direction == Direction::kUplink) {
    r.signal = p.ul[user] * g.sbs_user(sbs, user);
    for (int b = 0; b < a.num_sbs(); ++b) {
      if (b == sbs) continue;
      for (int v : a.cells[b].ul) in.ul_ul += p.ul[v] * g.sbs_user(sbs, v);
      in.dl_ul += p.sbs_dl_total(a.cells[b]) * g.sbs_sbs(b, sbs);
    }
    in.noma_ul = noma_ul_term(cell, p, g, sbs, user);
    in.self_interference = p.sbs_dl_total(cell) / phy.si_cancellation;
  } else {
    r.signal = p.dl[user] * g.sbs_user(sbs, user);
    for (int b = 0; b < a.num_sbs(); ++b) {
      for (int v : a.cells[b].ul) in.ul_dl += p.ul[v] * g.user_user(v, user);
      if (b != sbs) in.dl_dl += p.sbs_dl_total(a.cells[b]) * g.sbs_user(b, user);
    }
    in.noma_dl = noma_dl_term(cell, p, g, sbs, user);
  }
  r.sinr = r.signal / r.denominator();
  return r;
}

std::vector<SicMargin> sic_feasibility(const LinkAssignment& a, const PowerAllocation& p,
                                       const GainTable& g, const PhyParams& phy, int sbs) {
  auto inter_cell = [&](int user) {
    double sum = 0.0;
    for (int b = 0; b < a.num_sbs(); ++b) {
      if (b == sbs) continue;
      sum += p.sbs_dl_total(a.cells[b]) * g.sbs_user(b, user);
      for (int v : a.cells[b].ul) sum += p.ul[v] * g.user_user(v, user);
    }
    return sum;
  };
  auto sinr = [&](int user) {
    return compute_sinr(a, p, g, phy, Direction::kDownlink, sbs, user).sinr;
  };
  return sic_margins(a, p, g, phy, sbs, inter_cell, sinr);
}

bool sic_feasible(std::span<const SicMargin> margins) {
  return std::all_of(margins.begin(), margins.end(),
                     [](const SicMargin& m) { return m.margin >= 0.0; });
}

double service_rate(double sinr, double bandwidth) { return bandwidth * std::log2(1.0 + sinr); }

double estimated_sinr(const LinkAssignment& a, const PowerAllocation& p, const GainTable& g,
                      const PhyParams& phy, const LearnedInterference& learned, int sbs, int user,
                      Direction direction) {
  require_served(a, direction, sbs, user);
  const auto& cell = a.cells[sbs];
  if (direction == Direction::kUplink) {
    const double denom = phy.noise + learned.sbs[sbs] + noma_ul_term(cell, p, g, sbs, user) +
                         p.sbs_dl_total(cell) / phy.si_cancellation;
    return p.ul[user] * g.sbs_user(sbs, user) / denom;
  }
  const double denom = phy.noise + learned.user[user] + noma_dl_term(cell, p, g, sbs, user) +
                       own_cell_ul_to_dl(cell, p, g, user);
  return p.dl[user] * g.sbs_user(sbs, user) / denom;
}

std::vector<SicMargin> estimated_sic_margins(const LinkAssignment& a, const PowerAllocation& p,
                                             const GainTable& g, const PhyParams& phy,
                                             const LearnedInterference& learned, int sbs) {
  auto inter_cell = [&](int user) { return learned.user[user]; };
  auto sinr = [&](int user) {
    return estimated_sinr(a, p, g, phy, learned, sbs, user, Direction::kDownlink);
  };
  return sic_margins(a, p, g, phy, sbs, inter_cell, sinr);
}

InterferenceMeasurement measure_inter_cell(const LinkAssignment& a, const PowerAllocation& p,
                                           const GainTable& g) {
  InterferenceMeasurement m;
  m.sbs.resize(a.num_sbs());
  m.user.resize(g.num_users());
  std::vector<double> dl_total(a.num_sbs());
  for (int b = 0; b < a.num_sbs(); ++b) dl_total[b] = p.sbs_dl_total(a.cells[b]);

  for (int b = 0; b < a.num_sbs(); ++b) {
    if (!a.cells[b].ul.empty()) {
      double sum = 0.0;
      for (int other = 0; other < a.num_sbs(); ++other) {
        if (other == b) continue;
        for (int v : a.cells[other].ul) sum += p.ul[v] * g.sbs_user(b, v);
        sum += dl_total[other] * g.sbs_sbs(other, b);
      }
      m.sbs[b] = sum;
    }
    for (int u : a.cells[b].dl) {
      double sum = 0.0;
      for (int other = 0; other < a.num_sbs(); ++other) {
        if (other == b) continue;
        sum += dl_total[other] * g.sbs_user(other, u);
        for (int v : a.cells[other].ul) sum += p.ul[v] * g.user_user(v, u);
      }
      m.user[u] = sum;
    }
  }
  return m;
}

}  // namespace fdnoma
