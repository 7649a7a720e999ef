#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fdnoma/config.hpp"
#include "fdnoma/net_model.hpp"
#include "fdnoma/phy.hpp"
#include "fdnoma/traffic_queues.hpp"

namespace fdnoma {

/// One optimization variable: the UL power of a user or the DL power its SBS
/// spends on it.
struct UdpoVariable {
  int user = -1;
  int sbs = -1;
  Direction direction = Direction::kUplink;
};

/// Power optimization for a fixed assignment. Every SINR denominator is affine
/// in the power vector p:
///   rate term k = c_k * ln((noise + s_k p_k + A_k p) / (noise + A_k p))
/// with c_k = (Q + H) f_b tau / ln 2, so utilities are in queue-bits times
/// bits per subframe. Feasible set: C p <= d.
struct UdpoProblem {
  std::vector<UdpoVariable> vars;
  Eigen::VectorXd coeff;         // c_k
  Eigen::VectorXd signal_gain;   // s_k
  Eigen::MatrixXd interference;  // A, zero diagonal
  double noise = 0.0;
  Eigen::VectorXd power_cost;    // Z of the variable's power queue
  double omega_constant = 0.0;   // sum of Z * delta terms
  Eigen::VectorXd upper;         // per-variable power cap
  Eigen::MatrixXd constraint;    // C
  Eigen::VectorXd bound;         // d
  int num_sic_rows = 0;          // trailing rows of C that encode SIC

  int size() const { return static_cast<int>(vars.size()); }
  Eigen::VectorXd from_allocation(const PowerAllocation& powers) const;
  PowerAllocation to_allocation(const Eigen::VectorXd& p, int num_users) const;
  /// d - C p.
  Eigen::VectorXd slack(const Eigen::VectorXd& p) const;
};

/// Builds the problem. SIC for a DL NOMA pair (weak u, strong u') is imposed
/// as h_bu' (N0 + I_u) - h_bu (N0 + p_u' h_bu' + I_u') >= 0, the
/// cross-multiplied margin with the common p_u factor removed. It is affine,
/// and implies a non-negative margin.
UdpoProblem build_udpo(const LinkAssignment& assignment, const QueueState& queues,
                       const GainTable& gains, const PhyParams& phy, const ScenarioConfig& config);

/// Objective evaluated through the linear model.
double udpo_objective(const UdpoProblem& problem, const Eigen::VectorXd& p);

/// Same objective evaluated from the exact SINRs of an assignment; used to
/// cross-check the model.
double udpo_objective(const LinkAssignment& assignment, const PowerAllocation& powers,
                      const QueueState& queues, const GainTable& gains, const PhyParams& phy,
                      const ScenarioConfig& config);

/// F (concave), G (convex) and the affine Omega at p, with gradients.
struct DcSplit {
  double f = 0.0;
  double g = 0.0;
  double omega = 0.0;
  Eigen::VectorXd grad_f;
  Eigen::VectorXd grad_g;
  Eigen::VectorXd grad_omega;

  double total() const { return f + g + omega; }
};

DcSplit dc_split(const UdpoProblem& problem, const Eigen::VectorXd& p);

/// Tangent of G at a reference point. Since G is convex the tangent never
/// exceeds it, so F + tangent + Omega minorizes the objective.
struct AffineModel {
  Eigen::VectorXd reference;
  double value_at_reference = 0.0;
  Eigen::VectorXd gradient;

  double operator()(const Eigen::VectorXd& p) const {
    return value_at_reference + gradient.dot(p - reference);
  }
};

AffineModel linearize_convex(const UdpoProblem& problem, const Eigen::VectorXd& reference);

/// F + tangent + Omega.
double surrogate_objective(const UdpoProblem& problem, const AffineModel& tangent,
                           const Eigen::VectorXd& p);

struct BarrierOptions {
  double gap_tolerance = 1e-12;  // m / t on the normalized objective
  double t0 = 1.0;
  double mu = 10.0;
  double newton_tolerance = 1e-14;
  int max_newton_steps = 200;
};

struct InnerResult {
  Eigen::VectorXd p;
  double surrogate = 0.0;
  double duality_gap = 0.0;  // in objective units
  int newton_steps = 0;
  bool converged = false;
};

/// Log-barrier interior point with Newton steps, maximizing the concave
/// surrogate from a strictly feasible `start`.
InnerResult solve_inner_convex(const UdpoProblem& problem, const AffineModel& tangent,
                               const Eigen::VectorXd& start, const BarrierOptions& options = {});

/// Strictly feasible point: `guess` halved up to 10 times, then a point near
/// zero power. Nullopt when neither is strictly feasible.
std::optional<Eigen::VectorXd> find_feasible_start(const UdpoProblem& problem,
                                                   const Eigen::VectorXd& guess);

struct CcpOptions {
  int max_iterations = 50;
  double relative_tolerance = 1e-3;  // of |objective at the start|
  BarrierOptions barrier;
};

struct CcpResult {
  Eigen::VectorXd p;
  std::vector<double> objective_trace;  // start point first
  int iterations = 0;
  bool hit_iteration_cap = false;
  bool infeasible = false;  // no strictly feasible start; p is the guess
};

/// Convex-concave procedure from `guess`: linearize G, solve the surrogate,
/// repeat until the improvement is at most the tolerance. An inner solution
/// that would lower the objective is discarded and the procedure stops.
CcpResult run_ccp(const UdpoProblem& problem, const Eigen::VectorXd& guess,
                  const CcpOptions& options = {});

CcpOptions ccp_options(const ScenarioConfig& config);

}  // namespace fdnoma
