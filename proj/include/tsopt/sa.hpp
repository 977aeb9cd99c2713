#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsopt/errors.hpp"
#include "tsopt/linalg.hpp"
#include "tsopt/rng.hpp"

namespace tsopt::sa {

// Learning-rate pair for the coupled iterates. The slow rate a and the fast
// rate b follow a0*(n+1)^-alpha and b0*(n+1)^-beta for the 0-based step index
// n, so the first step applies the base rates. constant_mode freezes both at
// their base values for the equal-time-scale experiments.
struct Schedule {
  double a0 = 1.0;
  double b0 = 1.0;
  double alpha_exp = 1.0;
  double beta_exp = 0.6;
  bool constant_mode = false;

  Schedule() = default;
  Schedule(double a0_, double b0_, double alpha, double beta,
           bool constant = false);

  double slow_rate(std::size_t n) const;
  double fast_rate(std::size_t n) const;

  nlohmann::json to_json() const;
  static Schedule from_json(const nlohmann::json& j);
};

// Analytic summability report for power-law schedules. Each flag states
// whether the named condition holds; the exponent ordering (slow rate
// vanishing relative to the fast one) is what separates the two time scales.
// Base-rate magnitudes are deliberately not compared: either iterate may own
// the larger base rate without leaving the two-time-scale regime.
struct ScheduleReport {
  bool slow_sum_diverges = false;
  bool slow_squares_summable = false;
  bool fast_sum_diverges = false;
  bool fast_squares_summable = false;
  bool slow_vanishes_relative_to_fast = false;

  bool all_pass() const {
    return slow_sum_diverges && slow_squares_summable && fast_sum_diverges &&
           fast_squares_summable && slow_vanishes_relative_to_fast;
  }
};

ScheduleReport validate_schedule(const Schedule& sched);

// Coupled iterate pair: theta is the slow block, w the fast block.
struct IterateState {
  std::vector<double> theta;
  std::vector<double> w;
  std::size_t n = 0;
};

// Gradient oracle: maps (theta, w) to a drift vector for one block.
using Oracle = std::function<std::vector<double>(
    const std::vector<double>&, const std::vector<double>&)>;

// Zero-mean per-step disturbance source. Either independent Gaussian blocks
// scaled by sigma_theta / sigma_w, or a joint covariance whose symmetric
// square root shapes one iid standard-normal draw. Draw order is fixed
// (theta block first, then w block) so seeded runs are reproducible across
// both construction routes.
class NoiseModel {
 public:
  NoiseModel(double sigma_theta, double sigma_w, std::uint64_t seed);
  NoiseModel(const linalg::SymMatrix& joint_cov, std::size_t slow_dim,
             std::uint64_t seed);

  void draw(std::size_t slow_dim, std::size_t fast_dim,
            std::vector<double>& m_theta, std::vector<double>& m_w);

 private:
  double sigma_theta_ = 0.0;
  double sigma_w_ = 0.0;
  std::optional<linalg::Matrix> factor_;  // symmetric sqrt of the joint cov
  std::size_t cov_slow_dim_ = 0;
  Rng rng_;
};

// One coupled update. Both oracles are evaluated at the pre-step state and
// the two blocks move simultaneously; alternating=true instead refreshes the
// fast block first and feeds the updated w into the slow oracle. Raises
// diverged when any entry of the new state exceeds 1e12 in magnitude.
IterateState ttur_step(const IterateState& state, const Oracle& g_fast,
                       const Oracle& h_slow, const Schedule& sched,
                       NoiseModel& noise, bool alternating = false);

struct RunResult {
  std::vector<IterateState> trajectory;  // initial state first
  bool diverged = false;
  std::size_t steps_done = 0;
};

// Runs `steps` coupled updates, recording the initial state, every
// record_stride-th state, and the final state. Divergence stops the run and
// is reported as data rather than propagated.
RunResult run_ttur(IterateState state, const Oracle& g_fast,
                   const Oracle& h_slow, const Schedule& sched,
                   NoiseModel& noise, std::size_t steps,
                   std::size_t record_stride = 1, bool alternating = false);

// Columns: n, a_n, b_n, theta components, w components, norm errors against
// the supplied reference pair. The n=0 row reports the base rates.
void write_trajectory_csv(std::ostream& out,
                          const std::vector<IterateState>& trajectory,
                          const Schedule& sched,
                          const std::vector<double>& theta_star,
                          const std::vector<double>& w_star);
void write_trajectory_csv(const std::string& path,
                          const std::vector<IterateState>& trajectory,
                          const Schedule& sched,
                          const std::vector<double>& theta_star,
                          const std::vector<double>& w_star);

// Affine two-block system. Drifts are h = a1 - A11 theta - A12 w for the
// slow block and g = a2 - A21 theta - A22 w for the fast block, so stability
// asks -A22 and -Delta to be Hurwitz. Violations are recorded as warnings,
// not errors: divergence demos construct unstable systems on purpose.
struct LinearSystem {
  linalg::Matrix a11, a12, a21, a22;
  std::vector<double> a1, a2;
  linalg::SymMatrix gamma11;  // slow noise covariance
  linalg::Matrix gamma12;     // cross covariance (gamma21 is its transpose)
  linalg::SymMatrix gamma22;  // fast noise covariance
  bool fast_block_stable = false;
  bool delta_stable = false;

  LinearSystem(linalg::Matrix a11_, linalg::Matrix a12_, linalg::Matrix a21_,
               linalg::Matrix a22_, std::vector<double> a1_,
               std::vector<double> a2_);
  LinearSystem(linalg::Matrix a11_, linalg::Matrix a12_, linalg::Matrix a21_,
               linalg::Matrix a22_, std::vector<double> a1_,
               std::vector<double> a2_, linalg::SymMatrix gamma11_,
               linalg::Matrix gamma12_, linalg::SymMatrix gamma22_);

  std::size_t slow_dim() const { return a11.rows(); }
  std::size_t fast_dim() const { return a22.rows(); }
  std::vector<std::string> stability_warnings() const;

  nlohmann::json to_json() const;
  static LinearSystem from_json(const nlohmann::json& j);
};

struct LinearOracles {
  Oracle g_fast;
  Oracle h_slow;
};

LinearOracles oracles_from(const LinearSystem& sys);

struct FixedPoint {
  std::vector<double> theta;
  std::vector<double> w;
};

// Solves A11 theta + A12 w = a1, A21 theta + A22 w = a2 jointly.
FixedPoint linear_fixed_point(const LinearSystem& sys);

// The fast block's equilibrium for a frozen slow parameter:
// lambda(theta) = A22^{-1} (a2 - A21 theta); g(theta, lambda(theta)) = 0.
std::vector<double> lambda_attractor(const LinearSystem& sys,
                                     const std::vector<double>& theta);

struct AsymptoticCovariance {
  linalg::SymMatrix sigma11;
  linalg::Matrix sigma12;
  linalg::SymMatrix sigma22;
};

// Normalized asymptotic covariance of the coupled iterates, solved in the
// order Sigma22, Sigma12, Sigma11:
//   A22 Sigma22 + Sigma22 A22^T = Gamma22
//   A12 Sigma22 + Sigma12 A22^T = Gamma12
//   Delta Sigma11 + Sigma11 Delta^T - a_bar Sigma11
//       + A12 Sigma21 + Sigma12 A12^T = Gamma11
// a_bar is the limit of a(n+1)^{-1} - a(n)^{-1}: 1/a0 when the slow exponent
// is exactly 1, zero for slower decay. Raises singular_system when -A22 or
// -(Delta - a_bar/2 I) is not Hurwitz.
AsymptoticCovariance asymptotic_covariance(const LinearSystem& sys,
                                           double a_bar);

struct MokkademCovariances {
  linalg::SymMatrix sigma_theta;
  linalg::SymMatrix sigma_w;
};

// Covariance pair for the locally-linearized nonlinear iterates. Here delta
// and a22 follow the opposite sign convention of LinearSystem: they are the
// local drift Jacobians themselves and must be Hurwitz. gamma21 is taken as
// gamma12^T.
MokkademCovariances mokkadem_covariances(
    const linalg::Matrix& delta, const linalg::Matrix& a12,
    const linalg::Matrix& a22, const linalg::SymMatrix& gamma11,
    const linalg::Matrix& gamma12, const linalg::SymMatrix& gamma22, double a0,
    bool alpha_is_one);

struct EnvelopeReport {
  double k_fast = 0.0;        // smallest K covering the fast iterate
  double slow_fraction = 0.0; // fraction of slow deviations within K * envelope
  std::size_t considered = 0;
  std::size_t burn_in = 0;
};

// Almost-sure rate envelope diagnostic: calibrates K on the fast iterate's
// deviations against sqrt(b(n) log sum b(l)) past a 10% burn-in, then reports
// how often the slow iterate stays within K * sqrt(a(n) log sum a(l)).
// Steps whose rate sum has not yet exceeded 1 are skipped (the log is not
// yet positive). Diagnostic only; no pass/fail.
EnvelopeReport rate_envelope_check(const std::vector<IterateState>& trajectory,
                                   const Schedule& sched,
                                   const std::vector<double>& theta_star,
                                   const std::vector<double>& w_star);

// Membership in the noise-dominance region: true iff alpha_theta >=
// eta*||h(theta,w)|| or alpha_w >= eta*||g(theta,w)||. Equal-time-scale
// iterates revisit this region infinitely often.
bool contraction_region_membership(const IterateState& state,
                                   const Oracle& g_fast, const Oracle& h_slow,
                                   double alpha_theta, double alpha_w,
                                   double eta);

}  // namespace tsopt::sa
