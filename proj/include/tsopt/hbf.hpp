#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsopt/objective.hpp"

namespace tsopt::hbf {

// Adaptive-moment optimizer state for the fused update
//
//   m <- (b1/(1-b1^n)) m + ((1-b1)/(1-b1^n)) g
//   v <- (b2/(1-b2^n)) v + ((1-b2)/(1-b2^n)) g*g
//   theta <- theta - a(n) m / (sqrt(v) + eps)      a(n) = a n^-tau
//
// where the bias-correction denominators are folded into the averaging
// coefficients. This differs from the common two-stage form (raw moment,
// then divide by 1-b^n) at small n and agrees with it once b^n is
// negligible; standard_adam_step below provides the two-stage variant for
// cross-checks, reusing this struct with m and v holding the raw moments.
//
// tau = 0 runs the constant-rate limit a(n) = a.
struct AdamState {
  std::vector<double> theta;
  std::vector<double> m;  // may start empty (treated as zeros)
  std::vector<double> v;  // entries >= 0, may start empty
  std::size_t n = 0;      // completed steps
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double a = 1e-3;
  double tau = 0.0;
};

// One fused step. The gradient is expected at the current theta; n advances
// by one and the rate uses the advanced index.
AdamState adam_step(const AdamState& state, const std::vector<double>& grad);

// Two-stage textbook variant: m and v in the state hold raw moments,
//   m <- b1 m + (1-b1) g,   mhat = m/(1-b1^n),
// and theta moves by -a(n) mhat/(sqrt(vhat)+eps). The corrected moment obeys
//   mhat_n = (b1 (1-b1^{n-1})/(1-b1^n)) mhat_{n-1} + ((1-b1)/(1-b1^n)) g_n,
// whose coefficients approach the fused recursion's as n grows, so the two
// variants coincide in the large-n regime; the test suite freezes a small-n
// counterexample and checks the asymptotic agreement numerically.
AdamState standard_adam_step(const AdamState& state,
                             const std::vector<double>& grad);

enum class MemoryMode { exponential, polynomial };

// Heavy-ball-with-friction discrete recursion
//
//   theta_{n+1} = theta_n - a(n+1) m_n            (pre-update velocity)
//   m_{n+1} = (1 - a(n+1) r(n)) m_n + a(n+1) r(n) (grad + noise)
//
// with memory r(n) = r (exponential) or r / sum_{l<=n} a(l) (polynomial).
// The polynomial sum is empty at n = 0, where r(0) := r / a(1) so that the
// first averaging weight is exactly r.
struct HbfState {
  std::vector<double> theta;
  std::vector<double> m;  // may start empty (treated as zeros)
  std::size_t n = 0;
  MemoryMode r_mode = MemoryMode::exponential;
  double r = 1.0;
  double rate_sum = 0.0;  // sum of a(1)..a(n), the polynomial denominator
};

// r(n) for the given mode; rate_sum is the running sum of past rates and
// a_next the upcoming rate (used only by the n = 0 polynomial convention).
double memory_coefficient(MemoryMode mode, double r, std::size_t n,
                          double rate_sum, double a_next);

// One step of the recursion above. noise may be empty (treated as zeros).
// Throws weight_overflow when a_next * r(n) > 1, diverged past 1e12.
HbfState hbf_step(const HbfState& state, const std::vector<double>& grad,
                  const std::vector<double>& noise, double a_next);

// Phase point of the second-order dynamics theta'' + a(t) theta' + grad f = 0.
struct OdePhase {
  std::vector<double> theta;
  std::vector<double> theta_dot;
  double t = 0.0;
};

// Classical fixed-step 4th-order integration of the equivalent first-order
// system (theta' = p, p' = -a(t) p - grad f) with a(t) = a t^-tau. Time
// starts at t = dt to keep the damping coefficient finite; phase0's own t is
// ignored. Records every step including the initial phase; throws diverged
// past 1e12.
std::vector<OdePhase> hbf_ode_integrate(const Objective& f,
                                        const OdePhase& phase0, double a,
                                        double tau, double t_end, double dt);

// Kinetic plus potential energy, 1/2 |theta_dot|^2 + f(theta). Along any
// damped trajectory this is non-increasing up to integration error.
double energy(const OdePhase& phase, const Objective& f);

// Value used by the logarithmic rate-sum expansion, as printed.
inline constexpr double kEulerGamma = 0.5772156649;

struct RateSumResult {
  double exact;   // sum_{l=1}^{n} a l^-beta
  double approx;  // a (ln n + gamma + 1/(2n)) for beta = 1, else
                  // a n^{1-beta}/(1-beta)
  double error;   // |approx - exact|
};

RateSumResult rate_sum(double a, double beta, std::size_t n);

struct HbfSchedule {
  double a = 0.1;
  double tau = 0.0;
  double r = 0.5;
  MemoryMode mode = MemoryMode::exponential;
};

struct EquivalenceReport {
  double max_divergence = 0.0;
  std::size_t steps = 0;
};

// Runs the heavy-ball recursion side by side with the adaptive-moment
// first-moment recursion under the identification b1 = 1 - a(n+1) r(n),
// unit second moment (v = 1) and eps = 0. Both chains start at theta0 with
// zero momentum, see the same gradients and the same seeded noise, and the
// moment side applies the pre-update moment in its parameter update (the
// heavy-ball ordering), which makes the chains algebraically identical; the
// report carries the max componentwise divergence actually observed, which
// stays at rounding level. Weight overflows propagate.
EquivalenceReport adam_hbf_equivalence(std::size_t run_length,
                                       const HbfSchedule& sched,
                                       const Objective& f, std::uint64_t seed,
                                       const std::vector<double>& theta0,
                                       double noise_sigma = 1.0);

// CSV writers. Columns: n, theta_i..., m_i..., v_i... (adaptive-moment),
// n, theta_i..., m_i... (heavy-ball), t, theta_i..., theta_dot_i..., energy
// (dynamics, energy evaluated with f).
void write_adam_trajectory_csv(std::ostream& out,
                               const std::vector<AdamState>& trajectory);
void write_adam_trajectory_csv(const std::string& path,
                               const std::vector<AdamState>& trajectory);
void write_hbf_trajectory_csv(std::ostream& out,
                              const std::vector<HbfState>& trajectory);
void write_hbf_trajectory_csv(const std::string& path,
                              const std::vector<HbfState>& trajectory);
void write_ode_trajectory_csv(std::ostream& out,
                              const std::vector<OdePhase>& trajectory,
                              const Objective& f);
void write_ode_trajectory_csv(const std::string& path,
                              const std::vector<OdePhase>& trajectory,
                              const Objective& f);

}  // namespace tsopt::hbf
