#include "tsopt/hbf.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "tsopt/errors.hpp"
#include "tsopt/kernels.hpp"
#include "tsopt/rng.hpp"

namespace tsopt::hbf {

namespace {

constexpr double kOverflowGuard = 1e12;

void guard_block(const std::vector<double>& x, const char* what) {
  for (double v : x)
    require(std::isfinite(v) && std::abs(v) <= kOverflowGuard,
            ErrorKind::diverged, std::string(what) + " exceeded the overflow guard");
}

// Empty moment vectors are a fresh-start convenience; anything else must
// match the parameter dimension exactly.
std::vector<double> moments_or_zeros(const std::vector<double>& m,
                                     std::size_t dim, const char* what) {
  if (m.empty()) return std::vector<double>(dim, 0.0);
  require(m.size() == dim, ErrorKind::dimension_mismatch,
          std::string(what) + " length does not match theta");
  return m;
}

void validate_adam_params(const AdamState& s) {
  require(s.beta1 >= 0.0 && s.beta1 < 1.0, ErrorKind::invalid_argument,
          "beta1 must lie in [0,1)");
  require(s.beta2 >= 0.0 && s.beta2 < 1.0, ErrorKind::invalid_argument,
          "beta2 must lie in [0,1)");
  require(s.epsilon > 0.0, ErrorKind::invalid_argument,
          "epsilon must be positive");
  require(s.a > 0.0, ErrorKind::invalid_argument, "base rate must be positive");
  require(s.tau >= 0.0 && s.tau <= 1.0, ErrorKind::invalid_argument,
          "damping exponent must lie in [0,1]");
}

double damped_rate(double a, double tau, std::size_t n_new) {
  return a * std::pow(static_cast<double>(n_new), -tau);
}

void append_field(std::string& line, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  line += buf;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::io_error, "cannot open " + path);
  return out;
}

}  // namespace

AdamState adam_step(const AdamState& state, const std::vector<double>& grad) {
  validate_adam_params(state);
  const std::size_t dim = state.theta.size();
  require(grad.size() == dim, ErrorKind::dimension_mismatch,
          "gradient length does not match theta");

  AdamState next = state;
  next.m = moments_or_zeros(state.m, dim, "first moment");
  next.v = moments_or_zeros(state.v, dim, "second moment");
  for (double v : next.v)
    require(v >= 0.0, ErrorKind::invalid_argument,
            "second moment entries must be nonnegative");

  next.n = state.n + 1;
  const double d1 = 1.0 - std::pow(state.beta1, static_cast<double>(next.n));
  const double d2 = 1.0 - std::pow(state.beta2, static_cast<double>(next.n));
  const double rate = damped_rate(state.a, state.tau, next.n);

  kernels::fused_moment_update(next.theta.data(), next.m.data(), next.v.data(),
                               grad.data(), dim, state.beta1 / d1,
                               (1.0 - state.beta1) / d1, state.beta2 / d2,
                               (1.0 - state.beta2) / d2, rate, state.epsilon);
  guard_block(next.theta, "parameters");
  return next;
}

AdamState standard_adam_step(const AdamState& state,
                             const std::vector<double>& grad) {
  validate_adam_params(state);
  const std::size_t dim = state.theta.size();
  require(grad.size() == dim, ErrorKind::dimension_mismatch,
          "gradient length does not match theta");

  AdamState next = state;
  next.m = moments_or_zeros(state.m, dim, "first moment");
  next.v = moments_or_zeros(state.v, dim, "second moment");
  next.n = state.n + 1;
  const double d1 = 1.0 - std::pow(state.beta1, static_cast<double>(next.n));
  const double d2 = 1.0 - std::pow(state.beta2, static_cast<double>(next.n));
  const double rate = damped_rate(state.a, state.tau, next.n);

  for (std::size_t i = 0; i < dim; ++i) {
    require(next.v[i] >= 0.0, ErrorKind::invalid_argument,
            "second moment entries must be nonnegative");
    next.m[i] = state.beta1 * next.m[i] + (1.0 - state.beta1) * grad[i];
    next.v[i] = state.beta2 * next.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double m_hat = next.m[i] / d1;
    const double v_hat = next.v[i] / d2;
    next.theta[i] -= rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
  guard_block(next.theta, "parameters");
  return next;
}

double memory_coefficient(MemoryMode mode, double r, std::size_t n,
                          double rate_sum, double a_next) {
  require(r > 0.0, ErrorKind::invalid_argument, "memory constant must be positive");
  if (mode == MemoryMode::exponential) return r;
  if (n == 0) {
    require(a_next > 0.0, ErrorKind::invalid_argument,
            "first rate must be positive");
    return r / a_next;
  }
  require(rate_sum > 0.0, ErrorKind::invalid_argument,
          "polynomial memory needs a positive rate sum");
  return r / rate_sum;
}

HbfState hbf_step(const HbfState& state, const std::vector<double>& grad,
                  const std::vector<double>& noise, double a_next) {
  const std::size_t dim = state.theta.size();
  require(grad.size() == dim, ErrorKind::dimension_mismatch,
          "gradient length does not match theta");
  require(noise.empty() || noise.size() == dim, ErrorKind::dimension_mismatch,
          "noise length does not match theta");
  require(a_next > 0.0, ErrorKind::invalid_argument, "rate must be positive");

  HbfState next = state;
  next.m = moments_or_zeros(state.m, dim, "velocity");

  const double rn =
      memory_coefficient(state.r_mode, state.r, state.n, state.rate_sum, a_next);
  const double w = a_next * rn;
  require(w <= 1.0, ErrorKind::weight_overflow,
          "averaging weight a(n+1) r(n) exceeds 1");

  for (std::size_t i = 0; i < dim; ++i) {
    const double noise_i = noise.empty() ? 0.0 : noise[i];
    next.theta[i] = state.theta[i] - a_next * next.m[i];
    next.m[i] = (1.0 - w) * next.m[i] + w * (grad[i] + noise_i);
  }
  next.n = state.n + 1;
  next.rate_sum = state.rate_sum + a_next;
  guard_block(next.theta, "position");
  guard_block(next.m, "velocity");
  return next;
}

std::vector<OdePhase> hbf_ode_integrate(const Objective& f,
                                        const OdePhase& phase0, double a,
                                        double tau, double t_end, double dt) {
  require(dt > 0.0, ErrorKind::invalid_argument, "dt must be positive");
  require(t_end > dt, ErrorKind::invalid_argument, "t_end must exceed dt");
  require(a > 0.0, ErrorKind::invalid_argument, "friction must be positive");
  require(tau >= 0.0 && tau <= 1.0, ErrorKind::invalid_argument,
          "damping exponent must lie in [0,1]");
  require(static_cast<bool>(f.gradient), ErrorKind::invalid_argument,
          "objective gradient is required");
  const std::size_t dim = phase0.theta.size();
  require(f.dim == dim && phase0.theta_dot.size() == dim,
          ErrorKind::dimension_mismatch, "phase does not match objective dim");

  const auto friction = [&](double t) { return a * std::pow(t, -tau); };
  // derivative of the stacked phase (theta, p)
  const auto deriv = [&](double t, const std::vector<double>& th,
                         const std::vector<double>& p,
                         std::vector<double>& dth, std::vector<double>& dp) {
    const std::vector<double> g = f.gradient(th);
    require(g.size() == dim, ErrorKind::dimension_mismatch,
            "gradient length does not match theta");
    const double at = friction(t);
    for (std::size_t i = 0; i < dim; ++i) {
      dth[i] = p[i];
      dp[i] = -at * p[i] - g[i];
    }
  };

  std::vector<OdePhase> phases;
  phases.push_back(OdePhase{phase0.theta, phase0.theta_dot, dt});

  std::vector<double> k1t(dim), k1p(dim), k2t(dim), k2p(dim), k3t(dim),
      k3p(dim), k4t(dim), k4p(dim), tht(dim), pt(dim);
  std::size_t k = 0;
  while (dt * static_cast<double>(k + 1) < t_end) {
    const OdePhase& cur = phases.back();
    const double t = cur.t;

    deriv(t, cur.theta, cur.theta_dot, k1t, k1p);
    for (std::size_t i = 0; i < dim; ++i) {
      tht[i] = cur.theta[i] + 0.5 * dt * k1t[i];
      pt[i] = cur.theta_dot[i] + 0.5 * dt * k1p[i];
    }
    deriv(t + 0.5 * dt, tht, pt, k2t, k2p);
    for (std::size_t i = 0; i < dim; ++i) {
      tht[i] = cur.theta[i] + 0.5 * dt * k2t[i];
      pt[i] = cur.theta_dot[i] + 0.5 * dt * k2p[i];
    }
    deriv(t + 0.5 * dt, tht, pt, k3t, k3p);
    for (std::size_t i = 0; i < dim; ++i) {
      tht[i] = cur.theta[i] + dt * k3t[i];
      pt[i] = cur.theta_dot[i] + dt * k3p[i];
    }
    deriv(t + dt, tht, pt, k4t, k4p);

    OdePhase next;
    next.theta.resize(dim);
    next.theta_dot.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      next.theta[i] = cur.theta[i] +
                      dt / 6.0 * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i]);
      next.theta_dot[i] = cur.theta_dot[i] +
                          dt / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
    }
    ++k;
    next.t = dt * static_cast<double>(k + 1);
    guard_block(next.theta, "position");
    guard_block(next.theta_dot, "velocity");
    phases.push_back(std::move(next));
  }
  return phases;
}

double energy(const OdePhase& phase, const Objective& f) {
  require(static_cast<bool>(f.value), ErrorKind::invalid_argument,
          "objective value is required");
  double kinetic = 0.0;
  for (double p : phase.theta_dot) kinetic += p * p;
  return 0.5 * kinetic + f.value(phase.theta);
}

RateSumResult rate_sum(double a, double beta, std::size_t n) {
  require(n >= 1, ErrorKind::invalid_argument, "need at least one term");
  require(beta > 0.0 && beta <= 1.0, ErrorKind::invalid_argument,
          "rate exponent must lie in (0,1]");
  RateSumResult out;
  out.exact = 0.0;
  for (std::size_t l = 1; l <= n; ++l)
    out.exact += a * std::pow(static_cast<double>(l), -beta);
  const double nn = static_cast<double>(n);
  out.approx = beta == 1.0
                   ? a * (std::log(nn) + kEulerGamma + 1.0 / (2.0 * nn))
                   : a * std::pow(nn, 1.0 - beta) / (1.0 - beta);
  out.error = std::abs(out.approx - out.exact);
  return out;
}

EquivalenceReport adam_hbf_equivalence(std::size_t run_length,
                                       const HbfSchedule& sched,
                                       const Objective& f, std::uint64_t seed,
                                       const std::vector<double>& theta0,
                                       double noise_sigma) {
  require(run_length >= 1, ErrorKind::invalid_argument, "need at least one step");
  require(noise_sigma >= 0.0, ErrorKind::invalid_argument,
          "noise level must be nonnegative");
  require(f.dim == theta0.size(), ErrorKind::dimension_mismatch,
          "start point does not match objective dim");
  require(static_cast<bool>(f.gradient), ErrorKind::invalid_argument,
          "objective gradient is required");
  const std::size_t dim = theta0.size();

  HbfState ball;
  ball.theta = theta0;
  ball.m.assign(dim, 0.0);
  ball.r_mode = sched.mode;
  ball.r = sched.r;

  // Moment-recursion side under b1 = 1 - a(n+1) r(n), v = 1, eps = 0. The
  // parameter update applies the pre-update moment; see the header note.
  std::vector<double> x = theta0;
  std::vector<double> mm(dim, 0.0);
  double x_rate_sum = 0.0;

  Rng rng(seed);
  std::vector<double> noise(dim);
  EquivalenceReport report;
  report.steps = run_length;

  for (std::size_t step = 0; step < run_length; ++step) {
    const double a_next =
        sched.a * std::pow(static_cast<double>(step + 1), -sched.tau);
    for (std::size_t i = 0; i < dim; ++i)
      noise[i] = noise_sigma * rng.normal();

    const std::vector<double> grad_ball = f.gradient(ball.theta);
    ball = hbf_step(ball, grad_ball, noise, a_next);

    const double rn =
        memory_coefficient(sched.mode, sched.r, step, x_rate_sum, a_next);
    const double b1 = 1.0 - a_next * rn;
    const std::vector<double> grad_x = f.gradient(x);
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] -= a_next * (mm[i] / (std::sqrt(1.0) + 0.0));
      mm[i] = b1 * mm[i] + (1.0 - b1) * (grad_x[i] + noise[i]);
    }
    x_rate_sum += a_next;
    guard_block(x, "moment-side parameters");

    for (std::size_t i = 0; i < dim; ++i) {
      const double d = std::abs(x[i] - ball.theta[i]);
      if (d > report.max_divergence) report.max_divergence = d;
    }
  }
  return report;
}

void write_adam_trajectory_csv(std::ostream& out,
                               const std::vector<AdamState>& trajectory) {
  require(!trajectory.empty(), ErrorKind::invalid_argument, "empty trajectory");
  const std::size_t dim = trajectory.front().theta.size();
  std::string line = "n";
  for (std::size_t i = 0; i < dim; ++i) line += ",theta_" + std::to_string(i);
  for (std::size_t i = 0; i < dim; ++i) line += ",m_" + std::to_string(i);
  for (std::size_t i = 0; i < dim; ++i) line += ",v_" + std::to_string(i);
  out << line << "\n";
  for (const AdamState& s : trajectory) {
    line = std::to_string(s.n);
    for (std::size_t i = 0; i < dim; ++i) {
      line += ',';
      append_field(line, s.theta[i]);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      line += ',';
      append_field(line, s.m.empty() ? 0.0 : s.m[i]);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      line += ',';
      append_field(line, s.v.empty() ? 0.0 : s.v[i]);
    }
    out << line << "\n";
  }
  require(out.good(), ErrorKind::io_error, "trajectory write failed");
}

void write_adam_trajectory_csv(const std::string& path,
                               const std::vector<AdamState>& trajectory) {
  std::ofstream out = open_csv(path);
  write_adam_trajectory_csv(out, trajectory);
}

void write_hbf_trajectory_csv(std::ostream& out,
                              const std::vector<HbfState>& trajectory) {
  require(!trajectory.empty(), ErrorKind::invalid_argument, "empty trajectory");
  const std::size_t dim = trajectory.front().theta.size();
  std::string line = "n";
  for (std::size_t i = 0; i < dim; ++i) line += ",theta_" + std::to_string(i);
  for (std::size_t i = 0; i < dim; ++i) line += ",m_" + std::to_string(i);
  out << line << "\n";
  for (const HbfState& s : trajectory) {
    line = std::to_string(s.n);
    for (std::size_t i = 0; i < dim; ++i) {
      line += ',';
      append_field(line, s.theta[i]);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      line += ',';
      append_field(line, s.m.empty() ? 0.0 : s.m[i]);
    }
    out << line << "\n";
  }
  require(out.good(), ErrorKind::io_error, "trajectory write failed");
}

void write_hbf_trajectory_csv(const std::string& path,
                              const std::vector<HbfState>& trajectory) {
  std::ofstream out = open_csv(path);
  write_hbf_trajectory_csv(out, trajectory);
}

void write_ode_trajectory_csv(std::ostream& out,
                              const std::vector<OdePhase>& trajectory,
                              const Objective& f) {
  require(!trajectory.empty(), ErrorKind::invalid_argument, "empty trajectory");
  const std::size_t dim = trajectory.front().theta.size();
  std::string line = "t";
  for (std::size_t i = 0; i < dim; ++i) line += ",theta_" + std::to_string(i);
  for (std::size_t i = 0; i < dim; ++i)
    line += ",theta_dot_" + std::to_string(i);
  line += ",energy";
  out << line << "\n";
  for (const OdePhase& p : trajectory) {
    line.clear();
    append_field(line, p.t);
    for (std::size_t i = 0; i < dim; ++i) {
      line += ',';
      append_field(line, p.theta[i]);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      line += ',';
      append_field(line, p.theta_dot[i]);
    }
    line += ',';
    append_field(line, energy(p, f));
    out << line << "\n";
  }
  require(out.good(), ErrorKind::io_error, "trajectory write failed");
}

void write_ode_trajectory_csv(const std::string& path,
                              const std::vector<OdePhase>& trajectory,
                              const Objective& f) {
  std::ofstream out = open_csv(path);
  write_ode_trajectory_csv(out, trajectory, f);
}

}  // namespace tsopt::hbf
