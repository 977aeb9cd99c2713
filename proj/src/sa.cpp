#include "tsopt/sa.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

namespace tsopt::sa {

namespace {

constexpr double kOverflowGuard = 1e12;

void require_keys(const nlohmann::json& j,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional,
                  const char* what) {
  require(j.is_object(), ErrorKind::invalid_argument,
          std::string(what) + ": expected a JSON object");
  for (const char* key : required)
    require(j.contains(key), ErrorKind::invalid_argument,
            std::string(what) + ": missing key \"" + key + "\"");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : required)
      if (item.key() == key) known = true;
    for (const char* key : optional)
      if (item.key() == key) known = true;
    require(known, ErrorKind::invalid_argument,
            std::string(what) + ": unknown key \"" + item.key() + "\"");
  }
}

nlohmann::json matrix_to_json(const linalg::Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

linalg::Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  require(j.is_array() && !j.empty(), ErrorKind::invalid_argument,
          std::string(what) + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  require(j[0].is_array() && !j[0].empty(), ErrorKind::invalid_argument,
          std::string(what) + ": rows must be non-empty arrays");
  const std::size_t cols = j[0].size();
  linalg::Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    require(j[i].is_array() && j[i].size() == cols,
            ErrorKind::invalid_argument,
            std::string(what) + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

std::vector<double> vector_from_json(const nlohmann::json& j,
                                     const char* what) {
  require(j.is_array() && !j.empty(), ErrorKind::invalid_argument,
          std::string(what) + ": expected a non-empty array");
  std::vector<double> v(j.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm2_diff(const std::vector<double>& v, const std::vector<double>& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - r[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

Schedule::Schedule(double a0_, double b0_, double alpha, double beta,
                   bool constant)
    : a0(a0_), b0(b0_), alpha_exp(alpha), beta_exp(beta),
      constant_mode(constant) {
  require(a0 > 0.0 && b0 > 0.0, ErrorKind::invalid_argument,
          "Schedule: base rates must be positive");
  if (!constant_mode) {
    require(alpha_exp > 0.0 && alpha_exp <= 1.0 && beta_exp > 0.0 &&
                beta_exp <= 1.0,
            ErrorKind::invalid_argument,
            "Schedule: decay exponents must lie in (0, 1]");
  }
}

double Schedule::slow_rate(std::size_t n) const {
  if (constant_mode) return a0;
  return a0 * std::pow(double(n + 1), -alpha_exp);
}

double Schedule::fast_rate(std::size_t n) const {
  if (constant_mode) return b0;
  return b0 * std::pow(double(n + 1), -beta_exp);
}

nlohmann::json Schedule::to_json() const {
  return {{"a0", a0},
          {"b0", b0},
          {"alpha_exp", alpha_exp},
          {"beta_exp", beta_exp},
          {"constant_mode", constant_mode}};
}

Schedule Schedule::from_json(const nlohmann::json& j) {
  require_keys(j, {"a0", "b0"}, {"alpha_exp", "beta_exp", "constant_mode"},
               "Schedule");
  Schedule defaults;
  return Schedule(j.at("a0").get<double>(), j.at("b0").get<double>(),
                  j.value("alpha_exp", defaults.alpha_exp),
                  j.value("beta_exp", defaults.beta_exp),
                  j.value("constant_mode", defaults.constant_mode));
}

ScheduleReport validate_schedule(const Schedule& sched) {
  ScheduleReport r;
  if (sched.constant_mode) {
    // Constant rates: both sums diverge, neither square-sum converges, and
    // the slow/fast ratio stays fixed instead of vanishing.
    r.slow_sum_diverges = true;
    r.fast_sum_diverges = true;
    r.slow_squares_summable = false;
    r.fast_squares_summable = false;
    r.slow_vanishes_relative_to_fast = false;
    return r;
  }
  r.slow_sum_diverges = sched.alpha_exp <= 1.0;
  r.fast_sum_diverges = sched.beta_exp <= 1.0;
  r.slow_squares_summable = sched.alpha_exp > 0.5;
  r.fast_squares_summable = sched.beta_exp > 0.5;
  r.slow_vanishes_relative_to_fast = sched.alpha_exp > sched.beta_exp;
  return r;
}

NoiseModel::NoiseModel(double sigma_theta, double sigma_w, std::uint64_t seed)
    : sigma_theta_(sigma_theta), sigma_w_(sigma_w), rng_(seed) {
  require(sigma_theta >= 0.0 && sigma_w >= 0.0, ErrorKind::invalid_argument,
          "NoiseModel: sigmas must be non-negative");
}

NoiseModel::NoiseModel(const linalg::SymMatrix& joint_cov,
                       std::size_t slow_dim, std::uint64_t seed)
    : cov_slow_dim_(slow_dim), rng_(seed) {
  require(slow_dim >= 1 && slow_dim < joint_cov.dim(),
          ErrorKind::dimension_mismatch,
          "NoiseModel: slow_dim must split the joint covariance");
  factor_ = linalg::sqrtm_psd(joint_cov).as_matrix();
}

void NoiseModel::draw(std::size_t slow_dim, std::size_t fast_dim,
                      std::vector<double>& m_theta, std::vector<double>& m_w) {
  m_theta.resize(slow_dim);
  m_w.resize(fast_dim);
  if (!factor_) {
    for (auto& v : m_theta) v = sigma_theta_ * rng_.normal();
    for (auto& v : m_w) v = sigma_w_ * rng_.normal();
    return;
  }
  require(slow_dim == cov_slow_dim_ &&
              slow_dim + fast_dim == factor_->rows(),
          ErrorKind::dimension_mismatch,
          "NoiseModel: joint covariance does not match the iterate dims");
  const std::size_t total = slow_dim + fast_dim;
  std::vector<double> z(total);
  for (auto& v : z) v = rng_.normal();
  const linalg::Matrix& s = *factor_;
  for (std::size_t i = 0; i < total; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < total; ++j) acc += s(i, j) * z[j];
    (i < slow_dim ? m_theta[i] : m_w[i - slow_dim]) = acc;
  }
}

IterateState ttur_step(const IterateState& state, const Oracle& g_fast,
                       const Oracle& h_slow, const Schedule& sched,
                       NoiseModel& noise, bool alternating) {
  const std::size_t m = state.theta.size(), k = state.w.size();
  const double a = sched.slow_rate(state.n);
  const double b = sched.fast_rate(state.n);

  std::vector<double> m_theta, m_w;
  noise.draw(m, k, m_theta, m_w);

  IterateState next;
  next.n = state.n + 1;
  next.w.resize(k);
  next.theta.resize(m);

  const std::vector<double> gv = g_fast(state.theta, state.w);
  require(gv.size() == k, ErrorKind::dimension_mismatch,
          "ttur_step: fast oracle returned the wrong dimension");
  for (std::size_t i = 0; i < k; ++i)
    next.w[i] = state.w[i] + b * (gv[i] + m_w[i]);

  // Simultaneous mode reads the pre-step fast block; alternating mode uses
  // the block just refreshed above.
  const std::vector<double>& w_for_slow = alternating ? next.w : state.w;
  const std::vector<double> hv = h_slow(state.theta, w_for_slow);
  require(hv.size() == m, ErrorKind::dimension_mismatch,
          "ttur_step: slow oracle returned the wrong dimension");
  for (std::size_t i = 0; i < m; ++i)
    next.theta[i] = state.theta[i] + a * (hv[i] + m_theta[i]);

  for (double v : next.theta)
    require(std::abs(v) <= kOverflowGuard, ErrorKind::diverged,
            "ttur_step: slow iterate exceeded the overflow guard");
  for (double v : next.w)
    require(std::abs(v) <= kOverflowGuard, ErrorKind::diverged,
            "ttur_step: fast iterate exceeded the overflow guard");
  return next;
}

RunResult run_ttur(IterateState state, const Oracle& g_fast,
                   const Oracle& h_slow, const Schedule& sched,
                   NoiseModel& noise, std::size_t steps,
                   std::size_t record_stride, bool alternating) {
  require(record_stride >= 1, ErrorKind::invalid_argument,
          "run_ttur: record_stride must be at least 1");
  RunResult result;
  result.trajectory.push_back(state);
  for (std::size_t s = 0; s < steps; ++s) {
    try {
      state = ttur_step(state, g_fast, h_slow, sched, noise, alternating);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::diverged) throw;
      result.diverged = true;
      break;
    }
    result.steps_done += 1;
    if ((s + 1) % record_stride == 0 || s + 1 == steps)
      result.trajectory.push_back(state);
  }
  return result;
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<IterateState>& trajectory,
                          const Schedule& sched,
                          const std::vector<double>& theta_star,
                          const std::vector<double>& w_star) {
  if (trajectory.empty()) return;
  const std::size_t m = trajectory.front().theta.size();
  const std::size_t k = trajectory.front().w.size();
  require(theta_star.size() == m && w_star.size() == k,
          ErrorKind::dimension_mismatch,
          "write_trajectory_csv: reference point dimensions do not match");

  out << "n,a_n,b_n";
  for (std::size_t i = 0; i < m; ++i) out << ",theta_" << i;
  for (std::size_t i = 0; i < k; ++i) out << ",w_" << i;
  out << ",norm_theta_err,norm_w_err\n";

  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ',' << buf;
  };
  for (const IterateState& s : trajectory) {
    out << s.n;
    const std::size_t rate_index = s.n == 0 ? 0 : s.n - 1;
    put(sched.slow_rate(rate_index));
    put(sched.fast_rate(rate_index));
    for (double v : s.theta) put(v);
    for (double v : s.w) put(v);
    put(norm2_diff(s.theta, theta_star));
    put(norm2_diff(s.w, w_star));
    out << '\n';
  }
}

void write_trajectory_csv(const std::string& path,
                          const std::vector<IterateState>& trajectory,
                          const Schedule& sched,
                          const std::vector<double>& theta_star,
                          const std::vector<double>& w_star) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::io_error,
          "write_trajectory_csv: cannot open " + path);
  write_trajectory_csv(out, trajectory, sched, theta_star, w_star);
  require(out.good(), ErrorKind::io_error,
          "write_trajectory_csv: write failed for " + path);
}

LinearSystem::LinearSystem(linalg::Matrix a11_, linalg::Matrix a12_,
                           linalg::Matrix a21_, linalg::Matrix a22_,
                           std::vector<double> a1_, std::vector<double> a2_)
    : LinearSystem(a11_, a12_, a21_, a22_, std::move(a1_), std::move(a2_),
                   linalg::SymMatrix::identity(a11_.rows()),
                   linalg::Matrix(a11_.rows(), a22_.rows(), 0.0),
                   linalg::SymMatrix::identity(a22_.rows())) {}

LinearSystem::LinearSystem(linalg::Matrix a11_, linalg::Matrix a12_,
                           linalg::Matrix a21_, linalg::Matrix a22_,
                           std::vector<double> a1_, std::vector<double> a2_,
                           linalg::SymMatrix gamma11_, linalg::Matrix gamma12_,
                           linalg::SymMatrix gamma22_)
    : a11(std::move(a11_)), a12(std::move(a12_)), a21(std::move(a21_)),
      a22(std::move(a22_)), a1(std::move(a1_)), a2(std::move(a2_)),
      gamma11(std::move(gamma11_)), gamma12(std::move(gamma12_)),
      gamma22(std::move(gamma22_)) {
  const std::size_t m = a11.rows(), k = a22.rows();
  require(m >= 1 && k >= 1, ErrorKind::dimension_mismatch,
          "LinearSystem: empty blocks");
  require(a11.cols() == m && a22.cols() == k, ErrorKind::dimension_mismatch,
          "LinearSystem: diagonal blocks must be square");
  require(a12.rows() == m && a12.cols() == k && a21.rows() == k &&
              a21.cols() == m,
          ErrorKind::dimension_mismatch,
          "LinearSystem: coupling block dimensions do not match");
  require(a1.size() == m && a2.size() == k, ErrorKind::dimension_mismatch,
          "LinearSystem: offset dimensions do not match");
  require(gamma11.dim() == m && gamma22.dim() == k &&
              gamma12.rows() == m && gamma12.cols() == k,
          ErrorKind::dimension_mismatch,
          "LinearSystem: noise covariance dimensions do not match");

  fast_block_stable = linalg::is_hurwitz(-1.0 * a22);
  try {
    delta_stable =
        linalg::is_hurwitz(-1.0 * linalg::delta_matrix(a11, a12, a21, a22));
  } catch (const Error&) {
    delta_stable = false;  // singular A22: no Schur complement to test
  }
}

std::vector<std::string> LinearSystem::stability_warnings() const {
  std::vector<std::string> w;
  if (!fast_block_stable)
    w.push_back("fast block drift -A22 is not Hurwitz; the fast iterate has "
                "no stable attractor");
  if (!delta_stable)
    w.push_back("slow block drift -Delta is not Hurwitz; the slow iterate "
                "need not converge");
  return w;
}

nlohmann::json LinearSystem::to_json() const {
  return {{"a11", matrix_to_json(a11)},
          {"a12", matrix_to_json(a12)},
          {"a21", matrix_to_json(a21)},
          {"a22", matrix_to_json(a22)},
          {"a1", a1},
          {"a2", a2},
          {"gamma11", matrix_to_json(gamma11.as_matrix())},
          {"gamma12", matrix_to_json(gamma12)},
          {"gamma22", matrix_to_json(gamma22.as_matrix())}};
}

LinearSystem LinearSystem::from_json(const nlohmann::json& j) {
  require_keys(j, {"a11", "a12", "a21", "a22", "a1", "a2"},
               {"gamma11", "gamma12", "gamma22"}, "LinearSystem");
  linalg::Matrix a11 = matrix_from_json(j.at("a11"), "LinearSystem.a11");
  linalg::Matrix a12 = matrix_from_json(j.at("a12"), "LinearSystem.a12");
  linalg::Matrix a21 = matrix_from_json(j.at("a21"), "LinearSystem.a21");
  linalg::Matrix a22 = matrix_from_json(j.at("a22"), "LinearSystem.a22");
  std::vector<double> a1 = vector_from_json(j.at("a1"), "LinearSystem.a1");
  std::vector<double> a2 = vector_from_json(j.at("a2"), "LinearSystem.a2");
  const std::size_t m = a11.rows(), k = a22.rows();
  linalg::SymMatrix g11 =
      j.contains("gamma11")
          ? linalg::SymMatrix(matrix_from_json(j.at("gamma11"),
                                               "LinearSystem.gamma11"))
          : linalg::SymMatrix::identity(m);
  linalg::Matrix g12 =
      j.contains("gamma12")
          ? matrix_from_json(j.at("gamma12"), "LinearSystem.gamma12")
          : linalg::Matrix(m, k, 0.0);
  linalg::SymMatrix g22 =
      j.contains("gamma22")
          ? linalg::SymMatrix(matrix_from_json(j.at("gamma22"),
                                               "LinearSystem.gamma22"))
          : linalg::SymMatrix::identity(k);
  return LinearSystem(std::move(a11), std::move(a12), std::move(a21),
                      std::move(a22), std::move(a1), std::move(a2),
                      std::move(g11), std::move(g12), std::move(g22));
}

LinearOracles oracles_from(const LinearSystem& sys) {
  LinearOracles o;
  o.h_slow = [a11 = sys.a11, a12 = sys.a12, a1 = sys.a1](
                 const std::vector<double>& theta,
                 const std::vector<double>& w) {
    std::vector<double> out(a1.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      double acc = a1[i];
      for (std::size_t j = 0; j < theta.size(); ++j) acc -= a11(i, j) * theta[j];
      for (std::size_t j = 0; j < w.size(); ++j) acc -= a12(i, j) * w[j];
      out[i] = acc;
    }
    return out;
  };
  o.g_fast = [a21 = sys.a21, a22 = sys.a22, a2 = sys.a2](
                 const std::vector<double>& theta,
                 const std::vector<double>& w) {
    std::vector<double> out(a2.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      double acc = a2[i];
      for (std::size_t j = 0; j < theta.size(); ++j) acc -= a21(i, j) * theta[j];
      for (std::size_t j = 0; j < w.size(); ++j) acc -= a22(i, j) * w[j];
      out[i] = acc;
    }
    return out;
  };
  return o;
}

FixedPoint linear_fixed_point(const LinearSystem& sys) {
  const std::size_t m = sys.slow_dim(), k = sys.fast_dim();
  linalg::Matrix joint(m + k, m + k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) joint(i, j) = sys.a11(i, j);
    for (std::size_t j = 0; j < k; ++j) joint(i, m + j) = sys.a12(i, j);
  }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < m; ++j) joint(m + i, j) = sys.a21(i, j);
    for (std::size_t j = 0; j < k; ++j) joint(m + i, m + j) = sys.a22(i, j);
  }
  std::vector<double> rhs(m + k);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = sys.a1[i];
  for (std::size_t i = 0; i < k; ++i) rhs[m + i] = sys.a2[i];
  const std::vector<double> sol = linalg::solve(joint, rhs);
  FixedPoint fp;
  fp.theta.assign(sol.begin(), sol.begin() + std::ptrdiff_t(m));
  fp.w.assign(sol.begin() + std::ptrdiff_t(m), sol.end());
  return fp;
}

std::vector<double> lambda_attractor(const LinearSystem& sys,
                                     const std::vector<double>& theta) {
  require(theta.size() == sys.slow_dim(), ErrorKind::dimension_mismatch,
          "lambda_attractor: theta dimension does not match");
  std::vector<double> rhs = sys.a2;
  for (std::size_t i = 0; i < sys.fast_dim(); ++i)
    for (std::size_t j = 0; j < theta.size(); ++j)
      rhs[i] -= sys.a21(i, j) * theta[j];
  return linalg::solve(sys.a22, rhs);
}

AsymptoticCovariance asymptotic_covariance(const LinearSystem& sys,
                                           double a_bar) {
  const std::size_t m = sys.slow_dim();
  require(linalg::is_hurwitz(-1.0 * sys.a22), ErrorKind::singular_system,
          "asymptotic_covariance: -A22 is not Hurwitz");

  AsymptoticCovariance out;
  out.sigma22 = linalg::solve_lyapunov(-1.0 * sys.a22, sys.gamma22);

  // Sigma12 A22^T = Gamma12 - A12 Sigma22, solved through the transpose.
  const linalg::Matrix rhs12 =
      sys.gamma12 - sys.a12 * out.sigma22.as_matrix();
  out.sigma12 = linalg::solve(sys.a22, rhs12.transposed()).transposed();

  const linalg::Matrix delta =
      linalg::delta_matrix(sys.a11, sys.a12, sys.a21, sys.a22);
  linalg::Matrix shifted = delta;
  for (std::size_t i = 0; i < m; ++i) shifted(i, i) -= 0.5 * a_bar;
  require(linalg::is_hurwitz(-1.0 * shifted), ErrorKind::singular_system,
          "asymptotic_covariance: -(Delta - a_bar/2 I) is not Hurwitz");

  const linalg::Matrix sigma21 = out.sigma12.transposed();
  const linalg::Matrix q = sys.gamma11.as_matrix() - sys.a12 * sigma21 -
                           out.sigma12 * sys.a12.transposed();
  out.sigma11 = linalg::solve_lyapunov(-1.0 * shifted, linalg::SymMatrix(q));
  return out;
}

MokkademCovariances mokkadem_covariances(
    const linalg::Matrix& delta, const linalg::Matrix& a12,
    const linalg::Matrix& a22, const linalg::SymMatrix& gamma11,
    const linalg::Matrix& gamma12, const linalg::SymMatrix& gamma22, double a0,
    bool alpha_is_one) {
  require(a0 > 0.0, ErrorKind::invalid_argument,
          "mokkadem_covariances: a0 must be positive");
  const linalg::Matrix a22_inv = linalg::inverse(a22);
  const linalg::Matrix bridge = a12 * a22_inv;  // A12 A22^{-1}
  const linalg::Matrix gamma_theta =
      gamma11.as_matrix() + bridge * gamma22.as_matrix() * bridge.transposed() -
      gamma12 * bridge.transposed() - bridge * gamma12.transposed();

  linalg::Matrix shifted = delta;
  if (alpha_is_one)
    for (std::size_t i = 0; i < shifted.rows(); ++i)
      shifted(i, i) += 0.5 / a0;
  require(linalg::is_hurwitz(shifted), ErrorKind::singular_system,
          "mokkadem_covariances: shifted slow drift is not Hurwitz");
  require(linalg::is_hurwitz(a22), ErrorKind::singular_system,
          "mokkadem_covariances: A22 is not Hurwitz");

  MokkademCovariances out;
  out.sigma_theta =
      linalg::solve_lyapunov(shifted, linalg::SymMatrix(gamma_theta));
  out.sigma_w = linalg::solve_lyapunov(a22, gamma22);
  return out;
}

EnvelopeReport rate_envelope_check(const std::vector<IterateState>& trajectory,
                                   const Schedule& sched,
                                   const std::vector<double>& theta_star,
                                   const std::vector<double>& w_star) {
  EnvelopeReport report;
  report.burn_in = trajectory.size() / 10;

  // Running rate sums advance with the trajectory's step indices, so strided
  // recordings cost the same as dense ones.
  double sum_a = 0.0, sum_b = 0.0;
  std::size_t covered = 0;  // rates accumulated for steps 1..covered

  std::vector<double> slow_err, slow_env;
  double k_fast = 0.0;
  for (std::size_t idx = 0; idx < trajectory.size(); ++idx) {
    const IterateState& s = trajectory[idx];
    while (covered < s.n) {
      sum_a += sched.slow_rate(covered);
      sum_b += sched.fast_rate(covered);
      covered += 1;
    }
    if (idx < report.burn_in || s.n == 0) continue;
    if (sum_a <= 1.0 || sum_b <= 1.0) continue;
    const double a_n = sched.slow_rate(s.n - 1);
    const double b_n = sched.fast_rate(s.n - 1);
    const double env_slow = std::sqrt(a_n * std::log(sum_a));
    const double env_fast = std::sqrt(b_n * std::log(sum_b));
    slow_err.push_back(norm2_diff(s.theta, theta_star));
    slow_env.push_back(env_slow);
    const double fast_ratio = norm2_diff(s.w, w_star) / env_fast;
    if (fast_ratio > k_fast) k_fast = fast_ratio;
  }

  report.k_fast = k_fast;
  report.considered = slow_err.size();
  if (report.considered == 0) return report;
  std::size_t within = 0;
  for (std::size_t i = 0; i < slow_err.size(); ++i)
    if (slow_err[i] <= k_fast * slow_env[i]) within += 1;
  report.slow_fraction = double(within) / double(report.considered);
  return report;
}

bool contraction_region_membership(const IterateState& state,
                                   const Oracle& g_fast, const Oracle& h_slow,
                                   double alpha_theta, double alpha_w,
                                   double eta) {
  require(eta >= 0.0 && eta < 1.0, ErrorKind::invalid_argument,
          "contraction_region_membership: eta must lie in [0, 1)");
  const double h_norm = norm2(h_slow(state.theta, state.w));
  if (alpha_theta >= eta * h_norm) return true;
  const double g_norm = norm2(g_fast(state.theta, state.w));
  return alpha_w >= eta * g_norm;
}

}  // namespace tsopt::sa
