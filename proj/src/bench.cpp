#include "tsopt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tsopt/errors.hpp"
#include "tsopt/frechet.hpp"
#include "tsopt/rng.hpp"

namespace tsopt::bench {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double clamp255(double v) { return std::min(255.0, std::max(0.0, v)); }

// True when the block is s^2 * I for some s, checked exactly: the scalar
// noise route and the joint-covariance route only coincide bit for bit when
// the block really is isotropic.
bool isotropic(const linalg::SymMatrix& c, double& sigma_out) {
  const std::size_t d = c.dim();
  if (d == 0) return false;
  const double v = c(0, 0);
  if (v < 0.0) return false;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double want = (i == j) ? v : 0.0;
      if (c(i, j) != want) return false;
    }
  sigma_out = std::sqrt(v);
  return true;
}

nlohmann::json matrix_json(const linalg::SymMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Row softmax over feature components, shifted by the row max so the
// normalized rows sum to 1 well within the probability-table tolerance.
frechet::ProbTable softmax_head(const frechet::FeatureMatrix& f) {
  frechet::ProbTable t;
  t.rows = f.rows;
  t.cols = f.dim;
  t.p.resize(f.rows * f.dim);
  for (std::size_t i = 0; i < f.rows; ++i) {
    double mx = -1e300;
    for (std::size_t k = 0; k < f.dim; ++k)
      mx = std::max(mx, static_cast<double>(f.data[i * f.dim + k]));
    double sum = 0.0;
    for (std::size_t k = 0; k < f.dim; ++k) {
      const double e = std::exp(static_cast<double>(f.data[i * f.dim + k]) - mx);
      t.p[i * t.cols + k] = e;
      sum += e;
    }
    for (std::size_t k = 0; k < f.dim; ++k) t.p[i * t.cols + k] /= sum;
  }
  return t;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

// ---- shipped objectives ----------------------------------------------------

Objective saddle_objective() {
  Objective obj;
  obj.dim = 2;
  obj.value = [](const std::vector<double>& p) {
    return (1.0 + p[0] * p[0]) * (100.0 - p[1] * p[1]);
  };
  obj.gradient = [](const std::vector<double>& p) {
    return std::vector<double>{2.0 * p[0] * (100.0 - p[1] * p[1]),
                               -2.0 * p[1] * (1.0 + p[0] * p[0])};
  };
  return obj;
}

Objective quadratic_objective(const std::vector<double>& curvatures) {
  require(!curvatures.empty(), ErrorKind::invalid_argument,
          "quadratic_objective: need at least one curvature");
  for (double c : curvatures)
    require(c > 0.0, ErrorKind::invalid_argument,
            "quadratic_objective: curvatures must be positive");
  Objective obj;
  obj.dim = curvatures.size();
  obj.value = [curvatures](const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < curvatures.size(); ++i)
      acc += 0.5 * curvatures[i] * p[i] * p[i];
    return acc;
  };
  obj.gradient = [curvatures](const std::vector<double>& p) {
    std::vector<double> g(curvatures.size());
    for (std::size_t i = 0; i < curvatures.size(); ++i)
      g[i] = curvatures[i] * p[i];
    return g;
  };
  return obj;
}

Objective double_well_objective(double tilt) {
  Objective obj;
  obj.dim = 1;
  obj.value = [tilt](const std::vector<double>& p) {
    const double s = p[0] * p[0] - 1.0;
    return s * s + tilt * p[0];
  };
  obj.gradient = [tilt](const std::vector<double>& p) {
    return std::vector<double>{4.0 * p[0] * (p[0] * p[0] - 1.0) + tilt};
  };
  return obj;
}

// ---- gradient fidelity -----------------------------------------------------

GradCheckReport grad_check(const Objective& obj, std::size_t probes,
                           std::uint64_t seed) {
  require(obj.dim >= 1 && obj.value && obj.gradient,
          ErrorKind::invalid_argument,
          "grad_check: objective needs a dimension, a value and a gradient");
  require(probes >= 1, ErrorKind::invalid_argument,
          "grad_check: need at least one probe");

  Rng rng(seed);
  GradCheckReport report;
  std::vector<double> theta(obj.dim), shifted(obj.dim);
  for (std::size_t p = 0; p < probes; ++p) {
    for (auto& v : theta) v = -3.0 + 6.0 * rng.uniform01();
    const std::vector<double> analytic = obj.gradient(theta);
    require(analytic.size() == obj.dim, ErrorKind::dimension_mismatch,
            "grad_check: gradient returned the wrong dimension");
    for (std::size_t i = 0; i < obj.dim; ++i) {
      const double h = 1e-5 * (1.0 + std::abs(theta[i]));
      shifted = theta;
      shifted[i] = theta[i] + h;
      const double fp = obj.value(shifted);
      shifted[i] = theta[i] - h;
      const double fm = obj.value(shifted);
      const double fd = (fp - fm) / (2.0 * h);
      const double rel =
          std::abs(fd - analytic[i]) / std::max(1.0, std::abs(analytic[i]));
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_probe = p;
        report.worst_component = i;
      }
    }
  }
  report.pass = report.max_rel_error <= 1e-5;
  return report;
}

// ---- experiment plumbing ---------------------------------------------------

void ExperimentConfig::validate() const {
  require(!kind.empty(), ErrorKind::invalid_argument,
          "ExperimentConfig: kind must be set");
  require(!seeds.empty(), ErrorKind::invalid_argument,
          "ExperimentConfig: need at least one seed");
  require(run_length >= 1, ErrorKind::invalid_argument,
          "ExperimentConfig: run_length must be at least 1");
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::diverged: return "diverged";
    case RunStatus::max_steps: return "max_steps";
  }
  return "unknown";
}

double RunRecord::norm(std::size_t i) const {
  require(i < xs.size() && i < ys.size(), ErrorKind::invalid_argument,
          "RunRecord::norm: index past the recorded trajectory");
  return std::hypot(xs[i], ys[i]);
}

std::vector<SaddleRegime> standard_saddle_regimes() {
  return {
      {"equal-1e-2", 1e-2, 1e-2},
      {"equal-1e-3", 1e-3, 1e-3},
      {"two-scale-1e-4-1e-2", 1e-4, 1e-2},
      {"two-scale-1e-2-1e-4", 1e-2, 1e-4},
  };
}

std::vector<SaddleRegimeResult> run_saddle_experiment(const SaddleConfig& cfg) {
  return run_saddle_experiment(cfg, standard_saddle_regimes());
}

std::vector<SaddleRegimeResult> run_saddle_experiment(
    const SaddleConfig& cfg, const std::vector<SaddleRegime>& regimes) {
  require(cfg.sigma >= 0.0, ErrorKind::invalid_argument,
          "run_saddle_experiment: sigma must be non-negative");
  require(!cfg.seeds.empty(), ErrorKind::invalid_argument,
          "run_saddle_experiment: need at least one seed");
  require(cfg.run_length >= 1, ErrorKind::invalid_argument,
          "run_saddle_experiment: run_length must be at least 1");
  require(cfg.convergence_radius > 0.0, ErrorKind::invalid_argument,
          "run_saddle_experiment: convergence_radius must be positive");
  require(cfg.sustain_steps >= 1 && cfg.sustain_steps <= cfg.run_length,
          ErrorKind::invalid_argument,
          "run_saddle_experiment: sustain_steps must be in [1, run_length]");
  require(!regimes.empty(), ErrorKind::invalid_argument,
          "run_saddle_experiment: need at least one regime");

  const Objective obj = saddle_objective();
  // The x player descends, the y player ascends; both oracles read the
  // pre-step state (simultaneous updates).
  const sa::Oracle h_slow = [](const std::vector<double>& th,
                               const std::vector<double>& w) {
    return std::vector<double>{-2.0 * th[0] * (100.0 - w[0] * w[0])};
  };
  const sa::Oracle g_fast = [](const std::vector<double>& th,
                               const std::vector<double>& w) {
    return std::vector<double>{-2.0 * w[0] * (1.0 + th[0] * th[0])};
  };

  std::vector<SaddleRegimeResult> results;
  results.reserve(regimes.size());
  for (const SaddleRegime& regime : regimes) {
    const sa::Schedule sched(regime.rate_x, regime.rate_y, 1.0, 1.0, true);
    SaddleRegimeResult res;
    res.regime = regime;
    for (std::uint64_t seed : cfg.seeds) {
      RunRecord rec;
      rec.seed = seed;
      rec.xs.reserve(cfg.run_length + 1);
      rec.ys.reserve(cfg.run_length + 1);
      rec.fs.reserve(cfg.run_length + 1);
      sa::NoiseModel noise(cfg.sigma, cfg.sigma, seed);
      sa::IterateState state;
      state.theta = {cfg.start_x};
      state.w = {cfg.start_y};
      auto record = [&](const sa::IterateState& s) {
        rec.xs.push_back(s.theta[0]);
        rec.ys.push_back(s.w[0]);
        rec.fs.push_back(obj.value({s.theta[0], s.w[0]}));
      };
      record(state);
      bool diverged = false;
      for (std::size_t n = 0; n < cfg.run_length; ++n) {
        try {
          state = sa::ttur_step(state, g_fast, h_slow, sched, noise);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::diverged) throw;
          diverged = true;
          break;
        }
        record(state);
      }
      if (diverged) {
        rec.status = RunStatus::diverged;
      } else {
        rec.status = RunStatus::max_steps;
        std::size_t consec = 0;
        for (std::size_t i = 0; i < rec.xs.size(); ++i) {
          if (rec.norm(i) < cfg.convergence_radius) {
            ++consec;
            if (consec == cfg.sustain_steps) {
              rec.status = RunStatus::converged;
              rec.steps_to_convergence = i + 1 - cfg.sustain_steps;
              break;
            }
          } else {
            consec = 0;
          }
        }
      }
      switch (rec.status) {
        case RunStatus::converged: ++res.n_converged; break;
        case RunStatus::diverged: ++res.n_diverged; break;
        case RunStatus::max_steps: ++res.n_max_steps; break;
      }
      res.runs.push_back(std::move(rec));
    }
    std::vector<double> steps;
    for (const RunRecord& r : res.runs)
      if (r.status == RunStatus::converged)
        steps.push_back(static_cast<double>(r.steps_to_convergence));
    res.median_steps = median_of(std::move(steps));
    results.push_back(std::move(res));
  }
  return results;
}

// ---- synthetic corpora and distance sweeps ---------------------------------

std::vector<Image> make_structured_corpus(std::uint64_t seed, std::size_t count,
                                          std::size_t size) {
  require(count >= 1 && size >= 1, ErrorKind::invalid_argument,
          "make_structured_corpus: count and size must be at least 1");
  std::vector<Image> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    Image img(size, size, 1);
    const std::size_t family = i % 3;
    if (family == 0) {
      // Oriented linear gradient.
      const double phi = 2.0 * M_PI * rng.uniform01();
      const double base = 60.0 + 135.0 * rng.uniform01();
      const double amp = 60.0 + 60.0 * rng.uniform01();
      const double cx = std::cos(phi), sx = std::sin(phi);
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
          const double t =
              ((x + 0.5) * cx + (y + 0.5) * sx) / static_cast<double>(size);
          img.at(y, x) = base + amp * t;
        }
    } else if (family == 1) {
      // Concentric rings around a jittered center.
      const double cy = size * (0.35 + 0.3 * rng.uniform01());
      const double cx = size * (0.35 + 0.3 * rng.uniform01());
      const double omega = 2.0 * M_PI * (0.05 + 0.10 * rng.uniform01());
      const double phase = 2.0 * M_PI * rng.uniform01();
      const double amp = 50.0 + 60.0 * rng.uniform01();
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
          const double r = std::hypot(x + 0.5 - cx, y + 0.5 - cy);
          img.at(y, x) = 127.5 + amp * std::cos(omega * r + phase);
        }
    } else {
      // Checkerboard with a random cell size, phase and tone pair.
      const std::size_t cell = std::size_t{1} << (1 + rng.below(3));  // 2, 4, 8
      const std::size_t offx = rng.below(cell);
      const std::size_t offy = rng.below(cell);
      const double dark = 20.0 + 50.0 * rng.uniform01();
      const double light = 150.0 + 80.0 * rng.uniform01();
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
          const bool on = (((x + offx) / cell) + ((y + offy) / cell)) % 2 == 0;
          img.at(y, x) = on ? dark : light;
        }
    }
    // Low-amplitude noise keeps the feature covariance well conditioned.
    for (double& v : img.px) v = clamp255(v + 2.0 * rng.normal());
    out.push_back(std::move(img));
  }
  return out;
}

std::vector<Image> make_foreign_corpus(std::uint64_t seed, std::size_t count,
                                       std::size_t size) {
  require(count >= 1 && size >= 1, ErrorKind::invalid_argument,
          "make_foreign_corpus: count and size must be at least 1");
  std::vector<Image> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    Image img(size, size, 1);
    if (i % 2 == 0) {
      // Diagonal stripes.
      const std::size_t width = 2 + rng.below(6);
      const bool rising = rng.below(2) == 0;
      const double tone_a = 10.0 + 60.0 * rng.uniform01();
      const double tone_b = 170.0 + 70.0 * rng.uniform01();
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x) {
          const std::size_t d = rising ? x + y : x + (size - 1 - y);
          img.at(y, x) = (d / width) % 2 == 0 ? tone_a : tone_b;
        }
    } else {
      // Flat 4x4-block patchwork.
      const std::size_t block = std::max<std::size_t>(1, size / 4);
      const std::size_t grid = (size + block - 1) / block;
      std::vector<double> tones(grid * grid);
      for (double& t : tones) t = 15.0 + 225.0 * rng.uniform01();
      for (std::size_t y = 0; y < size; ++y)
        for (std::size_t x = 0; x < size; ++x)
          img.at(y, x) = tones[(y / block) * grid + (x / block)];
    }
    for (double& v : img.px) v = clamp255(v + 2.0 * rng.normal());
    out.push_back(std::move(img));
  }
  return out;
}

MonotonicityReport run_fid_monotonicity(
    std::uint64_t corpus_seed, disturb::Kind kind,
    const std::vector<double>& levels,
    const std::vector<std::uint64_t>& extractor_seeds, std::size_t corpus_size,
    std::size_t feature_dim) {
  require(!levels.empty(), ErrorKind::invalid_argument,
          "run_fid_monotonicity: need at least one level");
  require(!extractor_seeds.empty(), ErrorKind::invalid_argument,
          "run_fid_monotonicity: need at least one extractor seed");
  require(corpus_size >= 2, ErrorKind::invalid_argument,
          "run_fid_monotonicity: corpus_size must be at least 2");
  require(feature_dim >= 1, ErrorKind::invalid_argument,
          "run_fid_monotonicity: feature_dim must be at least 1");

  const std::vector<Image> corpus = make_structured_corpus(corpus_seed, corpus_size);
  std::vector<Image> foreign;
  if (kind == disturb::Kind::contaminate)
    foreign = make_foreign_corpus(derive_seed(corpus_seed, 0xF0), corpus_size);

  std::vector<frechet::SurrogateExtractor> extractors;
  std::vector<frechet::GaussianStats> reference;
  extractors.reserve(extractor_seeds.size());
  reference.reserve(extractor_seeds.size());
  for (std::uint64_t es : extractor_seeds) {
    extractors.emplace_back(es, feature_dim);
    reference.push_back(
        frechet::stats_of(frechet::extract_features(extractors.back(), corpus)));
  }

  MonotonicityReport report;
  report.kind = kind;
  const std::uint64_t disturb_base = derive_seed(corpus_seed, 0xD157);
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const std::vector<Image> disturbed = disturb::apply_corpus(
        kind, corpus, foreign, levels[li], derive_seed(disturb_base, li));
    MonotonicityRow row;
    row.level = levels[li];
    double fid_sum = 0.0, ind_sum = 0.0;
    row.min_fid = 1e300;
    row.max_fid = -1e300;
    for (std::size_t e = 0; e < extractors.size(); ++e) {
      const frechet::FeatureMatrix f =
          frechet::extract_features(extractors[e], disturbed);
      const double d = frechet::fid(reference[e], frechet::stats_of(f));
      fid_sum += d;
      row.min_fid = std::min(row.min_fid, d);
      row.max_fid = std::max(row.max_fid, d);
      ind_sum += frechet::inception_distance(softmax_head(f));
    }
    row.mean_fid = fid_sum / static_cast<double>(extractors.size());
    row.mean_ind = ind_sum / static_cast<double>(extractors.size());
    report.rows.push_back(row);
  }

  report.fid_monotone = report.rows.size() >= 2;
  report.ind_monotone = report.rows.size() >= 2;
  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    if (!(report.rows[k].mean_fid > report.rows[k - 1].mean_fid))
      report.fid_monotone = false;
    if (!(report.rows[k].mean_ind > report.rows[k - 1].mean_ind))
      report.ind_monotone = false;
  }
  return report;
}

// ---- asymptotic-rate Monte Carlo -------------------------------------------

RateCheckReport run_rate_experiment(const sa::LinearSystem& sys,
                                    const sa::Schedule& sched,
                                    const std::vector<std::uint64_t>& seeds,
                                    std::size_t run_length) {
  require(!seeds.empty(), ErrorKind::invalid_argument,
          "run_rate_experiment: need at least one seed");
  require(run_length >= 1, ErrorKind::invalid_argument,
          "run_rate_experiment: run_length must be at least 1");
  require(sys.fast_block_stable && sys.delta_stable, ErrorKind::singular_system,
          "run_rate_experiment: system fails the stability preconditions");

  const std::size_t m = sys.slow_dim();
  const std::size_t k = sys.fast_dim();
  const sa::FixedPoint star = sa::linear_fixed_point(sys);

  RateCheckReport report;
  report.seeds_used = seeds.size();
  report.run_length = run_length;
  report.a_bar = (!sched.constant_mode && sched.alpha_exp == 1.0)
                     ? 1.0 / sched.a0
                     : 0.0;

  double sigma_theta = 0.0, sigma_w = 0.0;
  const bool iso = sys.gamma12.max_abs() == 0.0 &&
                   isotropic(sys.gamma11, sigma_theta) &&
                   isotropic(sys.gamma22, sigma_w);
  const bool zero_noise = iso && sigma_theta == 0.0 && sigma_w == 0.0;
  const bool flat = m == 1 && k == 1 && iso;

  // Normalization uses the last applied slow rate, the natural a(N) for a
  // run of N steps.
  const double sqrt_a = std::sqrt(sched.slow_rate(run_length - 1));

  linalg::Matrix joint;
  if (!iso) {
    linalg::Matrix j(m + k, m + k, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t l = 0; l < m; ++l) j(i, l) = sys.gamma11(i, l);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t l = 0; l < k; ++l) {
        j(i, m + l) = sys.gamma12(i, l);
        j(m + l, i) = sys.gamma12(i, l);
      }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < k; ++l) j(m + i, m + l) = sys.gamma22(i, l);
    joint = j;
  }

  const sa::LinearOracles oracles = sa::oracles_from(sys);

  // Rate tables are filled through the same Schedule calls the generic step
  // makes, so the flattened loop sees identical values.
  std::vector<double> rate_a, rate_b;
  if (flat) {
    rate_a.resize(run_length);
    rate_b.resize(run_length);
    for (std::size_t n = 0; n < run_length; ++n) {
      rate_a[n] = sched.slow_rate(n);
      rate_b[n] = sched.fast_rate(n);
    }
  }

  linalg::Matrix acc(m, m, 0.0);
  std::vector<double> err(m);
  for (std::uint64_t seed : seeds) {
    std::vector<double> theta_final;
    if (flat) {
      // Transcription of the generic path for a scalar pair with independent
      // noise blocks: same draw order, same operation order, no allocation.
      Rng rng(seed);
      const double a11v = sys.a11(0, 0), a12v = sys.a12(0, 0);
      const double a21v = sys.a21(0, 0), a22v = sys.a22(0, 0);
      const double a1v = sys.a1[0], a2v = sys.a2[0];
      double th = star.theta[0], wv = star.w[0];
      for (std::size_t n = 0; n < run_length; ++n) {
        const double mt = sigma_theta * rng.normal();
        const double mw = sigma_w * rng.normal();
        double g = a2v;
        g -= a21v * th;
        g -= a22v * wv;
        const double w_next = wv + rate_b[n] * (g + mw);
        double h = a1v;
        h -= a11v * th;
        h -= a12v * wv;
        const double th_next = th + rate_a[n] * (h + mt);
        require(std::abs(th_next) <= 1e12 && std::abs(w_next) <= 1e12,
                ErrorKind::diverged,
                "run_rate_experiment: iterate exceeded the overflow guard");
        th = th_next;
        wv = w_next;
      }
      theta_final = {th};
    } else {
      sa::NoiseModel noise =
          iso ? sa::NoiseModel(sigma_theta, sigma_w, seed)
              : sa::NoiseModel(linalg::SymMatrix(joint), m, seed);
      sa::IterateState state;
      state.theta = star.theta;
      state.w = star.w;
      for (std::size_t n = 0; n < run_length; ++n)
        state = sa::ttur_step(state, oracles.g_fast, oracles.h_slow, sched,
                              noise);
      theta_final = std::move(state.theta);
    }
    for (std::size_t i = 0; i < m; ++i)
      err[i] = (theta_final[i] - star.theta[i]) / sqrt_a;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) acc(i, j) += err[i] * err[j];
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      acc(i, j) = acc(i, j) / static_cast<double>(seeds.size());
  report.empirical = linalg::SymMatrix(acc);

  const sa::ScheduleReport sr = sa::validate_schedule(sched);
  report.predicted = sa::asymptotic_covariance(sys, report.a_bar).sigma11;
  if (zero_noise) {
    report.notice =
        "zero noise: empirical covariance is identically zero; "
        "asymptotic comparison skipped";
  } else if (!sr.all_pass()) {
    report.theory_inapplicable = true;
    report.notice =
        "schedule fails the two-time-scale conditions; "
        "asymptotic theory not applicable";
  } else {
    report.compared = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const double p = report.predicted(i, j);
        const double rel = std::abs(report.empirical(i, j) - p) /
                           std::max(std::abs(p), 1e-12);
        worst = std::max(worst, rel);
      }
    report.max_rel_error = worst;
  }
  return report;
}

// ---- report writers ----------------------------------------------------------

void write_saddle_summary_csv(std::ostream& out,
                              const std::vector<SaddleRegimeResult>& results) {
  out << "regime,rate_x,rate_y,seeds,converged,diverged,max_steps,"
         "median_steps_to_convergence\n";
  for (const SaddleRegimeResult& r : results) {
    out << r.regime.name << ',' << num(r.regime.rate_x) << ','
        << num(r.regime.rate_y) << ',' << r.runs.size() << ',' << r.n_converged
        << ',' << r.n_diverged << ',' << r.n_max_steps << ','
        << num(r.median_steps) << '\n';
  }
}

void write_saddle_trajectories_csv(std::ostream& out,
                                   const std::vector<SaddleRegimeResult>& results,
                                   std::size_t stride) {
  require(stride >= 1, ErrorKind::invalid_argument,
          "write_saddle_trajectories_csv: stride must be at least 1");
  out << "regime,seed,n,x,y,f,norm\n";
  for (const SaddleRegimeResult& r : results)
    for (const RunRecord& run : r.runs) {
      const std::size_t last = run.xs.size() - 1;
      for (std::size_t i = 0; i <= last; i += stride) {
        out << r.regime.name << ',' << run.seed << ',' << i << ','
            << num(run.xs[i]) << ',' << num(run.ys[i]) << ','
            << num(run.fs[i]) << ',' << num(run.norm(i)) << '\n';
        if (i != last && i + stride > last) {
          out << r.regime.name << ',' << run.seed << ',' << last << ','
              << num(run.xs[last]) << ',' << num(run.ys[last]) << ','
              << num(run.fs[last]) << ',' << num(run.norm(last)) << '\n';
        }
      }
    }
}

nlohmann::json saddle_summary_json(const std::vector<SaddleRegimeResult>& results,
                                   const SaddleConfig& cfg) {
  nlohmann::json regimes = nlohmann::json::array();
  for (const SaddleRegimeResult& r : results) {
    nlohmann::json runs = nlohmann::json::array();
    for (const RunRecord& run : r.runs) {
      runs.push_back({{"seed", run.seed},
                      {"status", to_string(run.status)},
                      {"steps_to_convergence", run.steps_to_convergence},
                      {"final", {run.xs.back(), run.ys.back()}}});
    }
    regimes.push_back({{"name", r.regime.name},
                       {"rate_x", r.regime.rate_x},
                       {"rate_y", r.regime.rate_y},
                       {"converged", r.n_converged},
                       {"diverged", r.n_diverged},
                       {"max_steps", r.n_max_steps},
                       {"median_steps_to_convergence", r.median_steps},
                       {"runs", std::move(runs)}});
  }
  return {{"sigma", cfg.sigma},
          {"start", {cfg.start_x, cfg.start_y}},
          {"run_length", cfg.run_length},
          {"convergence_radius", cfg.convergence_radius},
          {"sustain_steps", cfg.sustain_steps},
          {"regimes", std::move(regimes)}};
}

void write_monotonicity_csv(std::ostream& out,
                            const std::vector<MonotonicityReport>& reports) {
  out << "kind,level,mean_fid,min_fid,max_fid,mean_ind\n";
  for (const MonotonicityReport& rep : reports)
    for (const MonotonicityRow& row : rep.rows)
      out << disturb::to_string(rep.kind) << ',' << num(row.level) << ','
          << num(row.mean_fid) << ',' << num(row.min_fid) << ','
          << num(row.max_fid) << ',' << num(row.mean_ind) << '\n';
}

nlohmann::json monotonicity_json(const std::vector<MonotonicityReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const MonotonicityReport& rep : reports) {
    nlohmann::json rows = nlohmann::json::array();
    for (const MonotonicityRow& row : rep.rows)
      rows.push_back({{"level", row.level},
                      {"mean_fid", row.mean_fid},
                      {"min_fid", row.min_fid},
                      {"max_fid", row.max_fid},
                      {"mean_ind", row.mean_ind}});
    arr.push_back({{"kind", disturb::to_string(rep.kind)},
                   {"fid_monotone", rep.fid_monotone},
                   {"ind_monotone", rep.ind_monotone},
                   {"rows", std::move(rows)}});
  }
  return arr;
}

void write_rate_report_csv(std::ostream& out, const RateCheckReport& report) {
  out << "name,value\n";
  out << "seeds," << report.seeds_used << '\n';
  out << "run_length," << report.run_length << '\n';
  out << "a_bar," << num(report.a_bar) << '\n';
  out << "compared," << (report.compared ? 1 : 0) << '\n';
  out << "theory_inapplicable," << (report.theory_inapplicable ? 1 : 0) << '\n';
  out << "max_rel_error," << num(report.max_rel_error) << '\n';
  for (std::size_t i = 0; i < report.empirical.dim(); ++i)
    for (std::size_t j = 0; j < report.empirical.dim(); ++j)
      out << "empirical_" << i << '_' << j << ','
          << num(report.empirical(i, j)) << '\n';
  for (std::size_t i = 0; i < report.predicted.dim(); ++i)
    for (std::size_t j = 0; j < report.predicted.dim(); ++j)
      out << "predicted_" << i << '_' << j << ','
          << num(report.predicted(i, j)) << '\n';
  if (!report.notice.empty()) out << "notice," << report.notice << '\n';
}

nlohmann::json rate_report_json(const RateCheckReport& report) {
  return {{"seeds", report.seeds_used},
          {"run_length", report.run_length},
          {"a_bar", report.a_bar},
          {"compared", report.compared},
          {"theory_inapplicable", report.theory_inapplicable},
          {"max_rel_error", report.max_rel_error},
          {"empirical", matrix_json(report.empirical)},
          {"predicted", matrix_json(report.predicted)},
          {"notice", report.notice}};
}

}  // namespace tsopt::bench
