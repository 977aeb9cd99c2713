#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsopt/disturb.hpp"
#include "tsopt/image.hpp"
#include "tsopt/linalg.hpp"
#include "tsopt/objective.hpp"
#include "tsopt/sa.hpp"

namespace tsopt::bench {

// ---- shipped objectives ----------------------------------------------------

// f(x, y) = (1 + x^2)(100 - y^2). The gradient is oriented for the two-player
// use: descent in x, ascent in y, so the y component carries the plain
// partial derivative and the intended fast drift is +df/dy.
Objective saddle_objective();

// f(x) = 1/2 sum_i c_i x_i^2 with per-coordinate curvatures c_i > 0.
Objective quadratic_objective(const std::vector<double>& curvatures);

// One-dimensional tilted quartic (x^2 - 1)^2 + tilt * x. Small positive tilts
// leave a barely-there dimple on the right and a deep basin on the left.
Objective double_well_objective(double tilt);

// ---- gradient fidelity -----------------------------------------------------

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_probe = 0;
  std::size_t worst_component = 0;
  bool pass = false;  // max_rel_error <= 1e-5
};

// Central finite differences (step 1e-5 (1 + |theta_i|)) against the analytic
// gradient at seeded uniform probes in [-3, 3]^dim. Relative error uses
// max(1, |analytic|) in the denominator.
GradCheckReport grad_check(const Objective& obj, std::size_t probes,
                           std::uint64_t seed);

// ---- experiment plumbing ---------------------------------------------------

// Umbrella for a CLI-driven run: which experiment, its seeds, how long, where
// outputs go, plus experiment-specific knobs left as parsed JSON.
struct ExperimentConfig {
  std::string kind;
  std::vector<std::uint64_t> seeds;  // at least one
  std::size_t run_length = 1;        // at least 1
  std::string out_dir;
  nlohmann::json settings;

  void validate() const;
};

enum class RunStatus { converged, diverged, max_steps };
const char* to_string(RunStatus s);

// One seeded saddle run. xs/ys/fs hold the full per-step trajectory starting
// at the initial point; status reflects the 1e12 overflow guard.
struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<double> xs, ys, fs;
  RunStatus status = RunStatus::max_steps;
  std::size_t steps_to_convergence = 0;  // first index of the sustained window

  double norm(std::size_t i) const;
};

struct SaddleRegime {
  std::string name;
  double rate_x;  // slow/descending player
  double rate_y;  // fast/ascending player
};

// The four constant-rate regimes the saddle comparison runs: equal 0.01,
// equal 0.001, split 1e-4 (x) / 1e-2 (y), and the reversed split.
std::vector<SaddleRegime> standard_saddle_regimes();

struct SaddleConfig {
  double sigma = 0.05;  // additive Gaussian noise per component
  double start_x = 2.0;
  double start_y = 1.0;
  std::size_t run_length = 30000;
  std::vector<std::uint64_t> seeds;
  double convergence_radius = 0.1;
  std::size_t sustain_steps = 100;
};

struct SaddleRegimeResult {
  SaddleRegime regime;
  std::vector<RunRecord> runs;
  std::size_t n_converged = 0;
  std::size_t n_diverged = 0;
  std::size_t n_max_steps = 0;
  double median_steps = 0.0;  // over converged runs; meaningless when none
};

// Runs every regime for every seed with simultaneous constant-rate updates,
// additive Gaussian noise on both players, convergence declared at
// ||(x, y)|| < convergence_radius sustained for sustain_steps steps.
std::vector<SaddleRegimeResult> run_saddle_experiment(const SaddleConfig& cfg);
std::vector<SaddleRegimeResult> run_saddle_experiment(
    const SaddleConfig& cfg, const std::vector<SaddleRegime>& regimes);

// ---- synthetic corpora and distance sweeps ---------------------------------

// Seeded grayscale corpus mixing linear gradients, concentric rings and
// checkerboards, with a little additive noise so feature covariances stay
// well conditioned. Values in [0, 255].
std::vector<Image> make_structured_corpus(std::uint64_t seed, std::size_t count,
                                          std::size_t size = 32);

// A visually different family (diagonal stripes and flat patches) used as the
// contamination source.
std::vector<Image> make_foreign_corpus(std::uint64_t seed, std::size_t count,
                                       std::size_t size = 32);

struct MonotonicityRow {
  double level = 0.0;
  double mean_fid = 0.0;
  double min_fid = 0.0;
  double max_fid = 0.0;
  double mean_ind = 0.0;  // class-probability head over the same features
};

struct MonotonicityReport {
  disturb::Kind kind = disturb::Kind::gaussian_noise;
  std::vector<MonotonicityRow> rows;
  bool fid_monotone = false;  // mean_fid strictly increasing across rows
  bool ind_monotone = false;
};

// Disturbs the corpus at each level, extracts surrogate features per
// extractor seed, and compares against the undisturbed reference statistics.
// mean/min/max are taken across extractor seeds. The class-probability head
// is a row softmax over feature components.
MonotonicityReport run_fid_monotonicity(
    std::uint64_t corpus_seed, disturb::Kind kind,
    const std::vector<double>& levels,
    const std::vector<std::uint64_t>& extractor_seeds,
    std::size_t corpus_size = 500, std::size_t feature_dim = 16);

// ---- asymptotic-rate Monte Carlo -------------------------------------------

struct RateCheckReport {
  linalg::SymMatrix empirical;  // second moment of a(n)^{-1/2} (theta_n - theta*)
  linalg::SymMatrix predicted;  // slow-block asymptotic covariance
  double max_rel_error = 0.0;   // entrywise, valid when compared
  double a_bar = 0.0;
  bool compared = false;
  bool theory_inapplicable = false;
  std::string notice;
  std::size_t seeds_used = 0;
  std::size_t run_length = 0;
};

// Runs the linear two-time-scale iteration for every seed, normalizes the
// final slow error by sqrt of the last applied slow rate, and compares the
// Monte-Carlo second moment against the Lyapunov-solved covariance. Noise is
// Gaussian with the system's gamma blocks as joint covariance. Requires both
// stability flags; zero noise skips the comparison with a notice, and a
// schedule that fails the two-time-scale conditions is flagged as outside
// the theory. A scalar 1+1 system with uncorrelated blocks runs through a
// flattened loop that reproduces the generic step stream bit for bit.
RateCheckReport run_rate_experiment(const sa::LinearSystem& sys,
                                    const sa::Schedule& sched,
                                    const std::vector<std::uint64_t>& seeds,
                                    std::size_t run_length);

// ---- report writers ---------------------------------------------------------

void write_saddle_summary_csv(std::ostream& out,
                              const std::vector<SaddleRegimeResult>& results);
void write_saddle_trajectories_csv(std::ostream& out,
                                   const std::vector<SaddleRegimeResult>& results,
                                   std::size_t stride);
nlohmann::json saddle_summary_json(const std::vector<SaddleRegimeResult>& results,
                                   const SaddleConfig& cfg);

void write_monotonicity_csv(std::ostream& out,
                            const std::vector<MonotonicityReport>& reports);
nlohmann::json monotonicity_json(const std::vector<MonotonicityReport>& reports);

void write_rate_report_csv(std::ostream& out, const RateCheckReport& report);
nlohmann::json rate_report_json(const RateCheckReport& report);

}  // namespace tsopt::bench
