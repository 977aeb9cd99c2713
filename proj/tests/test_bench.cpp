#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "tsopt/bench.hpp"
#include "tsopt/disturb.hpp"
#include "tsopt/errors.hpp"
#include "tsopt/frechet.hpp"
#include "tsopt/linalg.hpp"
#include "tsopt/rng.hpp"
#include "tsopt/sa.hpp"

using namespace tsopt;

namespace {

// The 1+1 system used throughout the rate checks: drifts h = -theta - w/2,
// g = -theta/2 - 2w, unit noise on both blocks. Schur complement 0.875.
sa::LinearSystem scalar_pair_system() {
  return sa::LinearSystem(
      linalg::Matrix{{1.0}}, linalg::Matrix{{0.5}}, linalg::Matrix{{0.5}},
      linalg::Matrix{{2.0}}, {0.0}, {0.0}, linalg::SymMatrix::identity(1),
      linalg::Matrix(1, 1, 0.0), linalg::SymMatrix::identity(1));
}

bool kind_is(const Error& e, ErrorKind k) { return e.kind() == k; }

}  // namespace

TEST_CASE("saddle objective matches hand values") {
  const Objective f = bench::saddle_objective();
  REQUIRE(f.dim == 2);
  CHECK(f.value({0.0, 0.0}) == 100.0);
  CHECK(f.value({2.0, 1.0}) == doctest::Approx(495.0).epsilon(1e-15));
  const std::vector<double> g = f.gradient({1.0, 1.0});
  CHECK(g[0] == doctest::Approx(198.0).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(-4.0).epsilon(1e-15));
  const std::vector<double> g0 = f.gradient({0.0, 0.0});
  CHECK(g0[0] == 0.0);
  CHECK(g0[1] == 0.0);
}

TEST_CASE("quadratic and tilted double-well objectives") {
  const Objective q = bench::quadratic_objective({2.0, 0.5});
  CHECK(q.value({3.0, -2.0}) == doctest::Approx(10.0).epsilon(1e-15));
  const std::vector<double> qg = q.gradient({3.0, -2.0});
  CHECK(qg[0] == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(qg[1] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(bench::quadratic_objective({}), Error);
  CHECK_THROWS_AS(bench::quadratic_objective({1.0, -1.0}), Error);

  const Objective w = bench::double_well_objective(1.4);
  CHECK(w.value({0.0}) == 1.0);
  CHECK(w.gradient({1.0})[0] == doctest::Approx(1.4).epsilon(1e-15));
  // Stationary points of the tilt-1.4 quartic: deep minimum, barrier top,
  // shallow dimple.
  for (double root : {-1.1429070899761962, 0.428896406402875,
                      0.7140106835733218})
    CHECK(std::abs(w.gradient({root})[0]) < 1e-12);
  CHECK(w.value({-1.1429070899761962}) ==
        doctest::Approx(-1.5062890607928643).epsilon(1e-12));
}

TEST_CASE("grad_check passes the shipped objectives") {
  const auto saddle = bench::grad_check(bench::saddle_objective(), 50, 5);
  CHECK(saddle.pass);
  CHECK(saddle.max_rel_error <= 1e-5);

  const auto well = bench::grad_check(bench::double_well_objective(1.4), 50, 6);
  CHECK(well.pass);

  // Central differences are truncation-free on quadratics, so only rounding
  // is left and the agreement is far sharper than the pass threshold.
  const auto quad = bench::grad_check(bench::quadratic_objective({1.0}), 100, 7);
  CHECK(quad.pass);
  CHECK(quad.max_rel_error <= 1e-10);
}

TEST_CASE("grad_check flags an injected gradient fault") {
  Objective bad = bench::quadratic_objective({1.0, 2.0});
  const auto honest = bad.gradient;
  bad.gradient = [honest](const std::vector<double>& p) {
    std::vector<double> g = honest(p);
    g[1] += 0.01;
    return g;
  };
  const auto report = bench::grad_check(bad, 40, 8);
  CHECK_FALSE(report.pass);
  CHECK(report.max_rel_error > 1e-4);
  CHECK(report.worst_component == 1);
}

TEST_CASE("grad_check and config validation") {
  Objective empty;
  try {
    bench::grad_check(empty, 10, 1);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(kind_is(e, ErrorKind::invalid_argument));
  }
  try {
    bench::grad_check(bench::saddle_objective(), 0, 1);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(kind_is(e, ErrorKind::invalid_argument));
  }

  bench::ExperimentConfig cfg;
  cfg.kind = "saddle";
  cfg.seeds = {1};
  cfg.run_length = 10;
  CHECK_NOTHROW(cfg.validate());
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.seeds = {1};
  cfg.kind.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("saddle runs are deterministic and fully accounted") {
  bench::SaddleConfig cfg;
  cfg.seeds = {1, 2};
  cfg.run_length = 2000;
  const auto a = bench::run_saddle_experiment(cfg);
  const auto b = bench::run_saddle_experiment(cfg);
  REQUIRE(a.size() == 4);
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a[r].n_converged + a[r].n_diverged + a[r].n_max_steps ==
          cfg.seeds.size());
    REQUIRE(a[r].runs.size() == 2);
    CHECK(a[r].runs[0].xs == b[r].runs[0].xs);
    CHECK(a[r].runs[1].ys == b[r].runs[1].ys);
    for (const auto& run : a[r].runs)
      if (run.status != bench::RunStatus::diverged)
        CHECK(run.xs.size() == cfg.run_length + 1);
  }
}

TEST_CASE("noise-free start at the saddle point never moves") {
  bench::SaddleConfig cfg;
  cfg.sigma = 0.0;
  cfg.start_x = 0.0;
  cfg.start_y = 0.0;
  cfg.run_length = 200;
  cfg.seeds = {1};
  for (const auto& res : bench::run_saddle_experiment(cfg)) {
    REQUIRE(res.runs.size() == 1);
    const auto& run = res.runs[0];
    CHECK(run.status == bench::RunStatus::converged);
    CHECK(run.steps_to_convergence == 0);
    CHECK(run.xs.back() == 0.0);
    CHECK(run.ys.back() == 0.0);
    CHECK(run.fs.front() == 100.0);
    CHECK(run.fs.back() == 100.0);
  }
}

TEST_CASE("noise-free regimes separate: equal-fast stalls, split rates converge") {
  bench::SaddleConfig cfg;
  cfg.sigma = 0.0;
  cfg.seeds = {3};
  const auto res = bench::run_saddle_experiment(cfg);
  REQUIRE(res.size() == 4);

  // equal-1e-2: the x multiplier is 1 - 2e-2(100 - y^2), which sits at -1
  // once y has collapsed, so |x| oscillates without shrinking.
  CHECK(res[0].runs[0].status == bench::RunStatus::max_steps);
  CHECK(std::abs(res[0].runs[0].xs.back()) > 1.0);

  // equal-1e-3 contracts x fast (multiplier ~0.8) but drags y at 1 - 2e-3.
  CHECK(res[1].runs[0].status == bench::RunStatus::converged);
  CHECK(res[1].runs[0].steps_to_convergence > 800);
  CHECK(res[1].runs[0].steps_to_convergence < 2000);

  // Slow x / fast y: y collapses in tens of steps, then x at 1 - 2e-2.
  CHECK(res[2].runs[0].status == bench::RunStatus::converged);
  CHECK(res[2].runs[0].steps_to_convergence > 50);
  CHECK(res[2].runs[0].steps_to_convergence < 600);

  // Reversed split still converges without noise, but y crawls at 1 - 2e-4.
  CHECK(res[3].runs[0].status == bench::RunStatus::converged);
  CHECK(res[3].runs[0].steps_to_convergence > 8000);
  CHECK(res[3].runs[0].steps_to_convergence < 16000);

  CHECK(res[2].runs[0].steps_to_convergence <
        res[1].runs[0].steps_to_convergence);
  CHECK(res[1].runs[0].steps_to_convergence <
        res[3].runs[0].steps_to_convergence);
}

TEST_CASE("noisy regimes keep the split-rate advantage") {
  bench::SaddleConfig cfg;
  cfg.seeds = {101, 102, 103};
  const auto res = bench::run_saddle_experiment(cfg);
  REQUIRE(res.size() == 4);
  // Slow x / fast y converges for every seed; the equal fast pair never does.
  CHECK(res[2].n_converged == 3);
  CHECK(res[0].n_converged == 0);
  CHECK(res[1].n_converged == 3);
  CHECK(res[2].median_steps < res[1].median_steps);
}

TEST_CASE("structured corpora are deterministic, bounded and varied") {
  const auto a = bench::make_structured_corpus(7, 9);
  const auto b = bench::make_structured_corpus(7, 9);
  REQUIRE(a.size() == 9);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].px == b[i].px);
    CHECK(a[i].height == 32);
    CHECK(a[i].width == 32);
    CHECK(a[i].channels == 1);
    for (double v : a[i].px) {
      CHECK(v >= 0.0);
      CHECK(v <= 255.0);
    }
  }
  CHECK(a[0].px != a[1].px);
  CHECK(a[0].px != a[3].px);  // same family, different draw

  const auto foreign = bench::make_foreign_corpus(7, 4);
  REQUIRE(foreign.size() == 4);
  CHECK(foreign[0].px != a[0].px);
  for (double v : foreign[1].px) {
    CHECK(v >= 0.0);
    CHECK(v <= 255.0);
  }
}

TEST_CASE("distance sweep: level zero is the reference, higher levels separate") {
  const auto levels = disturb::canonical_levels(disturb::Kind::gaussian_noise);
  const auto rep = bench::run_fid_monotonicity(
      42, disturb::Kind::gaussian_noise, levels, {11, 12}, 120, 8);
  REQUIRE(rep.rows.size() == levels.size());
  CHECK(rep.rows[0].mean_fid <= 1e-7);
  CHECK(rep.rows[1].mean_fid > rep.rows[0].mean_fid + 1e-4);
  for (const auto& row : rep.rows) {
    CHECK(row.min_fid <= row.mean_fid + 1e-15);
    CHECK(row.mean_fid <= row.max_fid + 1e-15);
    CHECK(row.mean_ind >= 0.0);
  }
  CHECK(rep.fid_monotone);
}

TEST_CASE("contamination sweep uses the foreign corpus") {
  const auto rep = bench::run_fid_monotonicity(
      43, disturb::Kind::contaminate, {0.0, 0.5}, {21}, 80, 8);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].mean_fid <= 1e-7);
  CHECK(rep.rows[1].mean_fid > 0.01);
}

TEST_CASE("flattened rate loop reproduces the generic step stream bit for bit") {
  const sa::LinearSystem sys = scalar_pair_system();
  const sa::Schedule sched(2.0, 0.5, 1.0, 0.6);
  const std::vector<std::uint64_t> seeds = {11, 12, 13};
  const std::size_t steps = 500;

  const auto report = bench::run_rate_experiment(sys, sched, seeds, steps);

  // Manual route: the generic coupled step driven seed by seed, normalized
  // and averaged with the same expressions.
  const auto oracles = sa::oracles_from(sys);
  const double sqrt_a = std::sqrt(sched.slow_rate(steps - 1));
  double acc = 0.0;
  for (std::uint64_t seed : seeds) {
    sa::NoiseModel noise(1.0, 1.0, seed);
    sa::IterateState state;
    state.theta = {0.0};
    state.w = {0.0};
    for (std::size_t n = 0; n < steps; ++n)
      state = sa::ttur_step(state, oracles.g_fast, oracles.h_slow, sched, noise);
    const double e = (state.theta[0] - 0.0) / sqrt_a;
    acc += e * e;
  }
  acc = acc / 3.0;

  CHECK(report.empirical(0, 0) == acc);  // bitwise, not approximate
  CHECK(report.seeds_used == 3);
  CHECK(report.a_bar == 0.5);
  CHECK(report.compared);
}

TEST_CASE("rate experiment approaches the solved covariance") {
  const sa::LinearSystem sys = scalar_pair_system();
  const sa::Schedule sched(2.0, 0.5, 1.0, 0.6);
  std::vector<std::uint64_t> seeds(2000);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = derive_seed(77, i);

  const auto report = bench::run_rate_experiment(sys, sched, seeds, 20000);
  CHECK(report.predicted(0, 0) == doctest::Approx(0.85).epsilon(1e-12));
  // Exact finite-run value of the normalized second moment at n = 2e4 is
  // 0.84667 (deterministic two-by-two moment recursion); the Monte-Carlo
  // spread at 2000 seeds is about 0.027, so 0.09 is a generous window.
  CHECK(std::abs(report.empirical(0, 0) - 0.8466711277112067) < 0.09);
  CHECK(report.compared);
  CHECK_FALSE(report.theory_inapplicable);
  CHECK(report.max_rel_error < 0.12);
}

TEST_CASE("anisotropic noise takes the joint-covariance route") {
  sa::LinearSystem sys(
      linalg::Matrix{{1.2, 0.3}, {0.1, 0.9}}, linalg::Matrix{{0.4, 0.0}, {0.0, 0.2}},
      linalg::Matrix{{0.2, 0.1}, {0.0, 0.3}}, linalg::Matrix{{2.0, 0.5}, {0.3, 1.5}},
      {0.0, 0.0}, {0.0, 0.0}, linalg::SymMatrix::diagonal({0.5, 0.8}),
      linalg::Matrix(2, 2, 0.0), linalg::SymMatrix::diagonal({1.0, 0.6}));
  REQUIRE(sys.fast_block_stable);
  REQUIRE(sys.delta_stable);
  const sa::Schedule sched(1.0, 0.5, 1.0, 0.6);
  const auto report =
      bench::run_rate_experiment(sys, sched, {1, 2, 3, 4}, 300);
  CHECK(report.empirical.dim() == 2);
  CHECK(report.predicted.dim() == 2);
  CHECK(report.compared);
  CHECK(std::isfinite(report.max_rel_error));
}

TEST_CASE("zero noise skips the asymptotic comparison with a notice") {
  sa::LinearSystem sys(linalg::Matrix{{1.0}}, linalg::Matrix{{0.5}},
                       linalg::Matrix{{0.5}}, linalg::Matrix{{2.0}}, {0.0},
                       {0.0}, linalg::SymMatrix(1), linalg::Matrix(1, 1, 0.0),
                       linalg::SymMatrix(1));
  const auto report =
      bench::run_rate_experiment(sys, sa::Schedule(2.0, 0.5, 1.0, 0.6), {5}, 50);
  CHECK_FALSE(report.compared);
  CHECK(report.empirical(0, 0) == 0.0);
  CHECK(report.notice.find("zero noise") != std::string::npos);
  CHECK_FALSE(report.theory_inapplicable);
}

TEST_CASE("equal-time-scale schedule is flagged as outside the theory") {
  const auto report = bench::run_rate_experiment(
      scalar_pair_system(), sa::Schedule(0.01, 0.01, 1.0, 1.0, true), {5, 6}, 50);
  CHECK_FALSE(report.compared);
  CHECK(report.theory_inapplicable);
  CHECK(report.a_bar == 0.0);
  CHECK(report.notice.find("two-time-scale") != std::string::npos);
}

TEST_CASE("rate experiment rejects unstable systems and empty seed lists") {
  sa::LinearSystem unstable(linalg::Matrix{{1.0}}, linalg::Matrix{{0.5}},
                            linalg::Matrix{{0.5}}, linalg::Matrix{{-2.0}},
                            {0.0}, {0.0});
  try {
    bench::run_rate_experiment(unstable, sa::Schedule(1.0, 0.5, 1.0, 0.6), {1},
                               10);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(kind_is(e, ErrorKind::singular_system));
  }
  try {
    bench::run_rate_experiment(scalar_pair_system(),
                               sa::Schedule(1.0, 0.5, 1.0, 0.6), {}, 10);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(kind_is(e, ErrorKind::invalid_argument));
  }
}

TEST_CASE("saddle report writers") {
  bench::SaddleConfig cfg;
  cfg.seeds = {9};
  cfg.run_length = 300;
  cfg.sustain_steps = 50;
  const auto res = bench::run_saddle_experiment(
      cfg, {{"equal-1e-2", 1e-2, 1e-2}});

  std::ostringstream summary;
  bench::write_saddle_summary_csv(summary, res);
  const std::string s = summary.str();
  CHECK(s.rfind("regime,rate_x,rate_y,seeds,converged,diverged,max_steps,"
                "median_steps_to_convergence\n", 0) == 0);
  CHECK(s.find("equal-1e-2,0.01") != std::string::npos);

  std::ostringstream traj;
  bench::write_saddle_trajectories_csv(traj, res, 97);
  const std::string t = traj.str();
  CHECK(t.rfind("regime,seed,n,x,y,f,norm\n", 0) == 0);
  // Strided rows plus the forced final row.
  CHECK(t.find("equal-1e-2,9,0,") != std::string::npos);
  CHECK(t.find("equal-1e-2,9,291,") != std::string::npos);
  CHECK(t.find("equal-1e-2,9,300,") != std::string::npos);

  const nlohmann::json j = bench::saddle_summary_json(res, cfg);
  CHECK(j["regimes"].size() == 1);
  CHECK(j["regimes"][0]["runs"][0]["seed"] == 9);
  CHECK(j["sigma"] == cfg.sigma);
}

TEST_CASE("distance and rate report writers") {
  bench::MonotonicityReport rep;
  rep.kind = disturb::Kind::gaussian_blur;
  rep.rows = {{0.0, 0.0, 0.0, 0.0, 1.0}, {1.0, 0.5, 0.4, 0.6, 2.0}};
  rep.fid_monotone = true;
  std::ostringstream mono;
  bench::write_monotonicity_csv(mono, {rep});
  CHECK(mono.str() ==
        "kind,level,mean_fid,min_fid,max_fid,mean_ind\n"
        "gaussian_blur,0,0,0,0,1\n"
        "gaussian_blur,1,0.5,0.40000000000000002,0.59999999999999998,2\n");
  const nlohmann::json jm = bench::monotonicity_json({rep});
  CHECK(jm[0]["kind"] == "gaussian_blur");
  CHECK(jm[0]["fid_monotone"] == true);
  CHECK(jm[0]["rows"].size() == 2);

  const auto report = bench::run_rate_experiment(
      scalar_pair_system(), sa::Schedule(2.0, 0.5, 1.0, 0.6), {1, 2}, 40);
  std::ostringstream rate;
  bench::write_rate_report_csv(rate, report);
  const std::string r = rate.str();
  CHECK(r.rfind("name,value\n", 0) == 0);
  CHECK(r.find("empirical_0_0,") != std::string::npos);
  CHECK(r.find("predicted_0_0,") != std::string::npos);
  CHECK(r.find("a_bar,0.5\n") != std::string::npos);
  const nlohmann::json jr = bench::rate_report_json(report);
  CHECK(jr["seeds"] == 2);
  CHECK(jr["empirical"].size() == 1);
}
