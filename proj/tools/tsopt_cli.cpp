// Experiment driver. Subcommands map one-to-one onto the library's
// orchestration entry points; all output files are deterministic functions
// of the config JSON and the seed, so reruns are byte-identical.
//
// Exit codes: 0 success, 2 invalid config or input, 3 numerical failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsopt/bench.hpp"
#include "tsopt/disturb.hpp"
#include "tsopt/errors.hpp"
#include "tsopt/frechet.hpp"
#include "tsopt/hbf.hpp"
#include "tsopt/image.hpp"
#include "tsopt/rng.hpp"
#include "tsopt/sa.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tsopt;

namespace {

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path, std::ios::binary);
  require(f.good(), ErrorKind::io_error, "cannot open config " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument,
         std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), ErrorKind::invalid_argument,
          "config root must be a JSON object");
  require(j.contains("schema") && j["schema"] == 1,
          ErrorKind::invalid_argument,
          "config must carry a top-level \"schema\": 1");
  return j;
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    require(key == "schema" || allowed.count(key) == 1,
            ErrorKind::invalid_argument,
            context + ": unknown config key \"" + key + "\"");
  }
}

std::vector<std::uint64_t> seeds_from(const json& cfg, std::uint64_t base,
                                      std::size_t default_count) {
  if (cfg.contains("seeds")) {
    require(cfg["seeds"].is_array() && !cfg["seeds"].empty(),
            ErrorKind::invalid_argument, "\"seeds\" must be a non-empty array");
    std::vector<std::uint64_t> out;
    for (const auto& s : cfg["seeds"]) {
      require(s.is_number_unsigned(), ErrorKind::invalid_argument,
              "\"seeds\" entries must be unsigned integers");
      out.push_back(s.get<std::uint64_t>());
    }
    return out;
  }
  std::size_t count = default_count;
  if (cfg.contains("seed_count")) {
    require(cfg["seed_count"].is_number_unsigned() && cfg["seed_count"] >= 1,
            ErrorKind::invalid_argument, "\"seed_count\" must be >= 1");
    count = cfg["seed_count"].get<std::size_t>();
  }
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = derive_seed(base, i);
  return out;
}

double num_field(const json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  require(cfg[key].is_number(), ErrorKind::invalid_argument,
          std::string("\"") + key + "\" must be a number");
  return cfg[key].get<double>();
}

std::size_t size_field(const json& cfg, const char* key, std::size_t fallback) {
  if (!cfg.contains(key)) return fallback;
  require(cfg[key].is_number_unsigned(), ErrorKind::invalid_argument,
          std::string("\"") + key + "\" must be an unsigned integer");
  return cfg[key].get<std::size_t>();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  require(f.good(), ErrorKind::io_error, "cannot open " + path.string());
  f << content;
  f.flush();
  require(f.good(), ErrorKind::io_error, "write failed: " + path.string());
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

// Sorted PGM/PPM listing; sorted order is part of the determinism contract.
std::vector<fs::path> list_images(const std::string& dir) {
  require(fs::is_directory(dir), ErrorKind::io_error,
          dir + " is not a directory");
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".ppm") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

std::vector<Image> load_images(const std::string& dir,
                               std::vector<std::string>* names = nullptr) {
  std::vector<Image> imgs;
  for (const fs::path& p : list_images(dir)) {
    imgs.push_back(read_pnm(p.string()));
    if (names) names->push_back(p.filename().string());
  }
  return imgs;
}

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "csv";

  bool csv() const { return format == "csv"; }
  fs::path out(const std::string& name) const {
    return fs::path(out_dir) / name;
  }
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config_path, "JSON config file (schema 1)");
  sub->add_option("--seed", a.seed, "base seed for derived RNG streams");
  sub->add_option("--out", a.out_dir, "output directory");
  sub->add_option("--format", a.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

int run_saddle(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg,
             {"sigma", "start_x", "start_y", "run_length",
              "convergence_radius", "sustain_steps", "seeds", "seed_count",
              "stride"},
             "saddle");
  bench::SaddleConfig sc;
  sc.sigma = num_field(cfg, "sigma", sc.sigma);
  sc.start_x = num_field(cfg, "start_x", sc.start_x);
  sc.start_y = num_field(cfg, "start_y", sc.start_y);
  sc.run_length = size_field(cfg, "run_length", sc.run_length);
  sc.convergence_radius =
      num_field(cfg, "convergence_radius", sc.convergence_radius);
  sc.sustain_steps = size_field(cfg, "sustain_steps", sc.sustain_steps);
  sc.seeds = seeds_from(cfg, args.seed, 10);
  const std::size_t stride = size_field(cfg, "stride", 100);

  bench::ExperimentConfig ec;
  ec.kind = "saddle";
  ec.seeds = sc.seeds;
  ec.run_length = sc.run_length;
  ec.out_dir = args.out_dir;
  ec.settings = cfg;
  ec.validate();

  const auto results = bench::run_saddle_experiment(sc);
  if (args.csv()) {
    std::ostringstream summary;
    bench::write_saddle_summary_csv(summary, results);
    write_file(args.out("saddle_summary.csv"), summary.str());
    std::ostringstream traj;
    bench::write_saddle_trajectories_csv(traj, results, stride);
    write_file(args.out("saddle_trajectories.csv"), traj.str());
  } else {
    write_file(args.out("saddle.json"),
               json_text(bench::saddle_summary_json(results, sc)));
  }
  for (const auto& r : results)
    std::printf("%s: converged %zu/%zu, median %.0f steps\n",
                r.regime.name.c_str(), r.n_converged, r.runs.size(),
                r.median_steps);
  return 0;
}

int run_fid_sweep(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg,
             {"kinds", "levels", "extractor_seeds", "corpus_seed",
              "corpus_size", "feature_dim"},
             "fid-sweep");
  std::vector<disturb::Kind> kinds;
  if (cfg.contains("kinds")) {
    require(cfg["kinds"].is_array() && !cfg["kinds"].empty(),
            ErrorKind::invalid_argument, "\"kinds\" must be a non-empty array");
    for (const auto& k : cfg["kinds"])
      kinds.push_back(disturb::kind_from_string(k.get<std::string>()));
  } else {
    kinds = {disturb::Kind::gaussian_noise, disturb::Kind::gaussian_blur,
             disturb::Kind::black_rectangles, disturb::Kind::swirl,
             disturb::Kind::salt_pepper, disturb::Kind::contaminate};
  }
  std::vector<std::uint64_t> extractor_seeds = {1, 2, 3};
  if (cfg.contains("extractor_seeds")) {
    extractor_seeds.clear();
    for (const auto& s : cfg["extractor_seeds"])
      extractor_seeds.push_back(s.get<std::uint64_t>());
  }
  const auto corpus_seed = static_cast<std::uint64_t>(
      size_field(cfg, "corpus_seed", args.seed));
  const std::size_t corpus_size = size_field(cfg, "corpus_size", 500);
  const std::size_t feature_dim = size_field(cfg, "feature_dim", 16);

  std::vector<bench::MonotonicityReport> reports;
  for (disturb::Kind k : kinds) {
    std::vector<double> levels = disturb::canonical_levels(k);
    if (cfg.contains("levels")) {
      levels.clear();
      for (const auto& l : cfg["levels"]) levels.push_back(l.get<double>());
    }
    reports.push_back(bench::run_fid_monotonicity(
        corpus_seed, k, levels, extractor_seeds, corpus_size, feature_dim));
  }
  if (args.csv()) {
    std::ostringstream out;
    bench::write_monotonicity_csv(out, reports);
    write_file(args.out("fid_sweep.csv"), out.str());
  } else {
    write_file(args.out("fid_sweep.json"),
               json_text(bench::monotonicity_json(reports)));
  }
  for (const auto& rep : reports)
    std::printf("%s: fid %s, ind %s\n", disturb::to_string(rep.kind),
                rep.fid_monotone ? "monotone" : "NOT monotone",
                rep.ind_monotone ? "monotone" : "not monotone");
  return 0;
}

int run_rate_check(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg, {"system", "schedule", "seeds", "seed_count", "run_length"},
             "rate-check");
  sa::LinearSystem sys =
      cfg.contains("system")
          ? sa::LinearSystem::from_json(cfg["system"])
          : sa::LinearSystem(linalg::Matrix{{1.0}}, linalg::Matrix{{0.5}},
                             linalg::Matrix{{0.5}}, linalg::Matrix{{2.0}},
                             {0.0}, {0.0});
  const sa::Schedule sched = cfg.contains("schedule")
                                 ? sa::Schedule::from_json(cfg["schedule"])
                                 : sa::Schedule(2.0, 0.5, 1.0, 0.6);
  const auto seeds = seeds_from(cfg, args.seed, 100);
  const std::size_t run_length = size_field(cfg, "run_length", 10000);

  bench::ExperimentConfig ec;
  ec.kind = "rate-check";
  ec.seeds = seeds;
  ec.run_length = run_length;
  ec.out_dir = args.out_dir;
  ec.settings = cfg;
  ec.validate();

  const auto report = bench::run_rate_experiment(sys, sched, seeds, run_length);
  if (args.csv()) {
    std::ostringstream out;
    bench::write_rate_report_csv(out, report);
    write_file(args.out("rate_check.csv"), out.str());
  } else {
    write_file(args.out("rate_check.json"),
               json_text(bench::rate_report_json(report)));
  }
  if (report.compared)
    std::printf("empirical vs predicted: max rel err %.3g over %zu seeds\n",
                report.max_rel_error, report.seeds_used);
  else
    std::printf("comparison skipped: %s\n", report.notice.c_str());
  return 0;
}

int run_adam_hbf(const CommonArgs& args) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg,
             {"run_length", "rate", "tau", "memory_coeff", "memory",
              "noise_sigma", "theta0", "curvatures"},
             "adam-hbf");
  hbf::HbfSchedule sched;
  sched.a = num_field(cfg, "rate", 0.1);
  sched.tau = num_field(cfg, "tau", 0.3);
  sched.r = num_field(cfg, "memory_coeff", 0.9);
  if (cfg.contains("memory")) {
    const std::string m = cfg["memory"].get<std::string>();
    require(m == "exponential" || m == "polynomial",
            ErrorKind::invalid_argument,
            "\"memory\" must be \"exponential\" or \"polynomial\"");
    sched.mode = m == "exponential" ? hbf::MemoryMode::exponential
                                    : hbf::MemoryMode::polynomial;
  }
  const std::size_t run_length = size_field(cfg, "run_length", 1000);
  const double noise_sigma = num_field(cfg, "noise_sigma", 1.0);
  std::vector<double> curvatures = {1.0, 4.0};
  if (cfg.contains("curvatures"))
    curvatures = cfg["curvatures"].get<std::vector<double>>();
  std::vector<double> theta0(curvatures.size(), 1.0);
  if (cfg.contains("theta0")) theta0 = cfg["theta0"].get<std::vector<double>>();
  require(theta0.size() == curvatures.size(), ErrorKind::invalid_argument,
          "\"theta0\" and \"curvatures\" must have the same length");

  const auto report = hbf::adam_hbf_equivalence(
      run_length, sched, bench::quadratic_objective(curvatures), args.seed,
      theta0, noise_sigma);
  if (args.csv()) {
    std::ostringstream out;
    out << "max_divergence,steps\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g,%zu\n", report.max_divergence,
                  report.steps);
    out << buf;
    write_file(args.out("adam_hbf.csv"), out.str());
  } else {
    write_file(args.out("adam_hbf.json"),
               json_text({{"max_divergence", report.max_divergence},
                          {"steps", report.steps}}));
  }
  std::printf("max divergence %.3g over %zu steps\n", report.max_divergence,
              report.steps);
  return 0;
}

frechet::FeatureMatrix features_of_path(const std::string& path,
                                        std::uint64_t seed,
                                        std::size_t feature_dim) {
  if (fs::is_directory(path)) {
    const auto imgs = load_images(path);
    require(imgs.size() >= 2, ErrorKind::invalid_argument,
            path + ": need at least 2 images for covariance statistics");
    const frechet::SurrogateExtractor ex(seed, feature_dim);
    return frechet::extract_features(ex, imgs);
  }
  require(fs::is_regular_file(path), ErrorKind::io_error,
          path + " does not exist");
  return frechet::read_features(path);
}

int run_fid(const CommonArgs& args, const std::vector<std::string>& inputs) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg, {"feature_dim"}, "fid");
  const std::size_t feature_dim = size_field(cfg, "feature_dim", 16);
  const auto fa = features_of_path(inputs[0], args.seed, feature_dim);
  const auto fb = features_of_path(inputs[1], args.seed, feature_dim);
  require(fa.dim == fb.dim, ErrorKind::invalid_argument,
          "feature dimensions differ between the two inputs");
  const double d = frechet::fid(frechet::stats_of(fa), frechet::stats_of(fb));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  if (args.csv()) {
    std::printf("fid,%s\n", buf);
    if (args.out_dir != ".")
      write_file(args.out("fid.csv"), std::string("fid\n") + buf + "\n");
  } else {
    const json j = {{"fid", d}};
    std::printf("%s\n", j.dump().c_str());
    if (args.out_dir != ".") write_file(args.out("fid.json"), json_text(j));
  }
  return 0;
}

int run_disturb(const CommonArgs& args, const std::string& kind_name,
                const std::string& input_dir, double level,
                const std::string& foreign_dir) {
  const json cfg = load_config(args.config_path);
  check_keys(cfg, {}, "disturb");
  const disturb::Kind kind = disturb::kind_from_string(kind_name);
  std::vector<std::string> names;
  const std::vector<Image> primary = load_images(input_dir, &names);
  require(!primary.empty(), ErrorKind::invalid_argument,
          input_dir + ": no .pgm/.ppm images found");
  std::vector<Image> foreign;
  if (!foreign_dir.empty()) foreign = load_images(foreign_dir);

  const auto out_imgs =
      disturb::apply_corpus(kind, primary, foreign, level, args.seed);
  fs::create_directories(args.out_dir);
  for (std::size_t i = 0; i < out_imgs.size(); ++i)
    write_pnm(out_imgs[i], (fs::path(args.out_dir) / names[i]).string());
  std::printf("wrote %zu images to %s\n", out_imgs.size(),
              args.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two time-scale optimization toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* saddle = app.add_subcommand("saddle", "saddle-point regime comparison");
  add_common(saddle, args);
  CLI::App* sweep = app.add_subcommand(
      "fid-sweep", "distance monotonicity sweep over disturbance levels");
  add_common(sweep, args);
  CLI::App* rate = app.add_subcommand(
      "rate-check", "Monte-Carlo check of the asymptotic covariance");
  add_common(rate, args);
  CLI::App* adam = app.add_subcommand(
      "adam-hbf", "first-moment equivalence of the two recursions");
  add_common(adam, args);

  CLI::App* fid_cmd = app.add_subcommand(
      "fid", "distance between two feature files or image directories");
  add_common(fid_cmd, args);
  std::vector<std::string> fid_inputs;
  fid_cmd->add_option("inputs", fid_inputs, "FEATV1 files or PGM/PPM directories")
      ->expected(2)
      ->required();

  CLI::App* dist = app.add_subcommand(
      "disturb", "apply one disturbance kind to an image directory");
  add_common(dist, args);
  std::string dist_kind, dist_input, dist_foreign;
  double dist_level = 0.0;
  dist->add_option("kind", dist_kind, "disturbance kind")->required();
  dist->add_option("input", dist_input, "input image directory")->required();
  dist->add_option("--level", dist_level, "disturbance level")->required();
  dist->add_option("--foreign", dist_foreign,
                   "foreign image directory (contamination source)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (saddle->parsed()) return run_saddle(args);
    if (sweep->parsed()) return run_fid_sweep(args);
    if (rate->parsed()) return run_rate_check(args);
    if (adam->parsed()) return run_adam_hbf(args);
    if (fid_cmd->parsed()) return run_fid(args, fid_inputs);
    if (dist->parsed())
      return run_disturb(args, dist_kind, dist_input, dist_level, dist_foreign);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::invalid_argument:
      case ErrorKind::io_error:
      case ErrorKind::insufficient_foreign:
        return 2;
      default:
        return 3;
    }
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
