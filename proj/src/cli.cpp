#include "featurenull/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "featurenull/cluster.hpp"
#include "featurenull/corpus.hpp"
#include "featurenull/density.hpp"
#include "featurenull/error.hpp"
#include "featurenull/image.hpp"
#include "featurenull/orb.hpp"
#include "featurenull/parallel.hpp"
#include "featurenull/probmap.hpp"
#include "featurenull/reduce.hpp"
#include "featurenull/stats.hpp"

namespace featurenull::cli {

namespace fs = std::filesystem;

namespace {

/// Thrown for argument problems the parser cannot catch on its own.
struct UsageError : Error {
  using Error::Error;
};

std::string format_double(double v, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::int64_t build_timestamp() {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return std::stoll(env);
    } catch (const std::exception&) {
    }
  }
  return 0;
}

orb::OrbParams orb_params(const RunConfig& cfg) {
  orb::OrbParams p;
  p.n_levels = cfg.pyramid_levels;
  p.scale_factor = cfg.scale_factor;
  p.fast_threshold = cfg.fast_threshold;
  return p;
}

void add_orb_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--levels", cfg.pyramid_levels, "Pyramid levels")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  cmd->add_option("--scale", cfg.scale_factor, "Pyramid scale factor (> 1)")
      ->check(CLI::Range(1.0000001, 16.0))
      ->capture_default_str();
  cmd->add_option("--fast-threshold", cfg.fast_threshold, "FAST intensity threshold")
      ->check(CLI::Range(1, 255))
      ->capture_default_str();
  cmd->add_option("--max-keypoints", cfg.max_keypoints, "Keypoints kept per image")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

struct ScoreFlags {
  int stride = 3;
  bool auto_mask = false;
};

void add_score_flags(CLI::App* cmd, ScoreFlags& flags) {
  cmd->add_option("--stride", flags.stride, "Grid sample distance in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--auto-mask", flags.auto_mask,
                "Mask pure-black regions of at least 64 connected pixels");
}

probmap::ProbabilityMap score_image(const density::DensityModel& model, const GrayImage& img,
                                    const ScoreFlags& flags, unsigned threads) {
  probmap::ScoreOptions options;
  options.stride = flags.stride;
  options.threads = threads;
  if (flags.auto_mask) options.mask = probmap::auto_mask(img);
  return probmap::score_grid(model, img, options);
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':', text.empty() ? 0 : 1);
  if (colon == std::string::npos) throw UsageError("--range expects lo:hi, got '" + text + "'");
  double lo = 0.0, hi = 0.0;
  try {
    std::size_t used = 0;
    lo = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("lo");
    const std::string rest = text.substr(colon + 1);
    hi = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("hi");
  } catch (const std::exception&) {
    throw UsageError("--range expects numeric lo:hi, got '" + text + "'");
  }
  if (!(lo < hi)) throw UsageError("--range needs lo < hi, got '" + text + "'");
  return {lo, hi};
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string corpus;
  std::string model_out;
  std::string weights_csv;
  std::string manifest_out;
  std::string features_out;
  int max_iter = 100;
  double tol = 1e-4;
};

int cmd_train(const TrainArgs& args, const RunConfig& cfg, unsigned threads, std::ostream& out,
              std::ostream& err) {
  if (!(cfg.sample_fraction > 0.0 && cfg.sample_fraction <= 1.0))
    throw UsageError("--sample-fraction must be in (0, 1]");
  if (cfg.clusters < 1) throw UsageError("--clusters must be at least 1");

  const orb::OrbParams params = orb_params(cfg);
  const orb::BriefPattern pattern = orb::BriefPattern::generate(params.patch_radius);
  corpus::ScanOptions scan;
  scan.max_keypoints = cfg.max_keypoints;
  scan.orb = params;
  scan.threads = threads;
  const corpus::ScanResult extracted = corpus::extract_corpus(args.corpus, pattern, scan);
  if (!args.manifest_out.empty()) corpus::write_manifest(args.manifest_out, extracted.manifest);

  const corpus::FeatureStore sampled =
      corpus::sample_features(extracted.features, cfg.sample_fraction, cfg.seed);
  if (!args.features_out.empty()) corpus::write_feature_store(args.features_out, sampled);

  std::vector<ReducedVec> data;
  data.reserve(sampled.count());
  for (const corpus::FeatureRecord& r : sampled.records) data.push_back(r.reduced);

  const auto k = static_cast<std::size_t>(cfg.clusters);
  const std::size_t distinct = cluster::count_distinct(data);
  if (distinct < k) {
    err << "error: requested " << k << " clusters but the sampled corpus has only " << distinct
        << " distinct feature vectors (" << data.size()
        << " features); choose --clusters <= " << distinct << '\n';
    return kUsage;
  }

  cluster::LloydOptions lloyd;
  lloyd.max_iter = args.max_iter;
  lloyd.tol = args.tol;
  lloyd.threads = threads;
  const cluster::Clustering clustering =
      cluster::lloyd(data, cluster::kmeans_pp_seed(data, k, cfg.seed), lloyd);

  density::FitOptions fit_options;
  fit_options.created = build_timestamp();
  const density::DensityModel model =
      density::fit(data, clustering, pattern, params, fit_options);
  density::save_model(model, args.model_out);

  const std::string weights =
      args.weights_csv.empty() ? args.model_out + ".weights.csv" : args.weights_csv;
  density::write_weights_csv(weights, model);

  out << "images=" << extracted.manifest.total_images << '\n';
  out << "skipped=" << extracted.skipped.size() << '\n';
  out << "N=" << data.size() << '\n';
  out << "K=" << model.k() << '\n';
  out << "iterations=" << clustering.iterations << '\n';
  out << "inertia=" << format_double(clustering.inertia) << '\n';
  out << "model=" << args.model_out << '\n';
  out << "weights_csv=" << weights << '\n';
  return kOk;
}

int cmd_score(const std::string& model_path, const std::string& image_path,
              const std::string& per_point, const ScoreFlags& flags, unsigned threads,
              std::ostream& out) {
  const density::DensityModel model = density::load_model(model_path);
  const GrayImage img = load_grayscale(image_path);
  const probmap::ProbabilityMap map = score_image(model, img, flags, threads);
  if (!per_point.empty()) probmap::write_grid_csv(per_point, map);
  out << "mean_ln_p=" << format_double(probmap::mean_log_prob(map), "%.17g") << '\n';
  return kOk;
}

struct HeatmapArgs {
  std::string model;
  std::string image;
  std::string out_png;
  std::string range;
  std::string csv;
  std::string raw;
  bool overlay = false;
};

int cmd_heatmap(const HeatmapArgs& args, const ScoreFlags& flags, unsigned threads,
                std::ostream& out) {
  std::optional<std::pair<double, double>> range;
  if (!args.range.empty()) range = parse_range(args.range);
  const density::DensityModel model = density::load_model(args.model);
  const GrayImage img = load_grayscale(args.image);
  const probmap::ProbabilityMap map =
      probmap::interpolate(score_image(model, img, flags, threads));
  const auto [lo, hi] = range ? *range : probmap::default_range(map);
  write_png(args.out_png, probmap::render_heatmap(map, lo, hi, args.overlay ? &img : nullptr));
  if (!args.csv.empty()) probmap::write_grid_csv(args.csv, map);
  if (!args.raw.empty()) probmap::write_grid_raw(args.raw, map);
  out << "range=" << format_double(lo) << ':' << format_double(hi) << '\n';
  out << "mean_ln_p=" << format_double(probmap::mean_log_prob(map), "%.17g") << '\n';
  out << "heatmap=" << args.out_png << '\n';
  return kOk;
}

int cmd_compare(const std::string& model_path, const std::vector<std::string>& groups,
                const std::string& out_csv, const ScoreFlags& flags, unsigned threads,
                std::ostream& out, std::ostream& err) {
  if (groups.size() < 2) throw UsageError("compare needs at least two group directories");
  const density::DensityModel model = density::load_model(model_path);

  struct Group {
    std::string name;
    std::vector<double> means;
  };
  std::vector<Group> scored;
  for (const std::string& dir : groups) {
    Group g;
    g.name = fs::path(dir).lexically_normal().filename().string();
    if (g.name.empty()) g.name = fs::path(dir).lexically_normal().parent_path().filename().string();
    for (const fs::path& file : corpus::list_files(dir)) {
      try {
        const GrayImage img = load_grayscale(file);
        g.means.push_back(probmap::mean_log_prob(score_image(model, img, flags, threads)));
      } catch (const DecodeError&) {
        err << "warning: skipping undecodable file " << file.generic_string() << '\n';
      } catch (const DataError& e) {
        err << "warning: skipping " << file.generic_string() << ": " << e.what() << '\n';
      }
    }
    if (g.means.size() < 2)
      throw UsageError("group " + dir + " has fewer than 2 scorable images");
    scored.push_back(std::move(g));
  }

  std::ostream& human = out_csv.empty() ? err : out;
  for (const Group& g : scored)
    human << "group " << g.name << " n=" << g.means.size()
          << " mean_ln_p=" << format_double(stats::mean(g.means)) << '\n';

  const std::size_t n = scored.size();
  std::vector<double> p(n * n, 1.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const stats::TestResult r = stats::welch_t_test(scored[a].means, scored[b].means);
      p[a * n + b] = p[b * n + a] = r.p_value;
      human << "welch " << scored[a].name << " vs " << scored[b].name
            << " t=" << format_double(r.statistic) << " dof=" << format_double(r.dof)
            << " p=" << format_double(r.p_value) << '\n';
    }
  }

  std::ostringstream csv;
  csv << "group";
  for (const Group& g : scored) csv << ',' << g.name;
  csv << '\n';
  for (std::size_t a = 0; a < n; ++a) {
    csv << scored[a].name;
    for (std::size_t b = 0; b < n; ++b) csv << ',' << format_double(p[a * n + b], "%.17g");
    csv << '\n';
  }
  if (out_csv.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(out_csv);
    if (!file || !(file << csv.str())) throw Error("cannot write " + out_csv);
  }
  return kOk;
}

int cmd_validate_reduction(std::int64_t pairs, int dmax, std::uint64_t seed,
                           const std::string& csv, unsigned threads, std::ostream& out) {
  if (pairs < 100) throw UsageError("--pairs must be at least 100");
  if (dmax < 1 || dmax > 256) throw UsageError("--dmax must be in [1, 256]");
  const reduce::CorrelationReport report = reduce::correlation_experiment(pairs, dmax, seed, threads);
  if (!csv.empty()) reduce::write_distance_csv(csv, report);
  out << "pairs_per_distance=" << pairs << '\n';
  out << "d_max=" << dmax << '\n';
  out << "rho=" << format_double(report.rho) << '\n';
  out << "p=" << format_double(report.p_value) << '\n';
  return kOk;
}

int cmd_inspect(const std::string& model_path, const std::string& weights_csv, std::ostream& out) {
  const density::DensityModel model = density::load_model(model_path);
  double total = 0.0, lo = 1.0, hi = 0.0;
  for (double lw : model.log_weights) {
    const double w = std::exp(lw);
    total += w;
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  out << "version=" << model.meta.version << '\n';
  out << "K=" << model.k() << '\n';
  out << "N=" << model.meta.n << '\n';
  out << "created=" << model.meta.created << '\n';
  out << "pyramid_levels=" << model.orb.n_levels << '\n';
  out << "scale_factor=" << format_double(model.orb.scale_factor) << '\n';
  out << "patch_radius=" << model.orb.patch_radius << '\n';
  out << "weight_sum=" << format_double(total, "%.15g") << '\n';
  out << "weight_min=" << format_double(lo) << '\n';
  out << "weight_max=" << format_double(hi) << '\n';
  if (!weights_csv.empty()) density::write_weights_csv(weights_csv, model);
  return kOk;
}

int cmd_keypoints(const std::string& image_path, const std::string& csv_path, const RunConfig& cfg,
                  std::ostream& out) {
  const orb::OrbParams params = orb_params(cfg);
  const GrayImage img = load_grayscale(image_path);
  const auto features = orb::top_keypoints(
      img, cfg.max_keypoints, orb::BriefPattern::generate(params.patch_radius), params);

  std::ofstream file;
  if (!csv_path.empty()) {
    file.open(csv_path);
    if (!file) throw Error("cannot write " + csv_path);
  }
  std::ostream& dest = csv_path.empty() ? out : file;
  dest << "x,y,angle,response,level,descriptor\n";
  char line[160];
  for (const orb::Feature& f : features) {
    std::snprintf(line, sizeof line, "%.6f,%.6f,%.9f,%.17g,%d,", f.keypoint.x, f.keypoint.y,
                  f.keypoint.angle, f.keypoint.response, f.keypoint.level);
    dest << line << f.descriptor.hex() << '\n';
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Null model of scientific-image ORB features: train, score, map, compare."};
  app.name("featurenull");
  app.require_subcommand(1);

  RunConfig cfg;
  unsigned threads = default_threads();
  auto add_threads = [&](CLI::App* cmd) {
    cmd->add_option("--threads", threads, "Worker threads (env FEATURENULL_THREADS)")
        ->check(CLI::PositiveNumber);
  };

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit a null model to an image corpus");
  train_cmd->add_option("corpus", train.corpus, "Corpus root directory")->required();
  train_cmd->add_option("-o,--model", train.model_out, "Model file to write")->required();
  train_cmd->add_option("--clusters,-k", cfg.clusters, "Number of k-means clusters")
      ->capture_default_str();
  train_cmd->add_option("--sample-fraction", cfg.sample_fraction, "Fraction of features clustered")
      ->capture_default_str();
  train_cmd->add_option("--seed", cfg.seed, "Sampling and seeding RNG seed")->capture_default_str();
  train_cmd->add_option("--max-iter", train.max_iter, "Lloyd iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--tol", train.tol, "Stop when centroids move less than this")
      ->capture_default_str();
  train_cmd->add_option("--weights-csv", train.weights_csv,
                        "Cluster weight CSV (default <model>.weights.csv)");
  train_cmd->add_option("--manifest", train.manifest_out, "Write the corpus manifest (JSON Lines)");
  train_cmd->add_option("--features", train.features_out, "Write the sampled feature store");
  add_orb_flags(train_cmd, cfg);
  add_threads(train_cmd);

  std::string model_path, image_path, per_point;
  ScoreFlags score_flags;
  auto* score_cmd = app.add_subcommand("score", "Mean log probability of an image");
  score_cmd->add_option("model", model_path, "Model file")->required();
  score_cmd->add_option("image", image_path, "Image file")->required();
  score_cmd->add_option("--per-point", per_point, "Write grid samples as CSV (x,y,ln_p)");
  add_score_flags(score_cmd, score_flags);
  add_threads(score_cmd);

  HeatmapArgs heat;
  auto* heat_cmd = app.add_subcommand("heatmap", "Render a probability map as PNG");
  heat_cmd->add_option("model", heat.model, "Model file")->required();
  heat_cmd->add_option("image", heat.image, "Image file")->required();
  heat_cmd->add_option("out", heat.out_png, "Output PNG")->required();
  heat_cmd->add_option("--range", heat.range, "Colour range lo:hi (default p5:p95)");
  heat_cmd->add_flag("--overlay", heat.overlay, "Blend over the source image at 0.6 opacity");
  heat_cmd->add_option("--csv", heat.csv, "Write grid samples as CSV");
  heat_cmd->add_option("--raw", heat.raw, "Write grid as float64 with a JSON sidecar");
  add_score_flags(heat_cmd, score_flags);
  add_threads(heat_cmd);

  std::vector<std::string> group_dirs;
  std::string compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Welch t-tests between image groups");
  compare_cmd->add_option("model", model_path, "Model file")->required();
  compare_cmd->add_option("groups", group_dirs, "Group directories (at least two)")->required();
  compare_cmd->add_option("--out", compare_out, "Write the p-value matrix CSV here");
  add_score_flags(compare_cmd, score_flags);
  add_threads(compare_cmd);

  std::int64_t pairs = 20000;
  int dmax = 30;
  std::string reduction_csv;
  auto* validate_cmd =
      app.add_subcommand("validate-reduction", "Hamming vs reduced-distance correlation");
  validate_cmd->add_option("--pairs", pairs, "Pairs per hamming distance")->capture_default_str();
  validate_cmd->add_option("--dmax", dmax, "Largest hamming distance")->capture_default_str();
  validate_cmd->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  validate_cmd->add_option("--csv", reduction_csv, "Per-distance CSV output");
  add_threads(validate_cmd);

  std::string inspect_csv;
  auto* inspect_cmd = app.add_subcommand("inspect", "Summarise a model file");
  inspect_cmd->add_option("model", model_path, "Model file")->required();
  inspect_cmd->add_option("--weights-csv", inspect_csv, "Write cluster weights as CSV");

  std::string keypoint_csv;
  auto* kp_cmd = app.add_subcommand("keypoints", "Dump ORB keypoints of an image as CSV");
  kp_cmd->add_option("image", image_path, "Image file")->required();
  kp_cmd->add_option("-o,--out", keypoint_csv, "CSV output (default stdout)");
  add_orb_flags(kp_cmd, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train, cfg, threads, out, err);
    if (*score_cmd) return cmd_score(model_path, image_path, per_point, score_flags, threads, out);
    if (*heat_cmd) return cmd_heatmap(heat, score_flags, threads, out);
    if (*compare_cmd)
      return cmd_compare(model_path, group_dirs, compare_out, score_flags, threads, out, err);
    if (*validate_cmd)
      return cmd_validate_reduction(pairs, dmax, cfg.seed, reduction_csv, threads, out);
    if (*inspect_cmd) return cmd_inspect(model_path, inspect_csv, out);
    if (*kp_cmd) return cmd_keypoints(image_path, keypoint_csv, cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == FormatError::Kind::Io ? kDataError : kCorruptModel;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace featurenull::cli
