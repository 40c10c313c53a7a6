// Command line front end: train a behavior image, detect against one,
// analyze per-pixel event statistics, and synthesize test footage.
//
// Exit codes: 0 success, 1 usage or configuration problem, 2 broken or
// inconsistent data.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsub/bsub.hpp"

namespace {

using bsub::Config;

// Settings flow defaults -> --config file -> explicit flags.
struct ParamFlags {
  std::string config_path;
  double tau = 0, rho = 0, a1 = 0, a2 = 0, a3 = 0, theta = 0;
  int window_n = 0, connectivity = 0, w = 0;
  std::string surrogate;

  CLI::Option *o_tau = nullptr, *o_rho = nullptr, *o_a1 = nullptr,
              *o_a2 = nullptr, *o_a3 = nullptr, *o_theta = nullptr,
              *o_n = nullptr, *o_conn = nullptr, *o_w = nullptr,
              *o_surrogate = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path,
                   "settings file ([motion]/[descriptor]/[event]/[detect])");
    o_tau = app.add_option("--tau", tau, "motion threshold on |I - b|");
    o_rho = app.add_option("--rho", rho, "background blend rate in (0,1)");
    o_n = app.add_option("--window-n", window_n,
                         "odd side length of the size descriptor window");
    o_conn = app.add_option("--connectivity", connectivity,
                            "component connectivity, 4 or 8");
    o_w = app.add_option("--w", w, "event window length in frames");
    o_a1 = app.add_option("--a1", a1, "weight of the label sum");
    o_a2 = app.add_option("--a2", a2, "weight of the label transition count");
    o_a3 = app.add_option("--a3", a3, "weight of the size descriptor sum");
    o_theta = app.add_option("--theta", theta,
                             "margin over the learned behavior");
    o_surrogate = app.add_option("--surrogate", surrogate,
                                 "training reduction, max or mean")
                      ->check(CLI::IsMember({"max", "mean"}));
  }

  Config resolve() const {
    Config cfg;
    if (!config_path.empty()) cfg = bsub::load_config(config_path);
    if (o_tau->count()) cfg.tau = tau;
    if (o_rho->count()) cfg.rho = rho;
    if (o_n->count()) cfg.descriptor_window = window_n;
    if (o_conn->count()) {
      if (connectivity != 4 && connectivity != 8)
        throw bsub::ConfigError("connectivity must be 4 or 8, got " +
                                std::to_string(connectivity));
      cfg.connectivity = connectivity == 4 ? bsub::Connectivity::four
                                           : bsub::Connectivity::eight;
    }
    if (o_w->count()) cfg.event.w = w;
    if (o_a1->count()) cfg.event.a1 = a1;
    if (o_a2->count()) cfg.event.a2 = a2;
    if (o_a3->count()) cfg.event.a3 = a3;
    if (o_theta->count()) cfg.theta = theta;
    if (o_surrogate->count())
      cfg.surrogate = surrogate == "max" ? bsub::SurrogateKind::max
                                         : bsub::SurrogateKind::mean;
    bsub::validate(cfg);
    return cfg;
  }
};

std::string frame_name(std::int64_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "anomaly_%06lld.pbm", (long long)t);
  return buf;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw bsub::DataError("cannot create output directory " + dir + ": " +
                          ec.message());
}

std::string stats_line(const bsub::Image<float>& values) {
  float lo = values[0], hi = values[0];
  double sum = 0.0;
  for (auto v : values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
    sum += double(v);
  }
  using bsub::detail::format_double;
  return "min=" + format_double(double(lo)) +
         " mean=" + format_double(sum / double(values.size())) +
         " max=" + format_double(double(hi));
}

// ------------------------------------------------------------
// train
// ------------------------------------------------------------

struct TrainArgs {
  std::string input, output;
  ParamFlags params;
};

int run_train(const TrainArgs& args) {
  const Config cfg = args.params.resolve();
  std::cout << bsub::config_echo(cfg) << "\n";

  auto source = bsub::open_source(args.input);
  bsub::BehaviorImage behavior = bsub::train(*source, cfg);
  bsub::save(behavior, args.output);

  const std::int64_t reduced =
      behavior.meta.frames - behavior.meta.w + 1;
  std::cout << "trained on M=" << behavior.meta.frames << " frames ("
            << source->width() << "x" << source->height() << "), reduced "
            << reduced << " full-window frames with "
            << bsub::to_string(behavior.kind) << "\n"
            << "behavior " << stats_line(behavior.values) << "\n"
            << "wrote " << args.output << "\n";
  return 0;
}

// ------------------------------------------------------------
// detect
// ------------------------------------------------------------

struct DetectArgs {
  std::string input, behavior_path, outdir;
  bool scores = false;
  ParamFlags params;
};

int run_detect(const DetectArgs& args) {
  const Config cfg = args.params.resolve();
  std::cout << bsub::config_echo(cfg) << "\n";

  bsub::BehaviorImage behavior = bsub::load(args.behavior_path);
  const auto diffs = bsub::metadata_mismatches(behavior.meta, cfg);
  if (!diffs.empty()) {
    std::string msg = "behavior image " + args.behavior_path +
                      " was trained under different settings:";
    for (const auto& d : diffs) msg += "\n  " + d;
    throw bsub::DataError(msg);
  }

  auto source = bsub::open_source(args.input);
  if (source->width() != behavior.values.width() ||
      source->height() != behavior.values.height())
    throw bsub::DataError(
        "geometry-mismatch: input is " + std::to_string(source->width()) +
        "x" + std::to_string(source->height()) + ", behavior image is " +
        std::to_string(behavior.values.width()) + "x" +
        std::to_string(behavior.values.height()));

  ensure_directory(args.outdir);
  const auto out = [&args](const std::string& name) {
    return (std::filesystem::path(args.outdir) / name).string();
  };

  std::ofstream csv(out("events.csv"), std::ios::trunc);
  if (!csv) throw bsub::DataError("cannot write " + out("events.csv"));
  csv << "frame,x,y,width,height,area\n";

  std::optional<bsub::F32MapWriter> score_writer;
  if (args.scores)
    score_writer.emplace(out("scores.f32"), source->width(), source->height());

  bsub::Pipeline pipeline(source->width(), source->height(), cfg);
  std::int64_t warm_frames = 0, anomalous_pixels = 0, regions = 0;
  for (std::size_t t = 0; t < source->count(); ++t) {
    const bsub::FrameAnalysis fa = pipeline.process(source->frame(t));
    if (!fa.warm) continue;  // the window has not filled yet
    ++warm_frames;
    const bsub::AnomalyMap map = bsub::subtract(fa.events, behavior, cfg.theta);
    bsub::write_pbm(out(frame_name(map.t)), map.mask);
    if (score_writer) score_writer->append(map.scores);
    const bsub::DetectionSummary summary =
        bsub::summarize(map, cfg.connectivity);
    anomalous_pixels += summary.anomalous_pixels;
    regions += std::int64_t(summary.boxes.size());
    for (const auto& box : summary.boxes)
      csv << map.t << ',' << box.x << ',' << box.y << ',' << box.width << ','
          << box.height << ',' << box.area << '\n';
  }
  if (!csv) throw bsub::DataError("short write to " + out("events.csv"));

  std::cout << "checked " << source->count() << " frames, scored "
            << warm_frames << " after warm-up\n"
            << "anomalous pixels=" << anomalous_pixels
            << " regions=" << regions << "\n"
            << "wrote " << out("anomaly_******.pbm") << ", "
            << out("events.csv")
            << (args.scores ? ", " + out("scores.f32") : "") << "\n";
  return 0;
}

// ------------------------------------------------------------
// analyze
// ------------------------------------------------------------

struct AnalyzeArgs {
  std::string input, outdir;
  std::vector<std::string> pixels;
  int bins = 32;
  ParamFlags params;
};

std::pair<int, int> parse_pixel(const std::string& spec) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos)
    throw bsub::ConfigError("--pixel expects X,Y, got '" + spec + "'");
  return {int(bsub::detail::parse_int(spec.substr(0, comma), "--pixel")),
          int(bsub::detail::parse_int(spec.substr(comma + 1), "--pixel"))};
}

int run_analyze(const AnalyzeArgs& args) {
  const Config cfg = args.params.resolve();
  std::cout << bsub::config_echo(cfg) << "\n";
  if (args.bins < 1) throw bsub::ConfigError("--bins must be >= 1");

  auto source = bsub::open_source(args.input);
  std::vector<std::pair<int, int>> pixels;
  for (const auto& spec : args.pixels) {
    const auto [x, y] = parse_pixel(spec);
    if (x < 0 || x >= source->width() || y < 0 || y >= source->height())
      throw bsub::ConfigError("--pixel " + spec + " outside " +
                              std::to_string(source->width()) + "x" +
                              std::to_string(source->height()) + " input");
    pixels.emplace_back(x, y);
  }

  ensure_directory(args.outdir);

  bsub::Pipeline pipeline(source->width(), source->height(), cfg);
  std::vector<std::vector<std::uint8_t>> label_seq(pixels.size());
  std::vector<std::vector<double>> event_seq(pixels.size());
  for (std::size_t t = 0; t < source->count(); ++t) {
    const bsub::FrameAnalysis fa = pipeline.process(source->frame(t));
    for (std::size_t k = 0; k < pixels.size(); ++k) {
      const auto [x, y] = pixels[k];
      label_seq[k].push_back(fa.labels(x, y));
      if (fa.warm) event_seq[k].push_back(double(fa.events(x, y)));
    }
  }
  if (event_seq.empty() || event_seq[0].empty())
    throw bsub::DataError("no full-window frames: input has " +
                          std::to_string(source->count()) +
                          " frames, event window needs " +
                          std::to_string(cfg.event.w));

  for (std::size_t k = 0; k < pixels.size(); ++k) {
    const auto [x, y] = pixels[k];
    bsub::EventHistogram hist(0.0, 1.0, args.bins);
    hist.add(event_seq[k]);
    const std::string name =
        "hist_" + std::to_string(x) + "_" + std::to_string(y) + ".csv";
    const std::string path =
        (std::filesystem::path(args.outdir) / name).string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw bsub::DataError("cannot write " + path);
    hist.write_csv(out);

    const bsub::ChainParams chain = bsub::fit_chain(label_seq[k]);
    double e_max = 0.0;
    std::int64_t busy = 0;
    for (double e : event_seq[k])
      if (e > e_max) e_max = e;
    for (auto l : label_seq[k]) busy += l ? 1 : 0;
    using bsub::detail::format_double;
    std::cout << "pixel (" << x << "," << y << "): pi=" << format_double(chain.pi)
              << " q=" << format_double(chain.q)
              << " p=" << format_double(chain.p) << " busy=" << busy << "/"
              << label_seq[k].size() << " e_max=" << format_double(e_max)
              << " -> " << name << "\n";
  }
  return 0;
}

// ------------------------------------------------------------
// synth
// ------------------------------------------------------------

struct SynthArgs {
  std::string script_path, outdir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int run_synth(const SynthArgs& args) {
  const auto bytes = bsub::read_file(args.script_path);
  bsub::SceneScript script = bsub::parse_script(
      std::string(bytes.begin(), bytes.end()), args.script_path);
  if (args.seed_set) script.seed = args.seed;

  ensure_directory(args.outdir);
  const auto out = [&args](const std::string& name) {
    return (std::filesystem::path(args.outdir) / name).string();
  };

  bsub::SyntheticSource source(script);
  bsub::RawGray8Writer frames(out("frames.raw"), script.width, script.height);
  bsub::RawGray8Writer masks(out("masks.raw"), script.width, script.height);
  for (std::size_t t = 0; t < source.count(); ++t) {
    const bsub::RenderedFrame rf = source.render(t);
    frames.append(rf.frame);
    bsub::Frame visible(script.width, script.height);
    for (std::size_t i = 0; i < visible.size(); ++i)
      visible[i] = rf.mask[i] ? 255 : 0;
    masks.append(visible);
  }
  std::cout << "wrote " << source.count() << " frames (" << script.width << "x"
            << script.height << ", seed " << script.seed << ") to "
            << out("frames.raw") << "\n"
            << "anomaly masks in " << out("masks.raw") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"behavior subtraction video analytics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bsub 1.0.0");

  TrainArgs train_args;
  auto* train = app.add_subcommand(
      "train", "learn a behavior image from background footage");
  train->add_option("input", train_args.input,
                    "raw-gray8 file or directory of stills")
      ->required();
  train->add_option("-o,--output", train_args.output, "behavior image to write")
      ->required();
  train_args.params.attach(*train);

  DetectArgs detect_args;
  auto* detect = app.add_subcommand(
      "detect", "flag activity above a trained behavior image");
  detect->add_option("input", detect_args.input,
                     "raw-gray8 file or directory of stills")
      ->required();
  detect->add_option("-b,--behavior", detect_args.behavior_path,
                     "trained behavior image")
      ->required();
  detect->add_option("-o,--outdir", detect_args.outdir,
                     "directory for anomaly maps and events.csv")
      ->required();
  detect->add_flag("--scores", detect_args.scores,
                   "also write raw e-B planes to scores.f32");
  detect_args.params.attach(*detect);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand(
      "analyze", "per-pixel event histograms and label chain fits");
  analyze->add_option("input", analyze_args.input,
                      "raw-gray8 file or directory of stills")
      ->required();
  analyze->add_option("-p,--pixel", analyze_args.pixels,
                      "pixel to analyze as X,Y (repeatable)")
      ->required();
  analyze->add_option("-o,--outdir", analyze_args.outdir,
                      "directory for histogram CSVs")
      ->required();
  analyze->add_option("--bins", analyze_args.bins, "histogram bins over [0,1]")
      ->capture_default_str();
  analyze_args.params.attach(*analyze);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "render a scripted scene to raw-gray8 footage plus masks");
  synth->add_option("script", synth_args.script_path, "scene script file")
      ->required();
  synth->add_option("-o,--outdir", synth_args.outdir,
                    "directory for frames.raw and masks.raw")
      ->required();
  auto* seed_opt =
      synth->add_option("--seed", synth_args.seed, "override the script seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) return run_train(train_args);
    if (detect->parsed()) return run_detect(detect_args);
    if (analyze->parsed()) {
      return run_analyze(analyze_args);
    }
    synth_args.seed_set = seed_opt->count() > 0;
    return run_synth(synth_args);
  } catch (const bsub::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const bsub::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
