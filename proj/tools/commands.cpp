#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "pcfit/evolve.hpp"
#include "pcfit/image_io.hpp"
#include "pcfit/imaging.hpp"
#include "pcfit/synthesis.hpp"

namespace pcfit::cli {

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string_view piece = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (piece.empty()) throw ConfigError("empty entry in seed list '" + std::string(text) + "'");
    if (const auto dash = piece.find('-'); dash != std::string_view::npos) {
      const std::uint64_t lo = parse_uint(piece.substr(0, dash), "seeds");
      const std::uint64_t hi = parse_uint(piece.substr(dash + 1), "seeds");
      if (hi < lo) throw ConfigError("descending seed range '" + std::string(piece) + "'");
      for (std::uint64_t s = lo;; ++s) {
        seeds.push_back(s);
        if (s == hi) break;
      }
    } else {
      seeds.push_back(parse_uint(piece, "seeds"));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return seeds;
}

std::vector<std::string> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DecodeError("cannot open manifest " + path.string());
  std::vector<std::string> images;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (!body.empty()) images.emplace_back(body);
  }
  if (images.empty()) throw ConfigError("manifest " + path.string() + " lists no images");
  return images;
}

KeyValues layered_config(const std::string& config_path, const std::vector<std::string>& overrides) {
  KeyValues kv;
  if (!config_path.empty()) kv = load_key_values(config_path);
  std::string flags;
  for (const auto& o : overrides) flags += o + "\n";
  return merge(kv, parse_key_values(flags, "--set"));
}

namespace {

struct LoadedImage {
  LabeledImage labels;
  RgbImage raster;  ///< what overlays are drawn on
};

LoadedImage load_image(const std::filesystem::path& path, const ClassPalette& palette) {
  const Bytes data = read_file(path);
  if (data.size() >= 2 && data[0] == 'P' && data[1] == '5') {
    LabeledImage labels = decode_class_map(data);
    RgbImage raster = render_labels(labels, palette);
    return {std::move(labels), std::move(raster)};
  }
  RgbImage raster = looks_like_png(data) ? decode_png(data) : decode_ppm(data);
  LabeledImage labels = decode_label_image(raster, palette);
  return {std::move(labels), std::move(raster)};
}

/// Settings resolved against the actual image size.
Settings settings_for(const KeyValues& kv, const LabeledImage& image) {
  return resolve_settings(kv, image.width(), image.height());
}

bool objective_is_flat(const LabeledImage& image) {
  const ClassCounts& t = image.class_totals();
  return t[PixelClass::Red] + t[PixelClass::Green] + t[PixelClass::Grey] + t[PixelClass::Black] == 0;
}

FitResult checked_fit(const LabeledImage& image, const Settings& s) {
  const FitResult fit = run_ga(image, s.weights, s.ga);
  const std::int64_t expected = s.ga.population_size +
                                static_cast<std::int64_t>(s.ga.children_per_generation) * fit.generations_run;
  if (fit.evaluations != expected) throw InvariantError("evaluation count does not match generations run");
  if (!s.ga.ranges.contains(fit.best.params)) throw InvariantError("best individual lies outside the search box");
  if (fit.best.fitness != fitness_naive(image, s.weights, fit.best.params)) {
    throw InvariantError("scanline fitness disagrees with the per-pixel oracle");
  }
  return fit;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file(path, Bytes(text.begin(), text.end()));
}

std::string summary_line(const RunRecord& r) {
  std::ostringstream s;
  s << r.image << " seed " << r.seed << ": theta=" << format_fixed(r.params.theta, 2)
    << " xc=" << format_fixed(r.params.x_c, 2) << " yc=" << format_fixed(r.params.y_c, 2)
    << " a=" << format_fixed(r.params.a, 2) << " b=" << format_fixed(r.params.b, 2)
    << " fitness=" << format_double(r.fitness) << " PR=" << format_fixed(r.metrics.pr, 2)
    << " GF=" << format_fixed(r.metrics.gf, 2) << " generations=" << r.generations
    << " evaluations=" << r.evaluations << " time=" << format_fixed(r.time_s, 3) << "s";
  return s.str();
}

struct CommonOptions {
  std::string config;
  std::vector<std::string> set;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key=value config file")->check(CLI::ExistingFile);
    app->add_option("--set", set, "override one setting, key=value (repeatable)");
  }
};

}  // namespace

BatchOutcome run_batch(const std::vector<std::string>& images, const std::filesystem::path& base_dir,
                       const KeyValues& kv, const std::vector<std::uint64_t>& seeds, int jobs) {
  if (seeds.empty()) throw ConfigError("batch mode needs at least one seed");
  const Settings defaults = resolve_settings(kv);

  struct Slot {
    std::optional<LabeledImage> image;
    std::optional<Settings> settings;
    std::string error;
  };
  std::vector<Slot> slots(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::filesystem::path p(images[i]);
    if (p.is_relative()) p = base_dir / p;
    try {
      slots[i].image = load_image(p, defaults.palette).labels;
      slots[i].settings = settings_for(kv, *slots[i].image);
      check_ranges_against_image(slots[i].settings->ga.ranges, *slots[i].image);
    } catch (const Error& e) {
      slots[i].image.reset();
      slots[i].error = e.what();
    }
  }

  const std::size_t total = images.size() * seeds.size();
  std::vector<std::optional<RunRecord>> results(total);
  std::vector<std::string> failures(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      const Slot& slot = slots[k / seeds.size()];
      if (!slot.image) continue;
      Settings s = *slot.settings;
      s.ga.seed = seeds[k % seeds.size()];
      try {
        results[k] = make_record(images[k / seeds.size()], s.ga.seed, s.summary(), checked_fit(*slot.image, s));
      } catch (const InvariantError&) {
        throw;
      } catch (const Error& e) {
        failures[k] = e.what();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, total)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          worker();
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  BatchOutcome outcome;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!slots[i].image) outcome.skipped.push_back(images[i] + ": " + slots[i].error);
  }
  for (std::size_t k = 0; k < total; ++k) {
    if (results[k]) {
      outcome.records.push_back(std::move(*results[k]));
    } else if (!failures[k].empty()) {
      outcome.skipped.push_back(images[k / seeds.size()] + " seed " + std::to_string(seeds[k % seeds.size()]) + ": " +
                                failures[k]);
    }
  }
  return outcome;
}

namespace {

int cmd_fit(const std::string& image_path, const CommonOptions& common, std::optional<std::uint64_t> seed,
            std::optional<int> generations, const std::string& overlay_path, const std::string& csv_path,
            std::ostream& out, std::ostream& err) {
  KeyValues kv = layered_config(common.config, common.set);
  if (seed) kv["seed"] = std::to_string(*seed);
  if (generations) kv["generations"] = std::to_string(*generations);
  const LoadedImage img = load_image(image_path, resolve_settings(kv).palette);
  const Settings s = settings_for(kv, img.labels);
  if (objective_is_flat(img.labels)) {
    err << "warning: " << image_path << " has no Red, Green, Grey or Black pixels; the objective is flat\n";
  }
  const FitResult fit = checked_fit(img.labels, s);
  const RunRecord rec = make_record(image_path, s.ga.seed, s.summary(), fit);

  const std::string csv = std::string(kCsvHeader) + "\n" + csv_row(rec) + "\n";
  if (!overlay_path.empty()) save_png(overlay_path, render_overlay(img.raster, fit.best.params, s.outline));
  if (csv_path.empty()) {
    out << csv;
  } else {
    write_text(csv_path, csv);
  }
  err << summary_line(rec) << "\n";
  return kExitOk;
}

int cmd_batch(const std::string& manifest, const CommonOptions& common, const std::string& seeds_text,
              std::optional<int> jobs, const std::string& csv_path, std::ostream& out, std::ostream& err) {
  const KeyValues kv = layered_config(common.config, common.set);
  std::string seed_spec = seeds_text;
  if (seed_spec.empty()) {
    const auto it = kv.find("seeds");
    if (it == kv.end()) throw ConfigError("batch mode requires --seeds (or the seeds key)");
    seed_spec = it->second;
  }
  const std::vector<std::uint64_t> seeds = parse_seed_list(seed_spec);
  int job_count = 1;
  if (jobs) {
    job_count = *jobs;
  } else if (const auto it = kv.find("jobs"); it != kv.end()) {
    job_count = static_cast<int>(parse_int(it->second, "jobs"));
  }
  if (job_count < 1) throw ConfigError("jobs must be >= 1");

  const std::vector<std::string> images = read_manifest(manifest);
  const BatchOutcome outcome =
      run_batch(images, std::filesystem::path(manifest).parent_path(), kv, seeds, job_count);

  std::ostringstream csv;
  write_csv(csv, outcome.records);
  const std::string table = format_report(aggregate(outcome.records));
  if (csv_path.empty()) {
    out << csv.str();
    err << table;
  } else {
    write_text(csv_path, csv.str());
    out << table;
  }
  for (const auto& s : outcome.skipped) err << "skipped " << s << "\n";
  if (!outcome.skipped.empty()) {
    err << outcome.skipped.size() << " image/seed entries skipped, " << outcome.records.size() << " runs recorded\n";
  }
  return outcome.records.empty() ? kExitInput : kExitOk;
}

int cmd_synth(const std::string& out_path, const CommonOptions& common, std::string params_path,
              const std::string& class_map_path, std::ostream& err) {
  const KeyValues kv = layered_config(common.config, common.set);
  const Settings s = resolve_settings(kv);
  const Phantom ph = generate_phantom(s.phantom);
  if (params_path.empty()) params_path = out_path + ".params";
  save_png(out_path, render_labels(ph.image, s.palette));
  write_text(params_path, format_params(ph.planted));
  if (!class_map_path.empty()) save_class_map(class_map_path, ph.image);
  err << "wrote " << out_path << " (" << ph.image.width() << "x" << ph.image.height() << ") and " << params_path << "\n";
  return kExitOk;
}

int cmd_oracle(const std::string& image_path, const CommonOptions& common, std::ostream& out, std::ostream& err) {
  const KeyValues kv = layered_config(common.config, common.set);
  const LoadedImage img = load_image(image_path, resolve_settings(kv).palette);
  const Settings s = settings_for(kv, img.labels);
  s.grid.validate();
  err << "evaluating " << format_fixed(s.grid.cardinality(), 0) << " grid points\n";
  const GridResult r = grid_search(img.labels, s.weights, s.grid);
  out << format_params(r.params) << "fitness=" << format_double(r.fitness) << "\nevaluated=" << r.evaluated << "\n";
  return kExitOk;
}

struct OverlayParams {
  std::string file;
  std::optional<double> theta, xc, yc, a, b;
};

int cmd_overlay(const std::string& image_path, const CommonOptions& common, const OverlayParams& op,
                const std::string& out_path, std::ostream& err) {
  const KeyValues kv = layered_config(common.config, common.set);
  const Settings s = resolve_settings(kv);
  EllipseParams p;
  if (!op.file.empty()) {
    const Bytes text = read_file(op.file);
    p = parse_params(std::string(text.begin(), text.end()));
  } else {
    if (!op.theta || !op.xc || !op.yc || !op.a || !op.b) {
      throw ConfigError("overlay needs --params FILE or all of --theta --xc --yc --a --b");
    }
    p = validated(EllipseParams{*op.theta, *op.xc, *op.yc, *op.a, *op.b});
  }
  const LoadedImage img = load_image(image_path, s.palette);
  save_png(out_path, render_overlay(img.raster, p, s.outline));
  err << "wrote " << out_path << "\n";
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& csv_paths, std::ostream& out) {
  std::vector<RunRecord> all;
  for (const auto& path : csv_paths) {
    std::ifstream in(path);
    if (!in) throw DecodeError("cannot open " + path);
    auto records = read_csv(in);
    all.insert(all.end(), records.begin(), records.end());
  }
  out << format_report(aggregate(all));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit a rotated ellipse to class-labeled raster images with a steady-state genetic algorithm."};
  app.name("pcfit");
  app.require_subcommand(1);

  std::function<int()> action;

  CommonOptions fit_common;
  std::string fit_image, fit_overlay, fit_csv;
  std::optional<std::uint64_t> fit_seed;
  std::optional<int> fit_generations;
  auto* fit = app.add_subcommand("fit", "fit one image and print a CSV row");
  fit->add_option("image", fit_image, "PNG, P6 PPM or P5 class map")->required();
  fit_common.attach(fit);
  fit->add_option("--seed", fit_seed, "random seed");
  fit->add_option("--generations,-n", fit_generations, "generation budget");
  fit->add_option("--overlay", fit_overlay, "write an outline overlay PNG");
  fit->add_option("--csv", fit_csv, "write the CSV row to this file instead of stdout");
  fit->callback([&] {
    action = [&] { return cmd_fit(fit_image, fit_common, fit_seed, fit_generations, fit_overlay, fit_csv, out, err); };
  });

  CommonOptions batch_common;
  std::string batch_manifest, batch_seeds, batch_csv;
  std::optional<int> batch_jobs;
  auto* batch = app.add_subcommand("batch", "fit every manifest image under every seed");
  batch->add_option("manifest", batch_manifest, "text file with one image path per line")->required();
  batch_common.attach(batch);
  batch->add_option("--seeds", batch_seeds, "seed list such as 1,2,3 or 1-5");
  batch->add_option("--jobs,-j", batch_jobs, "concurrent fits");
  batch->add_option("--csv", batch_csv, "write the CSV here; the table then goes to stdout");
  batch->callback([&] {
    action = [&] { return cmd_batch(batch_manifest, batch_common, batch_seeds, batch_jobs, batch_csv, out, err); };
  });

  CommonOptions synth_common;
  std::string synth_out, synth_params, synth_map;
  auto* synth = app.add_subcommand("synth", "generate a labeled phantom");
  synth->add_option("--out,-o", synth_out, "output PNG")->required();
  synth_common.attach(synth);
  synth->add_option("--params", synth_params, "planted parameter sidecar (default OUT.params)");
  synth->add_option("--class-map", synth_map, "also write a P5 class map");
  synth->callback([&] { action = [&] { return cmd_synth(synth_out, synth_common, synth_params, synth_map, err); }; });

  CommonOptions oracle_common;
  std::string oracle_image;
  auto* oracle = app.add_subcommand("oracle", "exhaustive grid search");
  oracle->add_option("image", oracle_image, "input image")->required();
  oracle_common.attach(oracle);
  oracle->callback([&] { action = [&] { return cmd_oracle(oracle_image, oracle_common, out, err); }; });

  CommonOptions overlay_common;
  std::string overlay_image, overlay_out;
  OverlayParams overlay_params;
  auto* overlay = app.add_subcommand("overlay", "draw an ellipse outline over an image");
  overlay->add_option("image", overlay_image, "input image")->required();
  overlay->add_option("--out,-o", overlay_out, "output PNG")->required();
  overlay_common.attach(overlay);
  overlay->add_option("--params", overlay_params.file, "key=value parameter file");
  overlay->add_option("--theta", overlay_params.theta);
  overlay->add_option("--xc", overlay_params.xc);
  overlay->add_option("--yc", overlay_params.yc);
  overlay->add_option("--a", overlay_params.a);
  overlay->add_option("--b", overlay_params.b);
  overlay->callback([&] {
    action = [&] { return cmd_overlay(overlay_image, overlay_common, overlay_params, overlay_out, err); };
  });

  std::vector<std::string> report_csvs;
  auto* report = app.add_subcommand("report", "aggregate CSV files into the summary table");
  report->add_option("csv", report_csvs, "CSV files written by fit or batch")->required();
  report->callback([&] { action = [&] { return cmd_report(report_csvs, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    return action();
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace pcfit::cli
