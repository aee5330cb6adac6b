// palzone: runs one experiment from a JSON config and writes CSV + SVG results.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <utility>

#include "palzone/config_io.hpp"
#include "palzone/hermitian_eigen.hpp"
#include "palzone/report.hpp"

namespace fs = std::filesystem;
using namespace palzone;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitOther = 1;

struct Options {
  std::string command;
  fs::path config;
  fs::path out;
  std::optional<std::uint64_t> seed;
  bool force = false;
  fs::path cache_dir;
  std::vector<std::string> overrides;
  unsigned threads = 0;
};

int fail(int code, const std::string& kind, const std::vector<std::string>& messages) {
  nlohmann::json j{{"error", kind}, {"exit_code", code}, {"messages", messages}};
  std::cerr << j.dump() << '\n';
  return code;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

std::string khz_tag(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%gHz", f);
  return buf;
}

const char* kColours[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628"};

void emit_convergence(const RunContext& ctx, const fs::path& dir) {
  const auto runs = run_convergence(ctx);
  write_file(dir / "convergence.csv", convergence_csv(runs));
  LinePlot plot{"Contrast vs iteration (PAL)", "iteration", "acoustic contrast (dB)", {}};
  for (std::size_t k = 0; k < runs.size(); ++k) {
    PlotSeries s{khz_tag(runs[k].f_audio), kColours[k % 6], {}, runs[k].history, {}, k % 2 == 1};
    for (std::size_t i = 0; i < runs[k].history.size(); ++i) s.x.push_back(static_cast<double>(i + 1));
    plot.series.push_back(std::move(s));
  }
  write_file(dir / "convergence.svg", line_plot_svg(plot));
}

void emit_contrast_table(const RunContext& ctx, const fs::path& dir) {
  const auto designs = run_contrast_table(ctx);
  write_file(dir / "contrast_table.csv", contrast_table_csv(designs));
  LinePlot plot{"Acoustic contrast", "audio frequency (Hz)", "acoustic contrast (dB)", {}};
  PlotSeries pal{"PAL", kColours[0], {}, {}, {}, false};
  PlotSeries edl{"EDL", kColours[1], {}, {}, {}, true};
  for (const auto& d : designs) {
    pal.x.push_back(d.f_audio);
    pal.y.push_back(d.pal_contrast_db);
    edl.x.push_back(d.f_audio);
    edl.y.push_back(d.edl_contrast_db);
  }
  plot.series = {pal, edl};
  write_file(dir / "contrast_table.svg", line_plot_svg(plot));
}

void emit_fields(const RunContext& ctx, const fs::path& dir) {
  const auto maps = run_fields(ctx);
  const auto& cfg = ctx.model.config;
  for (const auto& m : maps) {
    const std::string stem = std::string("field_") + to_string(m.kind) + "_" + khz_tag(m.f_audio);
    write_file(dir / (stem + ".csv"), field_csv(m));
    write_file(dir / (stem + ".svg"), heatmap_svg(m, cfg.bright, cfg.dark));
  }
  write_file(dir / "fields_summary.csv", field_summary_csv(maps));
}

void emit_robustness(const RunContext& ctx, const fs::path& dir) {
  const auto cells = run_robustness(ctx);
  const auto& p = ctx.model.config.perturbation;
  write_file(dir / "robustness.csv", robustness_csv(cells));
  write_file(dir / "robustness_summary.csv", robustness_summary_csv(cells));

  // One plot per frequency and sweep axis, PAL and EDL mean +- std.
  for (const auto& plan : ctx.model.plans) {
    for (const bool vs_snr : {true, false}) {
      LinePlot plot;
      plot.title = khz_tag(plan.f_audio) + (vs_snr ? ", phase range " + fixed(p.sweep_phase_deg, 0) + " deg"
                                                   : ", SNR " + fixed(p.sweep_snr_db, 0) + " dB");
      plot.x_label = vs_snr ? "SNR (dB)" : "phase range (deg)";
      plot.y_label = "acoustic contrast (dB)";
      PlotSeries pal{"PAL", kColours[0], {}, {}, {}, false};
      PlotSeries edl{"EDL", kColours[1], {}, {}, {}, true};
      for (const auto& c : cells) {
        if (c.f_audio != plan.f_audio) continue;
        const bool on_axis = vs_snr ? c.cell.phase_range_deg == p.sweep_phase_deg && std::isfinite(c.cell.snr_db)
                                    : c.cell.snr_db == p.sweep_snr_db;
        if (!on_axis) continue;
        const double x = vs_snr ? c.cell.snr_db : c.cell.phase_range_deg;
        for (auto [s, r] : {std::pair{&pal, &c.pal}, std::pair{&edl, &c.edl}}) {
          s->x.push_back(x);
          s->y.push_back(r->mean);
          s->err.push_back(r->stddev);
        }
      }
      // Series sorted by x for a clean polyline.
      for (PlotSeries* s : {&pal, &edl}) {
        std::vector<std::size_t> idx(s->x.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s->x[a] < s->x[b]; });
        PlotSeries t = *s;
        for (std::size_t i = 0; i < idx.size(); ++i) {
          t.x[i] = s->x[idx[i]];
          t.y[i] = s->y[idx[i]];
          t.err[i] = s->err[idx[i]];
        }
        *s = std::move(t);
      }
      plot.series = {pal, edl};
      write_file(dir / ("robustness_" + std::string(vs_snr ? "snr_" : "phase_") + khz_tag(plan.f_audio) + ".svg"),
                 line_plot_svg(plot));
    }
  }
}

// Results are written to a sibling staging directory which is renamed into
// place only after the command succeeds.
int run(const Options& o) {
  ExperimentConfig cfg;
  Model model;
  try {
    cfg = load_config(o.config, o.overrides);
    if (o.seed) {
      cfg.optimizer.seed = *o.seed;
      cfg.perturbation.seed = *o.seed;
    }
    model = validate_config(cfg);
  } catch (const ConfigError& e) {
    return fail(kExitConfig, "config", e.violations());
  }

  const fs::path out = fs::absolute(o.out).lexically_normal();
  if (fs::exists(out) && !o.force)
    return fail(kExitConfig, "config", {out.string() + ": output exists; pass --force to replace it"});

  std::random_device rd;
  fs::path staging = out;
  staging += ".tmp-" + std::to_string(rd());
  try {
    fs::create_directories(staging);
    RunContext ctx{model, o.cache_dir, o.threads};
    const auto t0 = std::chrono::steady_clock::now();
    if (o.command == "convergence") {
      emit_convergence(ctx, staging);
    } else if (o.command == "contrast-table") {
      emit_contrast_table(ctx, staging);
    } else if (o.command == "fields") {
      emit_fields(ctx, staging);
    } else {
      emit_robustness(ctx, staging);
    }
    write_file(staging / "config.json", config_to_json(cfg).dump(2) + "\n");
    if (fs::exists(out)) fs::remove_all(out);
    fs::rename(staging, out);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << o.command << ": wrote " << out.string() << " in " << fixed(secs, 1) << " s\n";
    return 0;
  } catch (const ConfigError& e) {
    fs::remove_all(staging);
    return fail(kExitConfig, "config", e.violations());
  } catch (const NumericalError& e) {
    fs::remove_all(staging);
    return fail(kExitNumerical, "numerical", {e.what()});
  } catch (const std::exception& e) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    return fail(kExitOther, "runtime", {e.what()});
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"palzone: sound zone control with parametric and conventional loudspeaker arrays"};
  app.require_subcommand(1);
  Options o;
  const std::pair<const char*, const char*> commands[] = {
      {"fields", "SPL maps of the optimized PAL and EDL arrays"},
      {"convergence", "PAL contrast per iteration of the alternating optimizer"},
      {"contrast-table", "PAL and EDL contrast at every audio frequency"},
      {"robustness", "Monte-Carlo contrast statistics over SNR and phase-noise sweeps"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", o.config, "JSON configuration file (defaults when omitted)");
    sub->add_option("--out", o.out, "Output directory")->required();
    sub->add_option("--seed", o.seed, "Seed for both the optimizer and the perturbations");
    sub->add_flag("--force", o.force, "Replace an existing output directory");
    sub->add_option("--cache-dir", o.cache_dir, "Transfer-tensor cache directory");
    sub->add_option("--set", o.overrides, "Config override key=value (dotted path), repeatable");
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    sub->callback([&o, name] { o.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }
  return run(o);
}
