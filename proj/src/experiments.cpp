#include "palzone/experiments.hpp"

#include <cmath>
#include <limits>

#include "palzone/tensor_cache.hpp"

namespace palzone {

AccOptions acc_options(const ExperimentConfig& config) {
  AccOptions o;
  o.n_itr = config.optimizer.n_itr;
  o.seed = config.optimizer.seed;
  o.ridge_scale = config.optimizer.ridge_scale;
  o.multi_start = config.optimizer.multi_start;
  return o;
}

PerturbationSpec design_perturbation(const ExperimentConfig& config) {
  const auto& p = config.perturbation;
  return {p.snr_db, p.phase_range_deg, p.seed, 1};
}

FrequencyTensors load_tensors(const RunContext& ctx, const FrequencyPlan& plan) {
  const Model& m = ctx.model;
  const auto& cfg = m.config;
  FrequencyTensors t;
  t.f_audio = plan.f_audio;
  t.pal.bright = cached_pal_tensor(ctx.cache_dir, m.geometry, cfg.medium, plan, cfg.quadrature, m.bright_points);
  t.pal.dark = cached_pal_tensor(ctx.cache_dir, m.geometry, cfg.medium, plan, cfg.quadrature, m.dark_points);
  t.edl.bright = cached_edl_vector(ctx.cache_dir, m.geometry, cfg.medium, plan, m.bright_points);
  t.edl.dark = cached_edl_vector(ctx.cache_dir, m.geometry, cfg.medium, plan, m.dark_points);
  return t;
}

Design design_at(const RunContext& ctx, const FrequencyTensors& tensors) {
  const auto& cfg = ctx.model.config;
  const PerturbationSpec spec = design_perturbation(cfg);
  const ZonedTensor pal = perturb_tensor(tensors.pal, spec, 0);
  const ZonedTensor edl = perturb_tensor(tensors.edl, spec, 0);
  Design d;
  d.f_audio = tensors.f_audio;
  d.pal = acc_pal(pal, acc_options(cfg));
  d.edl = acc_edl(edl, cfg.optimizer.ridge_scale);
  const bool clean = cfg.perturbation.evaluate_on_clean;
  d.pal_contrast_db = acoustic_contrast(clean ? tensors.pal : pal, d.pal.drives);
  d.edl_contrast_db = acoustic_contrast(clean ? tensors.edl : edl, d.edl.drives);
  return d;
}

std::vector<ConvergenceRun> run_convergence(const RunContext& ctx) {
  const auto& cfg = ctx.model.config;
  std::vector<ConvergenceRun> out;
  for (const auto& plan : ctx.model.plans) {
    const FrequencyTensors t = load_tensors(ctx, plan);
    const ZonedTensor pal = perturb_tensor(t.pal, design_perturbation(cfg), 0);
    out.push_back({plan.f_audio, acc_pal(pal, acc_options(cfg)).history});
  }
  return out;
}

std::vector<Design> run_contrast_table(const RunContext& ctx) {
  std::vector<Design> out;
  for (const auto& plan : ctx.model.plans) out.push_back(design_at(ctx, load_tensors(ctx, plan)));
  return out;
}

namespace {

double zone_mean_db(const std::vector<Point2>& points, const Eigen::VectorXcd& p,
                    const Zone& zone) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (zone.contains(points[i])) {
      sum += std::norm(p[static_cast<Eigen::Index>(i)]);
      ++n;
    }
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return spl_db(std::sqrt(sum / static_cast<double>(n)));
}

}  // namespace

std::vector<FieldMap> run_fields(const RunContext& ctx) {
  const Model& m = ctx.model;
  const auto& cfg = m.config;
  const std::vector<Point2> points = cfg.render.points();
  std::vector<FieldMap> out;
  for (const auto& plan : m.plans) {
    const Design d = design_at(ctx, load_tensors(ctx, plan));
    for (const ArrayKind kind : {ArrayKind::pal, ArrayKind::edl}) {
      const Eigen::VectorXcd p =
          kind == ArrayKind::pal
              ? render_pal_pressure(m.geometry, cfg.medium, plan, cfg.quadrature, d.pal.drives, cfg.render)
              : render_edl_pressure(m.geometry, cfg.medium, plan, d.edl.drives, cfg.render);
      FieldMap f;
      f.f_audio = plan.f_audio;
      f.kind = kind;
      f.grid = cfg.render;
      f.spl_db = spl_map(p);
      f.bright_mean_db = zone_mean_db(points, p, cfg.bright);
      f.dark_mean_db = zone_mean_db(points, p, cfg.dark);
      f.contrast_db = kind == ArrayKind::pal ? d.pal_contrast_db : d.edl_contrast_db;
      out.push_back(std::move(f));
    }
  }
  return out;
}

std::vector<SweepCellSpec> robustness_cells(const PerturbationConfig& p) {
  std::vector<SweepCellSpec> cells;
  auto add = [&](SweepCellSpec c) {
    for (const auto& e : cells)
      if (e.snr_db == c.snr_db && e.phase_range_deg == c.phase_range_deg) return;
    cells.push_back(c);
  };
  for (double snr : p.snr_grid) add({snr, p.sweep_phase_deg});
  for (double r : p.phase_grid) add({p.sweep_snr_db, r});
  return cells;
}

std::vector<SweepCell> run_robustness(const RunContext& ctx) {
  const auto& cfg = ctx.model.config;
  std::vector<FrequencyTensors> tensors;
  for (const auto& plan : ctx.model.plans) tensors.push_back(load_tensors(ctx, plan));
  SweepOptions o;
  o.n_trials = cfg.perturbation.n_trials;
  o.seed = cfg.perturbation.seed;
  o.acc = acc_options(cfg);
  o.evaluate_on_clean = cfg.perturbation.evaluate_on_clean;
  o.threads = ctx.threads;
  return run_robustness_sweep(tensors, robustness_cells(cfg.perturbation), o);
}

}  // namespace palzone
