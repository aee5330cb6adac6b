#pragma once

#include <filesystem>
#include <vector>

#include "palzone/robustness.hpp"

namespace palzone {

struct RunContext {
  Model model;
  std::filesystem::path cache_dir;  // empty disables the tensor cache
  unsigned threads = 0;             // 0 = hardware concurrency
};

AccOptions acc_options(const ExperimentConfig& config);

/// Single perturbation used by the convergence, contrast-table and fields
/// experiments: trial 0 of the configured SNR / phase range / seed.
PerturbationSpec design_perturbation(const ExperimentConfig& config);

/// Clean PAL and EDL tensors over both zones, through the cache when enabled.
FrequencyTensors load_tensors(const RunContext& ctx, const FrequencyPlan& plan);

/// Both arrays optimized on the design perturbation.
struct Design {
  double f_audio = 0.0;
  ContrastResult pal;
  ContrastResult edl;
  // Contrast on the perturbed tensor, or on the clean one when
  // perturbation.evaluate_on_clean is set.
  double pal_contrast_db = 0.0;
  double edl_contrast_db = 0.0;
};

Design design_at(const RunContext& ctx, const FrequencyTensors& tensors);

struct ConvergenceRun {
  double f_audio = 0.0;
  std::vector<double> history;
};
std::vector<ConvergenceRun> run_convergence(const RunContext& ctx);

std::vector<Design> run_contrast_table(const RunContext& ctx);

struct FieldMap {
  double f_audio = 0.0;
  ArrayKind kind = ArrayKind::pal;
  RenderGridSpec grid;
  std::vector<double> spl_db;  // RenderGridSpec::points() order
  double bright_mean_db = 0.0;  // energetic mean over render cells inside the zone; NaN when none
  double dark_mean_db = 0.0;
  double contrast_db = 0.0;  // of the drives used, as in Design
};
std::vector<FieldMap> run_fields(const RunContext& ctx);

/// SNR sweep at perturbation.sweep_phase_deg followed by the phase sweep at
/// perturbation.sweep_snr_db, duplicates removed, order preserved.
std::vector<SweepCellSpec> robustness_cells(const PerturbationConfig& p);
std::vector<SweepCell> run_robustness(const RunContext& ctx);

}  // namespace palzone
