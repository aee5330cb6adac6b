#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "palzone/acc_optimizer.hpp"

namespace palzone {

/// Amplitude/phase perturbation of transfer entries:
///   H~ = max(|H| + sigma N(0,1), 0) * exp(i (angle(H) + R N(0,1)))
/// with sigma = rms(|H|) * 10^(-snr_db / 20) and R = phase_range_deg in radians.
struct PerturbationSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  double phase_range_deg = 0.0;
  std::uint64_t seed = 0;
  int n_trials = 100;
};

struct RobustnessSummary {
  PerturbationSpec spec;
  std::vector<double> contrasts;    // per trial, NaN where the optimizer failed
  std::vector<std::string> errors;  // per trial, empty on success
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  double min = 0.0;
  double max = 0.0;
  std::size_t failures = 0;
};

/// Recomputes mean/stddev/min/max from the finite entries of `contrasts`.
void summarize(RobustnessSummary& summary);

/// RMS of all entry magnitudes.
double rms_magnitude(const TransferTensor& tensor);
double rms_magnitude(const ZonedTensor& tensor);

/// Perturbs every entry. The noise for entry e is keyed by (seed, trial_index, e),
/// so trials are independent and reproducible in any order.
TransferTensor perturb_tensor(const TransferTensor& tensor, const PerturbationSpec& spec, std::size_t trial_index);

/// Perturbs bright and dark together: one rms reference over both zones, with
/// dark-zone entry indices continuing after the bright ones.
ZonedTensor perturb_tensor(const ZonedTensor& tensor, const PerturbationSpec& spec, std::size_t trial_index);

struct FrequencyTensors {
  double f_audio = 0.0;
  ZonedTensor pal;
  ZonedTensor edl;
};

struct SweepCellSpec {
  double snr_db = 30.0;
  double phase_range_deg = 15.0;
};

struct SweepCell {
  double f_audio = 0.0;
  SweepCellSpec cell;
  RobustnessSummary pal;
  RobustnessSummary edl;
};

struct SweepOptions {
  int n_trials = 100;
  std::uint64_t seed = 0;
  AccOptions acc;
  bool evaluate_on_clean = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// For each frequency and cell, runs n_trials perturb-then-optimize trials for
/// both arrays. Output is ordered by frequency, then cell, then trial index.
std::vector<SweepCell> run_robustness_sweep(const std::vector<FrequencyTensors>& tensors,
                                            const std::vector<SweepCellSpec>& cells, const SweepOptions& options);

/// Contrast of one trial: perturb, optimize, evaluate. Exposed for testing.
double robustness_trial(const ZonedTensor& clean, const PerturbationSpec& spec, std::size_t trial,
                        const AccOptions& acc, bool evaluate_on_clean);

}  // namespace palzone
