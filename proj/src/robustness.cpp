#include "palzone/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "palzone/counter_rng.hpp"

namespace palzone {

namespace {

using cd = std::complex<double>;

double sigma_for(double rms, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
  return rms * std::pow(10.0, -snr_db / 20.0);
}

cd perturb_entry(cd h, const CounterRng& rng, std::uint64_t entry, double sigma, double phase_sigma) {
  double mag = std::abs(h);
  double arg = std::arg(h);
  if (sigma > 0.0) mag = std::max(0.0, mag + sigma * rng.normal(2 * entry));
  if (phase_sigma > 0.0) arg += phase_sigma * rng.normal(2 * entry + 1);
  if (sigma == 0.0 && phase_sigma == 0.0) return h;
  return std::polar(mag, arg);
}

// Perturbs in place; returns the next entry index.
std::uint64_t perturb_into(TransferTensor& t, const CounterRng& rng, std::uint64_t entry, double sigma,
                           double phase_sigma) {
  if (t.kind() == ArrayKind::pal) {
    for (std::size_t m = 0; m < t.points(); ++m) {
      auto& h = t.matrix(m);
      for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, j) = perturb_entry(h(i, j), rng, entry++, sigma, phase_sigma);
    }
  } else {
    auto& h = t.rows();
    for (Eigen::Index m = 0; m < h.rows(); ++m)
      for (Eigen::Index n = 0; n < h.cols(); ++n) h(m, n) = perturb_entry(h(m, n), rng, entry++, sigma, phase_sigma);
  }
  return entry;
}

void check_spec(const PerturbationSpec& spec) {
  if (std::isnan(spec.snr_db)) throw std::invalid_argument("perturb_tensor: snr_db is NaN");
  if (!(spec.phase_range_deg >= 0.0) || !std::isfinite(spec.phase_range_deg))
    throw std::invalid_argument("perturb_tensor: phase_range_deg must be finite and >= 0");
}

double sum_sq(const TransferTensor& t, std::size_t& count) {
  double s = 0.0;
  if (t.kind() == ArrayKind::pal) {
    for (const auto& h : t.matrices()) {
      s += h.squaredNorm();
      count += static_cast<std::size_t>(h.size());
    }
  } else {
    s += t.rows().squaredNorm();
    count += static_cast<std::size_t>(t.rows().size());
  }
  return s;
}

}  // namespace

void summarize(RobustnessSummary& s) {
  std::vector<double> ok;
  for (double c : s.contrasts)
    if (std::isfinite(c)) ok.push_back(c);
  s.failures = s.contrasts.size() - ok.size();
  if (ok.empty()) {
    s.mean = s.stddev = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sum = 0.0;
  for (double c : ok) sum += c;
  s.mean = sum / static_cast<double>(ok.size());
  double ss = 0.0;
  for (double c : ok) ss += (c - s.mean) * (c - s.mean);
  s.stddev = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(ok.begin(), ok.end());
  s.min = *lo;
  s.max = *hi;
}

double rms_magnitude(const TransferTensor& tensor) {
  std::size_t count = 0;
  const double s = sum_sq(tensor, count);
  return count ? std::sqrt(s / static_cast<double>(count)) : 0.0;
}

double rms_magnitude(const ZonedTensor& tensor) {
  std::size_t count = 0;
  double s = sum_sq(tensor.bright, count);
  s += sum_sq(tensor.dark, count);
  return count ? std::sqrt(s / static_cast<double>(count)) : 0.0;
}

TransferTensor perturb_tensor(const TransferTensor& tensor, const PerturbationSpec& spec, std::size_t trial_index) {
  check_spec(spec);
  if (!tensor.all_finite()) throw std::invalid_argument("perturb_tensor: tensor has non-finite entries");
  const CounterRng rng(spec.seed, trial_index);
  TransferTensor out = tensor;
  perturb_into(out, rng, 0, sigma_for(rms_magnitude(tensor), spec.snr_db),
               spec.phase_range_deg * std::numbers::pi / 180.0);
  return out;
}

ZonedTensor perturb_tensor(const ZonedTensor& tensor, const PerturbationSpec& spec, std::size_t trial_index) {
  check_spec(spec);
  if (!tensor.bright.all_finite() || !tensor.dark.all_finite())
    throw std::invalid_argument("perturb_tensor: tensor has non-finite entries");
  const CounterRng rng(spec.seed, trial_index);
  const double sigma = sigma_for(rms_magnitude(tensor), spec.snr_db);
  const double phase_sigma = spec.phase_range_deg * std::numbers::pi / 180.0;
  ZonedTensor out = tensor;
  const std::uint64_t next = perturb_into(out.bright, rng, 0, sigma, phase_sigma);
  perturb_into(out.dark, rng, next, sigma, phase_sigma);
  return out;
}

double robustness_trial(const ZonedTensor& clean, const PerturbationSpec& spec, std::size_t trial,
                        const AccOptions& acc, bool evaluate_on_clean) {
  const ZonedTensor noisy = perturb_tensor(clean, spec, trial);
  AccOptions opts = acc;
  opts.seed = acc.seed + trial;
  const ContrastResult r = clean.kind() == ArrayKind::pal ? acc_pal(noisy, opts) : acc_edl(noisy, acc.ridge_scale);
  return acoustic_contrast(evaluate_on_clean ? clean : noisy, r.drives);
}

std::vector<SweepCell> run_robustness_sweep(const std::vector<FrequencyTensors>& tensors,
                                            const std::vector<SweepCellSpec>& cells, const SweepOptions& options) {
  if (options.n_trials < 1) throw std::invalid_argument("run_robustness_sweep: n_trials must be >= 1");
  std::vector<SweepCell> out;
  for (const auto& ft : tensors)
    for (const auto& c : cells) {
      SweepCell cell;
      cell.f_audio = ft.f_audio;
      cell.cell = c;
      const PerturbationSpec spec{c.snr_db, c.phase_range_deg, options.seed, options.n_trials};
      for (auto* s : {&cell.pal, &cell.edl}) {
        s->spec = spec;
        s->contrasts.assign(static_cast<std::size_t>(options.n_trials), std::numeric_limits<double>::quiet_NaN());
        s->errors.assign(static_cast<std::size_t>(options.n_trials), {});
      }
      out.push_back(std::move(cell));
    }

  // Flattened job list: (cell index, array, trial). Each job writes only its own slot.
  const std::size_t per_cell = 2 * static_cast<std::size_t>(options.n_trials);
  const std::size_t jobs = out.size() * per_cell;
  auto run = [&](std::size_t job) {
    const std::size_t ci = job / per_cell;
    const std::size_t rest = job % per_cell;
    const bool pal = rest < static_cast<std::size_t>(options.n_trials);
    const std::size_t trial = pal ? rest : rest - static_cast<std::size_t>(options.n_trials);
    SweepCell& cell = out[ci];
    const FrequencyTensors& ft = tensors[ci / cells.size()];
    RobustnessSummary& s = pal ? cell.pal : cell.edl;
    try {
      s.contrasts[trial] = robustness_trial(pal ? ft.pal : ft.edl, s.spec, trial, options.acc, options.evaluate_on_clean);
    } catch (const std::exception& e) {
      s.errors[trial] = e.what();
    }
  };
  unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) run(j);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t j = w; j < jobs; j += workers) run(j);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& cell : out) {
    summarize(cell.pal);
    summarize(cell.edl);
  }
  return out;
}

}  // namespace palzone
