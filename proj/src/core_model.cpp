#include "palzone/core_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace palzone {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid configuration";
  for (const auto& s : v) os << "; " << s;
  return os.str();
}

std::size_t cell_count(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) return 0;
  return static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9));
}

class Checker {
 public:
  void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) errors_.push_back(path + ": " + what + " violated");
  }
  void finite(double v, const std::string& path) { require(std::isfinite(v), path, "finite value"); }
  bool empty() const { return errors_.empty(); }
  std::vector<std::string>& errors() { return errors_; }

 private:
  std::vector<std::string> errors_;
};

void check_zone(Checker& c, const Zone& z, const std::string& name) {
  c.finite(z.x_min, name + ".x_min");
  c.finite(z.x_max, name + ".x_max");
  c.finite(z.z_min, name + ".z_min");
  c.finite(z.z_max, name + ".z_max");
  c.require(z.x_min < z.x_max, name + ".x_min", "x_min < x_max");
  c.require(z.z_min < z.z_max, name + ".z_min", "z_min < z_max");
  c.require(z.z_min > 0.0, name + ".z_min", "z_min > 0");
  c.require(z.nx >= 1, name + ".nx", "nx >= 1");
  c.require(z.nz >= 1, name + ".nz", "nz >= 1");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

double FrequencyPlan::omega1() const { return 2.0 * std::numbers::pi * f1(); }
double FrequencyPlan::omega2() const { return 2.0 * std::numbers::pi * f2(); }
double FrequencyPlan::omega_audio() const { return 2.0 * std::numbers::pi * f_audio; }

ArrayGeometry ArrayGeometry::uniform(std::size_t n, double width, double gap, double v0) {
  ArrayGeometry g;
  g.n_elements = n;
  g.element_width = width;
  g.v0 = v0;
  g.element_centers.resize(n);
  const double pitch = width + gap;
  const double first = -0.5 * pitch * static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    // Mirror pairs are computed from the same magnitude so the layout is exactly symmetric.
    const std::size_t j = n - 1 - i;
    g.element_centers[i] = i <= j ? first + pitch * static_cast<double>(i)
                                  : -(first + pitch * static_cast<double>(j));
  }
  return g;
}

std::vector<Point2> Zone::control_points() const {
  std::vector<Point2> pts;
  pts.reserve(nx * nz);
  auto coord = [](double lo, double hi, std::size_t n, std::size_t i) {
    if (n == 1) return 0.5 * (lo + hi);
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  for (std::size_t iz = 0; iz < nz; ++iz)
    for (std::size_t ix = 0; ix < nx; ++ix)
      pts.push_back({coord(x_min, x_max, nx, ix), coord(z_min, z_max, nz, iz)});
  return pts;
}

std::size_t QuadratureSpec::cells_x() const { return cell_count(x_min, x_max, dx); }
std::size_t QuadratureSpec::cells_z() const { return cell_count(z_min, z_max, dz); }
std::size_t RenderGridSpec::cells_x() const { return cell_count(x_min, x_max, step); }
std::size_t RenderGridSpec::cells_z() const { return cell_count(z_min, z_max, step); }

std::vector<Point2> RenderGridSpec::points() const {
  const std::size_t nx = cells_x();
  const std::size_t nz = cells_z();
  std::vector<Point2> pts;
  pts.reserve(nx * nz);
  for (std::size_t iz = 0; iz < nz; ++iz)
    for (std::size_t ix = 0; ix < nx; ++ix)
      pts.push_back({x_min + (static_cast<double>(ix) + 0.5) * step, z_min + (static_cast<double>(iz) + 0.5) * step});
  return pts;
}

Model validate_config(const ExperimentConfig& cfg) {
  Checker c;

  const auto& m = cfg.medium;
  c.require(std::isfinite(m.rho0) && m.rho0 > 0.0, "medium.rho0", "rho0 > 0");
  c.require(std::isfinite(m.c0) && m.c0 > 0.0, "medium.c0", "c0 > 0");
  c.require(std::isfinite(m.beta) && m.beta > 0.0, "medium.beta", "beta > 0");
  c.require(m.humidity_pct >= 0.0 && m.humidity_pct <= 100.0, "medium.humidity_pct", "humidity in [0, 100]");
  c.require(std::isfinite(m.temperature_c) && m.temperature_c > -273.15, "medium.temperature_c",
            "temperature above absolute zero");
  c.require(std::isfinite(m.pressure_kpa) && m.pressure_kpa > 0.0, "medium.pressure_kpa", "pressure > 0");
  if (m.alpha_override)
    c.require(std::isfinite(*m.alpha_override) && *m.alpha_override >= 0.0, "medium.alpha_override",
              "alpha_override >= 0");

  c.require(std::isfinite(cfg.f_center) && cfg.f_center > 0.0, "f_center", "f_center > 0");
  c.require(!cfg.audio_frequencies.empty(), "audio_frequencies", "at least one audio frequency");
  for (std::size_t i = 0; i < cfg.audio_frequencies.size(); ++i) {
    const std::string path = "audio_frequencies[" + std::to_string(i) + "]";
    const FrequencyPlan plan{cfg.f_center, cfg.audio_frequencies[i]};
    c.require(std::isfinite(plan.f_audio) && plan.f_audio > 0.0, path, "f_audio > 0");
    c.require(plan.f1() > 0.0, path, "f1 > 0");
    c.require(plan.f_audio < plan.f_center, path, "f_audio < f_center");
  }

  const auto& a = cfg.array;
  c.require(a.n_elements >= 1, "array.n_elements", "n_elements >= 1");
  c.require(std::isfinite(a.element_width) && a.element_width > 0.0, "array.element_width", "element_width > 0");
  c.require(std::isfinite(a.gap) && a.gap >= 0.0, "array.gap", "gap >= 0 (no overlap)");
  c.require(std::isfinite(a.v0) && a.v0 >= 0.0, "array.v0", "v0 >= 0");

  check_zone(c, cfg.bright, "bright");
  check_zone(c, cfg.dark, "dark");

  const auto& q = cfg.quadrature;
  c.require(q.dx > 0.0 && std::isfinite(q.dx), "quadrature.dx", "spacing > 0");
  c.require(q.dz > 0.0 && std::isfinite(q.dz), "quadrature.dz", "spacing > 0");
  c.require(q.x_min < q.x_max, "quadrature.x_min", "x_min < x_max");
  c.require(q.z_min < q.z_max, "quadrature.z_min", "z_min < z_max");
  c.require(q.z_min > 0.0, "quadrature.z_min", "z_min > 0");
  if (a.n_elements >= 1 && a.element_width > 0.0) {
    const double half = 0.5 * (static_cast<double>(a.n_elements) * a.element_width +
                               static_cast<double>(a.n_elements - 1) * a.gap);
    c.require(q.x_min <= -half && q.x_max >= half, "quadrature.x_min",
              "domain encloses the array aperture");
  }
  c.require(q.z_min < cfg.bright.z_min && q.z_min < cfg.dark.z_min, "quadrature.z_min",
            "domain starts below both zones");

  const auto& r = cfg.render;
  c.require(r.step > 0.0 && std::isfinite(r.step), "render.step", "spacing > 0");
  c.require(r.x_min < r.x_max, "render.x_min", "x_min < x_max");
  c.require(r.z_min < r.z_max, "render.z_min", "z_min < z_max");
  c.require(r.z_min >= 0.0, "render.z_min", "z_min >= 0");

  c.require(cfg.optimizer.n_itr >= 1, "optimizer.n_itr", "n_itr >= 1");
  c.require(cfg.optimizer.multi_start >= 1, "optimizer.multi_start", "multi_start >= 1");
  c.require(std::isfinite(cfg.optimizer.ridge_scale) && cfg.optimizer.ridge_scale >= 0.0,
            "optimizer.ridge_scale", "ridge_scale >= 0");

  const auto& p = cfg.perturbation;
  c.require(p.n_trials >= 1, "perturbation.n_trials", "n_trials >= 1");
  c.require(p.phase_range_deg >= 0.0 && std::isfinite(p.phase_range_deg), "perturbation.phase_range_deg",
            "phase_range_deg >= 0");
  c.require(!std::isnan(p.snr_db), "perturbation.snr_db", "snr_db is a number");
  for (double v : p.phase_grid)
    c.require(v >= 0.0 && std::isfinite(v), "perturbation.phase_grid", "phase_range_deg >= 0");
  for (double v : p.snr_grid) c.require(!std::isnan(v), "perturbation.snr_grid", "snr_db is a number");

  if (!c.empty()) throw ConfigError(std::move(c.errors()));

  Model model;
  model.config = cfg;
  model.geometry = ArrayGeometry::uniform(a.n_elements, a.element_width, a.gap, a.v0);
  for (double fa : cfg.audio_frequencies) model.plans.push_back({cfg.f_center, fa});
  model.bright_points = cfg.bright.control_points();
  model.dark_points = cfg.dark.control_points();
  return model;
}

double absorption_coefficient(const MediumParams& medium, double f) {
  if (!(f > 0.0) || !std::isfinite(f)) throw std::domain_error("absorption_coefficient: frequency must be > 0");
  if (medium.alpha_override) return *medium.alpha_override;

  constexpr double kRefPressure = 101.325;  // kPa
  constexpr double kRefTemp = 293.15;       // K
  constexpr double kTriplePoint = 273.16;   // K

  const double temp = medium.temperature_c + 273.15;
  const double pa = medium.pressure_kpa / kRefPressure;
  const double tr = temp / kRefTemp;

  const double c_sat = -6.8346 * std::pow(kTriplePoint / temp, 1.261) + 4.6151;
  const double h = medium.humidity_pct * std::pow(10.0, c_sat) / pa;  // molar water-vapour concentration, %

  const double fr_o = pa * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h));
  const double fr_n = pa / std::sqrt(tr) * (9.0 + 280.0 * h * std::exp(-4.170 * (std::cbrt(1.0 / tr) - 1.0)));

  const double f2 = f * f;
  // ISO 9613-1 gives 8.686 f^2 [...] dB/m; the bracket alone is Np/m.
  return f2 * (1.84e-11 / pa * std::sqrt(tr) +
               std::pow(tr, -2.5) * (0.01275 * std::exp(-2239.1 / temp) / (fr_o + f2 / fr_o) +
                                     0.1068 * std::exp(-3352.0 / temp) / (fr_n + f2 / fr_n)));
}

}  // namespace palzone
