#include "palzone/field_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <fftw3.h>

#include "palzone/special_functions.hpp"

namespace palzone {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

constexpr std::size_t kNodesPerPanel = 8;
constexpr std::size_t kMaxPanels = 256;

const GaussLegendreRule& panel_rule() {
  static const GaussLegendreRule rule = gauss_legendre(kNodesPerPanel);
  return rule;
}

// Distance from p to the element segment [c - w/2, c + w/2] on z = 0.
double distance_to_element(Point2 p, double center, double width) {
  const double dx = std::max(0.0, std::abs(p.x - center) - 0.5 * width);
  return std::hypot(dx, p.z);
}

bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-9 * std::max(1.0, std::abs(v)); }

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

const char* to_string(ArrayKind kind) { return kind == ArrayKind::pal ? "PAL" : "EDL"; }

TransferTensor TransferTensor::pal(std::vector<Eigen::MatrixXcd> matrices) {
  TransferTensor t;
  t.kind_ = ArrayKind::pal;
  t.elements_ = matrices.empty() ? 0 : static_cast<std::size_t>(matrices.front().rows());
  for (const auto& h : matrices)
    if (static_cast<std::size_t>(h.rows()) != t.elements_ || h.rows() != h.cols())
      throw std::invalid_argument("TransferTensor::pal: every H_m must be N x N");
  t.pal_ = std::move(matrices);
  return t;
}

TransferTensor TransferTensor::edl(Eigen::MatrixXcd rows) {
  TransferTensor t;
  t.kind_ = ArrayKind::edl;
  t.elements_ = static_cast<std::size_t>(rows.cols());
  t.edl_ = std::move(rows);
  return t;
}

bool TransferTensor::all_finite() const {
  if (kind_ == ArrayKind::edl) return edl_.allFinite();
  return std::all_of(pal_.begin(), pal_.end(), [](const Eigen::MatrixXcd& h) { return h.allFinite(); });
}

GaussLegendreRule gauss_legendre(std::size_t order) {
  if (order == 0) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const std::size_t half = (order + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (order == 1) p0 = 1.0;
      dp = static_cast<double>(order) * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

cd wavenumber(const MediumParams& medium, double f) {
  return {2.0 * std::numbers::pi * f / medium.c0, absorption_coefficient(medium, f)};
}

namespace {

struct LineSource {
  cd k;
  double width;
  double pref;
  std::size_t base_panels;

  LineSource(const ArrayGeometry& geometry, const MediumParams& medium, double f)
      : k(wavenumber(medium, f)),
        width(geometry.element_width),
        pref(medium.rho0 * 2.0 * std::numbers::pi * f * geometry.v0 / 2.0),
        base_panels(std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(width * k.real() / (2.0 * std::numbers::pi))))) {}

  // Field of one element centred at x = center, observed at p.
  cd operator()(Point2 p, double center) const {
    if (!(p.z >= 0.0) || !std::isfinite(p.x))
      throw std::domain_error("rayleigh_line_field: point outside the field region z >= 0");
    const double dist = distance_to_element(p, center, width);
    if (dist == 0.0) throw std::domain_error("rayleigh_line_field: point lies on a radiating element");
    // Panels no longer than twice the distance keep the near-field peak resolved.
    std::size_t panels = std::max(base_panels, static_cast<std::size_t>(std::ceil(0.5 * width / dist)));
    panels = std::min(panels, kMaxPanels);
    const auto& rule = panel_rule();
    const double plen = width / static_cast<double>(panels);
    cd acc = 0.0;
    for (std::size_t pi = 0; pi < panels; ++pi) {
      const double mid = center - 0.5 * width + (static_cast<double>(pi) + 0.5) * plen;
      cd panel_sum = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double r = std::hypot(p.x - (mid + 0.5 * plen * rule.nodes[q]), p.z);
        panel_sum += rule.weights[q] * hankel1_0(k * r);
      }
      acc += 0.5 * plen * panel_sum;
    }
    return pref * acc;
  }
};

}  // namespace

Eigen::MatrixXcd rayleigh_line_field(const ArrayGeometry& geometry, const MediumParams& medium, double f,
                                     std::span<const Point2> points) {
  const std::size_t n = geometry.element_centers.size();
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(n));
  const LineSource source(geometry, medium, f);
  for (std::size_t g = 0; g < points.size(); ++g)
    for (std::size_t e = 0; e < n; ++e)
      out(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(e)) = source(points[g], geometry.element_centers[e]);
  return out;
}

Eigen::MatrixXcd rayleigh_line_field(const ArrayGeometry& geometry, const MediumParams& medium, double f,
                                     const QuadratureGrid& grid) {
  const std::size_t n = geometry.element_centers.size();
  const double c0 = geometry.element_centers.front();
  // Element e sits `stride * e` cells to the right of element 0 when the pitch is a whole number of cells.
  const double pitch_cells = n > 1 ? (geometry.element_centers[1] - c0) / grid.dx : 0.0;
  bool on_lattice = n == 1 || (near_integer(pitch_cells) && std::lround(pitch_cells) >= 1);
  const long stride = n > 1 ? std::lround(pitch_cells) : 0;
  for (std::size_t e = 0; on_lattice && e < n; ++e)
    on_lattice = std::abs(geometry.element_centers[e] - (c0 + static_cast<double>(stride * static_cast<long>(e)) * grid.dx)) <=
                 1e-9 * grid.dx;
  if (!on_lattice) {
    const auto pts = grid.centers();
    return rayleigh_line_field(geometry, medium, f, pts);
  }

  // p_e(x_j, z) = F(x_j - x_e, z), with x_j - x_e = (x0 - c0) + (j - stride * e) dx.
  const LineSource source(geometry, medium, f);
  const long shift = stride * static_cast<long>(n - 1);
  const std::size_t offsets = grid.nx + static_cast<std::size_t>(shift);
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(n));
  std::vector<cd> row(offsets);
  for (std::size_t iz = 0; iz < grid.nz; ++iz) {
    const double z = grid.z0 + static_cast<double>(iz) * grid.dz;
    for (std::size_t l = 0; l < offsets; ++l) {
      const double u = (grid.x0 - c0) + (static_cast<double>(l) - static_cast<double>(shift)) * grid.dx;
      row[l] = source({u, z}, 0.0);
    }
    for (std::size_t ix = 0; ix < grid.nx; ++ix)
      for (std::size_t e = 0; e < n; ++e)
        out(static_cast<Eigen::Index>(iz * grid.nx + ix), static_cast<Eigen::Index>(e)) =
            row[ix + static_cast<std::size_t>(shift - stride * static_cast<long>(e))];
  }
  return out;
}

UltrasoundFieldTable ultrasound_field(const ArrayGeometry& geometry, const MediumParams& medium,
                                      const FrequencyPlan& plan, std::span<const Point2> points) {
  for (const auto& p : points)
    if (!(p.z > 0.0)) throw std::domain_error("ultrasound_field: grid points must have z > 0");
  UltrasoundFieldTable t;
  t.points.assign(points.begin(), points.end());
  t.carrier1 = rayleigh_line_field(geometry, medium, plan.f1(), points);
  t.carrier2 = rayleigh_line_field(geometry, medium, plan.f2(), points);
  return t;
}

UltrasoundFieldTable ultrasound_field(const ArrayGeometry& geometry, const MediumParams& medium,
                                      const FrequencyPlan& plan, const QuadratureGrid& grid) {
  if (!(grid.z0 > 0.0)) throw std::domain_error("ultrasound_field: grid points must have z > 0");
  UltrasoundFieldTable t;
  t.points = grid.centers();
  t.carrier1 = rayleigh_line_field(geometry, medium, plan.f1(), grid);
  t.carrier2 = rayleigh_line_field(geometry, medium, plan.f2(), grid);
  return t;
}

Eigen::VectorXcd virtual_source_density(const UltrasoundFieldTable& table, const MediumParams& medium,
                                        const FrequencyPlan& plan, const SourcePair& drives) {
  const auto g = static_cast<Eigen::Index>(table.points.size());
  if (table.carrier1.rows() != g || table.carrier2.rows() != g)
    throw std::invalid_argument("virtual_source_density: field table rows do not match its grid");
  if (drives.s1.size() != table.carrier1.cols() || drives.s2.size() != table.carrier2.cols())
    throw std::invalid_argument("virtual_source_density: drive length does not match element count");
  const cd pref = medium.beta * plan.omega_audio() /
                  (kI * medium.rho0 * medium.rho0 * std::pow(medium.c0, 4));
  const Eigen::VectorXcd p1 = table.carrier1 * drives.s1;
  const Eigen::VectorXcd p2 = table.carrier2 * drives.s2;
  return pref * (p1.conjugate().array() * p2.array()).matrix();
}

QuadratureGrid QuadratureGrid::from_spec(const QuadratureSpec& spec) {
  QuadratureGrid g;
  g.dx = spec.dx;
  g.dz = spec.dz;
  g.nx = spec.cells_x();
  g.nz = spec.cells_z();
  g.x0 = spec.x_min + 0.5 * spec.dx;
  g.z0 = spec.z_min + 0.5 * spec.dz;
  return g;
}

std::vector<Point2> QuadratureGrid::centers() const {
  std::vector<Point2> pts;
  pts.reserve(size());
  for (std::size_t iz = 0; iz < nz; ++iz)
    for (std::size_t ix = 0; ix < nx; ++ix) pts.push_back(center(ix, iz));
  return pts;
}

std::vector<std::size_t> near_cells(const QuadratureGrid& grid, Point2 observer) {
  std::vector<std::size_t> cells;
  // Cells exactly one diagonal away count as near; the slack keeps that independent of rounding.
  const double diag = std::hypot(grid.dx, grid.dz) * (1.0 + 1e-9);
  const auto lo = [](double v) { return static_cast<long>(std::floor(v)); };
  const long ix_lo = std::max(0L, lo((observer.x - diag - grid.x0) / grid.dx));
  const long ix_hi = std::min(static_cast<long>(grid.nx) - 1, lo((observer.x + diag - grid.x0) / grid.dx) + 1);
  const long iz_lo = std::max(0L, lo((observer.z - diag - grid.z0) / grid.dz));
  const long iz_hi = std::min(static_cast<long>(grid.nz) - 1, lo((observer.z + diag - grid.z0) / grid.dz) + 1);
  for (long iz = iz_lo; iz <= iz_hi; ++iz)
    for (long ix = ix_lo; ix <= ix_hi; ++ix) {
      const Point2 c = grid.center(static_cast<std::size_t>(ix), static_cast<std::size_t>(iz));
      if (std::hypot(c.x - observer.x, c.z - observer.z) <= diag)
        cells.push_back(static_cast<std::size_t>(iz) * grid.nx + static_cast<std::size_t>(ix));
    }
  return cells;
}

namespace {

std::vector<QuadratureSample> refined_samples(const QuadratureGrid& grid, std::span<const std::size_t> cells) {
  std::vector<QuadratureSample> out;
  constexpr std::size_t r = kNearCellRefinement;
  const double sx = grid.dx / r;
  const double sz = grid.dz / r;
  for (std::size_t cell : cells) {
    const Point2 c = grid.center(cell % grid.nx, cell / grid.nx);
    for (std::size_t jz = 0; jz < r; ++jz)
      for (std::size_t jx = 0; jx < r; ++jx)
        out.push_back({{c.x - 0.5 * grid.dx + (static_cast<double>(jx) + 0.5) * sx,
                        c.z - 0.5 * grid.dz + (static_cast<double>(jz) + 0.5) * sz},
                       sx * sz});
  }
  return out;
}

}  // namespace

std::vector<QuadratureSample> audio_quadrature_samples(const QuadratureGrid& grid, Point2 observer) {
  const auto near = near_cells(grid, observer);
  std::vector<QuadratureSample> out;
  out.reserve(grid.size() + near.size() * kNearCellRefinement * kNearCellRefinement);
  std::size_t next = 0;
  for (std::size_t iz = 0; iz < grid.nz; ++iz)
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const std::size_t flat = iz * grid.nx + ix;
      if (next < near.size() && near[next] == flat) {
        ++next;
        continue;
      }
      out.push_back({grid.center(ix, iz), grid.cell_area()});
    }
  const auto fine = refined_samples(grid, near);
  out.insert(out.end(), fine.begin(), fine.end());
  return out;
}

cd audio_kernel(cd k, double r, double area) {
  if (r > 0.0) return hankel1_0(k * r);
  // Mean of 1 + (2i/pi)(ln(k r / 2) + gamma) over a disk of radius rho: ln r averages to ln rho - 1/2.
  const double rho = std::sqrt(area / std::numbers::pi);
  constexpr double kEulerGamma = 0.57721566490153286;
  return 1.0 + (2.0 * kI / std::numbers::pi) * (std::log(0.5 * k * rho) + kEulerGamma - 0.5);
}

cd pal_prefactor(const MediumParams& medium, const FrequencyPlan& plan) {
  const double wa = plan.omega_audio();
  return medium.beta * wa * wa / (4.0 * kI * medium.rho0 * std::pow(medium.c0, 4));
}

TransferTensor assemble_pal_tensor(const ArrayGeometry& geometry, const MediumParams& medium,
                                   const FrequencyPlan& plan, const QuadratureSpec& quad,
                                   std::span<const Point2> control_points, const AssemblyOptions& options) {
  if (quad.x_min > geometry.aperture_min() || quad.x_max < geometry.aperture_max())
    throw std::invalid_argument("assemble_pal_tensor: quadrature domain excludes the array aperture");
  for (const auto& p : control_points)
    if (!(p.z > 0.0)) throw std::domain_error("assemble_pal_tensor: control points must have z > 0");

  const QuadratureGrid grid = QuadratureGrid::from_spec(quad);
  const UltrasoundFieldTable table = ultrasound_field(geometry, medium, plan, grid);
  const auto& centers = table.points;
  const Eigen::MatrixXcd p1h = table.carrier1.adjoint();
  const cd ka = wavenumber(medium, plan.f_audio);
  const cd pref = pal_prefactor(medium, plan);
  const double area = grid.cell_area();

  std::vector<Eigen::MatrixXcd> out(control_points.size());
  parallel_for(control_points.size(), options.threads, [&](std::size_t m) {
    const Point2 rm = control_points[m];
    Eigen::VectorXcd kernel(static_cast<Eigen::Index>(centers.size()));
    for (std::size_t g = 0; g < centers.size(); ++g)
      kernel[static_cast<Eigen::Index>(g)] =
          area * audio_kernel(ka, std::hypot(rm.x - centers[g].x, rm.z - centers[g].z), area);
    const auto near = near_cells(grid, rm);
    for (std::size_t cell : near) kernel[static_cast<Eigen::Index>(cell)] = 0.0;

    Eigen::MatrixXcd h = p1h * (kernel.asDiagonal() * table.carrier2);

    if (!near.empty()) {
      const auto fine = refined_samples(grid, near);
      std::vector<Point2> pts;
      pts.reserve(fine.size());
      for (const auto& s : fine) pts.push_back(s.point);
      const UltrasoundFieldTable local = ultrasound_field(geometry, medium, plan, pts);
      Eigen::VectorXcd fk(static_cast<Eigen::Index>(fine.size()));
      for (std::size_t s = 0; s < fine.size(); ++s)
        fk[static_cast<Eigen::Index>(s)] =
            fine[s].weight * audio_kernel(ka, std::hypot(rm.x - pts[s].x, rm.z - pts[s].z), fine[s].weight);
      h += local.carrier1.adjoint() * (fk.asDiagonal() * local.carrier2);
    }
    h *= pref;
    out[m] = std::move(h);
  });

  TransferTensor tensor = TransferTensor::pal(std::move(out));
  if (!tensor.all_finite()) throw NumericalError("assemble_pal_tensor: non-finite tensor entry");
  return tensor;
}

TransferTensor assemble_edl_vector(const ArrayGeometry& geometry, const MediumParams& medium,
                                   const FrequencyPlan& plan, std::span<const Point2> control_points) {
  for (const auto& p : control_points)
    if (!(p.z > 0.0)) throw std::domain_error("assemble_edl_vector: control points must have z > 0");
  TransferTensor tensor = TransferTensor::edl(rayleigh_line_field(geometry, medium, plan.f_audio, control_points));
  if (!tensor.all_finite()) throw NumericalError("assemble_edl_vector: non-finite tensor entry");
  return tensor;
}

cd audio_pressure(const TransferTensor& tensor, const SourcePair& drives, std::size_t m) {
  if (m >= tensor.points()) throw std::out_of_range("audio_pressure: control-point index out of range");
  const auto n = static_cast<Eigen::Index>(tensor.elements());
  if (tensor.kind() == ArrayKind::pal) {
    if (drives.s1.size() != n || drives.s2.size() != n)
      throw std::invalid_argument("audio_pressure: drive length does not match tensor");
    return drives.s1.dot(tensor.matrix(m) * drives.s2);  // dot() conjugates its left operand
  }
  if (drives.s1.size() != n) throw std::invalid_argument("audio_pressure: drive length does not match tensor");
  return tensor.rows().row(static_cast<Eigen::Index>(m)).transpose().cwiseProduct(drives.s1).sum();
}

Eigen::VectorXcd audio_pressures(const TransferTensor& tensor, const SourcePair& drives) {
  Eigen::VectorXcd p(static_cast<Eigen::Index>(tensor.points()));
  for (std::size_t m = 0; m < tensor.points(); ++m) p[static_cast<Eigen::Index>(m)] = audio_pressure(tensor, drives, m);
  return p;
}

double spl_db(cd p) {
  const double a = std::abs(p);
  if (!(a > 0.0)) return kSplFloorDb;
  return std::max(kSplFloorDb, 20.0 * std::log10(a / (std::numbers::sqrt2 * kSplReference)));
}

std::vector<double> spl_map(const Eigen::VectorXcd& pressure) {
  std::vector<double> out(static_cast<std::size_t>(pressure.size()));
  for (Eigen::Index i = 0; i < pressure.size(); ++i) out[static_cast<std::size_t>(i)] = spl_db(pressure[i]);
  return out;
}

namespace {

// sum_g area * q_g * H0(k |r - r_g|) over the coarse grid via zero-padded 2D FFT convolution.
// Render point (I, J) sits at lattice offset (I * rx, J * rz) from the first render point.
Eigen::VectorXcd radiate_fft(const QuadratureGrid& grid, const Eigen::VectorXcd& q, cd k,
                             const RenderGridSpec& render, std::size_t rx, std::size_t rz) {
  const std::size_t nxr = render.cells_x();
  const std::size_t nzr = render.cells_z();
  const double ox = render.x_min + 0.5 * render.step - grid.x0;
  const double oz = render.z_min + 0.5 * render.step - grid.z0;
  const std::size_t ux = (nxr - 1) * rx + 1;  // lattice positions spanned by the output
  const std::size_t uz = (nzr - 1) * rz + 1;
  const std::size_t fx = grid.nx - 1 + ux;  // kernel extent; also a wrap-free FFT size
  const std::size_t fz = grid.nz - 1 + uz;
  const std::size_t total = fx * fz;
  const double area = grid.cell_area();

  auto* a = fftw_alloc_complex(total);
  auto* b = fftw_alloc_complex(total);
  auto cleanup = [&] {
    fftw_free(a);
    fftw_free(b);
  };
  std::fill_n(reinterpret_cast<double*>(a), 2 * total, 0.0);
  // Layout: index [iz * fx + ix] with ix along x.
  for (std::size_t iz = 0; iz < grid.nz; ++iz)
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const cd v = q[static_cast<Eigen::Index>(iz * grid.nx + ix)];
      a[iz * fx + ix][0] = v.real();
      a[iz * fx + ix][1] = v.imag();
    }
  // Kernel offset index (ix, iz) represents lattice displacement (ix - (nx-1), iz - (nz-1)).
  for (std::size_t iz = 0; iz < fz; ++iz)
    for (std::size_t ix = 0; ix < fx; ++ix) {
      const double dxm = ox + (static_cast<double>(ix) - static_cast<double>(grid.nx - 1)) * grid.dx;
      const double dzm = oz + (static_cast<double>(iz) - static_cast<double>(grid.nz - 1)) * grid.dz;
      const cd v = area * audio_kernel(k, std::hypot(dxm, dzm), area);
      b[iz * fx + ix][0] = v.real();
      b[iz * fx + ix][1] = v.imag();
    }

  const int n0 = static_cast<int>(fz);
  const int n1 = static_cast<int>(fx);
  fftw_plan pa = fftw_plan_dft_2d(n0, n1, a, a, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan pb = fftw_plan_dft_2d(n0, n1, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < total; ++i) {
    const cd prod = cd(a[i][0], a[i][1]) * cd(b[i][0], b[i][1]);
    a[i][0] = prod.real();
    a[i][1] = prod.imag();
  }
  fftw_plan pinv = fftw_plan_dft_2d(n0, n1, a, a, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(pinv);
  fftw_destroy_plan(pa);
  fftw_destroy_plan(pb);
  fftw_destroy_plan(pinv);

  Eigen::VectorXcd out(static_cast<Eigen::Index>(nxr * nzr));
  const double scale = 1.0 / static_cast<double>(total);
  for (std::size_t jz = 0; jz < nzr; ++jz)
    for (std::size_t jx = 0; jx < nxr; ++jx) {
      const std::size_t tx = jx * rx + grid.nx - 1;
      const std::size_t tz = jz * rz + grid.nz - 1;
      const auto& v = a[tz * fx + tx];
      out[static_cast<Eigen::Index>(jz * nxr + jx)] = scale * cd(v[0], v[1]);
    }
  cleanup();
  return out;
}

}  // namespace

Eigen::VectorXcd pal_pressure_at(const ArrayGeometry& geometry, const MediumParams& medium,
                                 const FrequencyPlan& plan, const QuadratureSpec& quad, const SourcePair& drives,
                                 std::span<const Point2> points) {
  const QuadratureGrid grid = QuadratureGrid::from_spec(quad);
  const UltrasoundFieldTable table = ultrasound_field(geometry, medium, plan, grid);
  const auto& centers = table.points;
  const Eigen::VectorXcd q = virtual_source_density(table, medium, plan, drives);
  const cd ka = wavenumber(medium, plan.f_audio);
  const double area = grid.cell_area();
  const double scale = medium.rho0 * plan.omega_audio() / 4.0 * area;
  Eigen::VectorXcd out(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    cd acc = 0.0;
    for (std::size_t g = 0; g < centers.size(); ++g)
      acc += q[static_cast<Eigen::Index>(g)] *
             audio_kernel(ka, std::hypot(points[i].x - centers[g].x, points[i].z - centers[g].z), area);
    out[static_cast<Eigen::Index>(i)] = scale * acc;
  }
  return out;
}

Eigen::VectorXcd render_pal_pressure(const ArrayGeometry& geometry, const MediumParams& medium,
                                     const FrequencyPlan& plan, const QuadratureSpec& quad,
                                     const SourcePair& drives, const RenderGridSpec& render) {
  const QuadratureGrid grid = QuadratureGrid::from_spec(quad);
  const double rx = render.step / grid.dx;
  const double rz = render.step / grid.dz;
  if (!(near_integer(rx) && near_integer(rz) && std::lround(rx) >= 1 && std::lround(rz) >= 1)) {
    const auto pts = render.points();
    return pal_pressure_at(geometry, medium, plan, quad, drives, pts);
  }
  const UltrasoundFieldTable table = ultrasound_field(geometry, medium, plan, grid);
  const Eigen::VectorXcd q = virtual_source_density(table, medium, plan, drives);
  const double scale = medium.rho0 * plan.omega_audio() / 4.0;
  return scale * radiate_fft(grid, q, wavenumber(medium, plan.f_audio), render,
                             static_cast<std::size_t>(std::lround(rx)), static_cast<std::size_t>(std::lround(rz)));
}

Eigen::VectorXcd render_edl_pressure(const ArrayGeometry& geometry, const MediumParams& medium,
                                     const FrequencyPlan& plan, const SourcePair& drives,
                                     const RenderGridSpec& render) {
  const auto pts = render.points();
  const Eigen::MatrixXcd h = rayleigh_line_field(geometry, medium, plan.f_audio, pts);
  if (drives.s1.size() != h.cols()) throw std::invalid_argument("render_edl_pressure: drive length mismatch");
  return h * drives.s1;
}

}  // namespace palzone
