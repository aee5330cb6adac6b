#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "palzone/core_model.hpp"

namespace palzone {

enum class ArrayKind { pal, edl };

const char* to_string(ArrayKind kind);

/// Drive vectors in multiples of v0. PAL arrays use both carriers; an EDL array
/// uses s1 only and leaves s2 empty.
struct SourcePair {
  Eigen::VectorXcd s1;
  Eigen::VectorXcd s2;

  static SourcePair pal(Eigen::VectorXcd s1, Eigen::VectorXcd s2) { return {std::move(s1), std::move(s2)}; }
  static SourcePair edl(Eigen::VectorXcd s) { return {std::move(s), {}}; }
  bool is_edl() const { return s2.size() == 0; }
};

/// Per-element carrier pressures for unit drive (v0), one row per grid point.
struct UltrasoundFieldTable {
  std::vector<Point2> points;
  Eigen::MatrixXcd carrier1;  // G x N, f1
  Eigen::MatrixXcd carrier2;  // G x N, f2
};

/// Per-control-point audio transfer data. PAL: M matrices H_m (N x N) with
/// p = s1^H H_m s2. EDL: an M x N matrix whose row m is h_m with p = h_m^T s.
class TransferTensor {
 public:
  TransferTensor() = default;
  static TransferTensor pal(std::vector<Eigen::MatrixXcd> matrices);
  static TransferTensor edl(Eigen::MatrixXcd rows);

  ArrayKind kind() const { return kind_; }
  std::size_t points() const { return kind_ == ArrayKind::pal ? pal_.size() : static_cast<std::size_t>(edl_.rows()); }
  std::size_t elements() const { return elements_; }

  const Eigen::MatrixXcd& matrix(std::size_t m) const { return pal_.at(m); }
  Eigen::MatrixXcd& matrix(std::size_t m) { return pal_.at(m); }
  const std::vector<Eigen::MatrixXcd>& matrices() const { return pal_; }
  const Eigen::MatrixXcd& rows() const { return edl_; }
  Eigen::MatrixXcd& rows() { return edl_; }

  bool all_finite() const;

 private:
  ArrayKind kind_ = ArrayKind::pal;
  std::size_t elements_ = 0;
  std::vector<Eigen::MatrixXcd> pal_;
  Eigen::MatrixXcd edl_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(std::size_t order);

/// Midpoint-rule tiling of the virtual-source domain.
struct QuadratureGrid {
  double x0 = 0.0;  // first cell centre
  double z0 = 0.0;
  double dx = 0.0;
  double dz = 0.0;
  std::size_t nx = 0;
  std::size_t nz = 0;

  static QuadratureGrid from_spec(const QuadratureSpec& spec);
  std::size_t size() const { return nx * nz; }
  double cell_area() const { return dx * dz; }
  Point2 center(std::size_t ix, std::size_t iz) const {
    return {x0 + static_cast<double>(ix) * dx, z0 + static_cast<double>(iz) * dz};
  }
  /// Row-major (z outer, x inner) cell centres.
  std::vector<Point2> centers() const;
};

/// Complex wavenumber omega / c0 + i alpha(f).
std::complex<double> wavenumber(const MediumParams& medium, double f);

/// 2D Rayleigh integral of every element at frequency f:
///   p_n(r) = (rho0 omega v0 / 2) * integral over element n of H0(k |r - r'|) dx'.
/// Returns a points x elements matrix. Points on z = 0 inside an element are
/// rejected; points with z < 0 are outside the field region.
Eigen::MatrixXcd rayleigh_line_field(const ArrayGeometry& geometry, const MediumParams& medium, double f,
                                     std::span<const Point2> points);

/// Same field on a quadrature grid. When the element pitch is a whole number of
/// cells, translation invariance reduces the work to one element per grid row.
Eigen::MatrixXcd rayleigh_line_field(const ArrayGeometry& geometry, const MediumParams& medium, double f,
                                     const QuadratureGrid& grid);

UltrasoundFieldTable ultrasound_field(const ArrayGeometry& geometry, const MediumParams& medium,
                                      const FrequencyPlan& plan, std::span<const Point2> points);
UltrasoundFieldTable ultrasound_field(const ArrayGeometry& geometry, const MediumParams& medium,
                                      const FrequencyPlan& plan, const QuadratureGrid& grid);

/// q(r) = beta omega_a / (i rho0^2 c0^4) * p1(r)^* p2(r), where p_u = P_u s_u.
Eigen::VectorXcd virtual_source_density(const UltrasoundFieldTable& table, const MediumParams& medium,
                                        const FrequencyPlan& plan, const SourcePair& drives);

/// Refinement factor per axis for cells next to an observation point.
inline constexpr std::size_t kNearCellRefinement = 4;

/// Weighted sample of the audio radiation integral for one observation point.
struct QuadratureSample {
  Point2 point;
  double weight;
};

/// Cells whose centre lies within one cell diagonal of `observer` are replaced by
/// a kNearCellRefinement^2 sub-grid. Returns the flat indices of those cells.
std::vector<std::size_t> near_cells(const QuadratureGrid& grid, Point2 observer);

/// The full sample set (coarse cells minus near cells, plus refined sub-cells)
/// used for the audio integral at `observer`.
std::vector<QuadratureSample> audio_quadrature_samples(const QuadratureGrid& grid, Point2 observer);

/// Audio kernel H0(k r) for a sample of area `area`. At r == 0 the equal-area
/// disk average of the logarithmic singularity is used.
std::complex<double> audio_kernel(std::complex<double> k, double r, double area);

/// beta omega_a^2 / (4 i rho0 c0^4)
std::complex<double> pal_prefactor(const MediumParams& medium, const FrequencyPlan& plan);

struct AssemblyOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// PAL transfer tensor H_m = C * P1^H diag(w h_m) P2 for every control point,
/// plus the refined near-cell correction.
TransferTensor assemble_pal_tensor(const ArrayGeometry& geometry, const MediumParams& medium,
                                   const FrequencyPlan& plan, const QuadratureSpec& quad,
                                   std::span<const Point2> control_points, const AssemblyOptions& options = {});

/// EDL transfer vectors: the Rayleigh integral evaluated directly at the audio frequency.
TransferTensor assemble_edl_vector(const ArrayGeometry& geometry, const MediumParams& medium,
                                   const FrequencyPlan& plan, std::span<const Point2> control_points);

/// PAL: s1^H H_m s2; EDL: h_m^T s.
std::complex<double> audio_pressure(const TransferTensor& tensor, const SourcePair& drives, std::size_t m);

/// Pressures at every control point of the tensor.
Eigen::VectorXcd audio_pressures(const TransferTensor& tensor, const SourcePair& drives);

inline constexpr double kSplFloorDb = -120.0;
inline constexpr double kSplReference = 20e-6;

/// 20 log10(|p| / (sqrt(2) * 20 uPa)); complex amplitudes are peak values.
double spl_db(std::complex<double> p);

/// Audio pressure of a PAL array at arbitrary points, computed from the
/// virtual-source density. When the point set is a render grid whose step is an
/// integer multiple of the quadrature spacing the radiation sum is evaluated as
/// an FFT convolution; otherwise by direct summation.
Eigen::VectorXcd render_pal_pressure(const ArrayGeometry& geometry, const MediumParams& medium,
                                     const FrequencyPlan& plan, const QuadratureSpec& quad,
                                     const SourcePair& drives, const RenderGridSpec& render);

/// Coarse midpoint-rule audio pressure of a PAL array at arbitrary points (no near-cell refinement).
Eigen::VectorXcd pal_pressure_at(const ArrayGeometry& geometry, const MediumParams& medium,
                                 const FrequencyPlan& plan, const QuadratureSpec& quad, const SourcePair& drives,
                                 std::span<const Point2> points);

Eigen::VectorXcd render_edl_pressure(const ArrayGeometry& geometry, const MediumParams& medium,
                                     const FrequencyPlan& plan, const SourcePair& drives,
                                     const RenderGridSpec& render);

/// SPL map (dB re 20 uPa) laid out like RenderGridSpec::points().
std::vector<double> spl_map(const Eigen::VectorXcd& pressure);

}  // namespace palzone
