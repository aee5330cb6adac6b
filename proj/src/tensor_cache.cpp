#include "palzone/tensor_cache.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace palzone {

namespace {

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

constexpr std::array<char, 8> kMagic{'P', 'Z', 'C', 'A', 'C', 'H', 'E', '\0'};
constexpr std::uint32_t kPayloadTensor = 1;
constexpr std::uint32_t kPayloadTable = 2;

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001B3ULL;
    }
  }
  void f64(double v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
bool get(std::istream& is, T& v) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof v));
}

void put_matrix(std::ostream& os, const Eigen::MatrixXcd& m) {
  os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(std::complex<double>)));
}

bool get_matrix(std::istream& is, Eigen::MatrixXcd& m, std::uint64_t rows, std::uint64_t cols) {
  m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return static_cast<bool>(
      is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(std::complex<double>))));
}

void write_header(std::ostream& os, std::uint32_t payload, std::uint64_t key, std::uint32_t kind, std::uint64_t rows,
                  std::uint64_t cols, std::uint64_t count) {
  os.write(kMagic.data(), kMagic.size());
  put(os, kCacheVersion);
  put(os, payload);
  put(os, key);
  put(os, kind);
  put(os, rows);
  put(os, cols);
  put(os, count);
}

struct Header {
  std::uint32_t kind = 0;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::uint64_t count = 0;
};

std::optional<Header> read_header(std::istream& is, std::uint32_t payload, std::uint64_t key) {
  std::array<char, 8> magic{};
  std::uint32_t version = 0;
  std::uint32_t got_payload = 0;
  std::uint64_t got_key = 0;
  Header h;
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) return std::nullopt;
  if (!get(is, version) || version != kCacheVersion) return std::nullopt;
  if (!get(is, got_payload) || got_payload != payload) return std::nullopt;
  if (!get(is, got_key) || got_key != key) return std::nullopt;
  if (!get(is, h.kind) || !get(is, h.rows) || !get(is, h.cols) || !get(is, h.count)) return std::nullopt;
  // Guard against absurd sizes from corrupted files.
  if (h.rows > (1ULL << 32) || h.cols > (1ULL << 32) || h.count > (1ULL << 32)) return std::nullopt;
  return h;
}

// Writes to a sibling temporary and renames so readers never see a partial file.
template <typename Fn>
void atomic_write(const std::filesystem::path& path, Fn&& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write cache file " + tmp.string());
    body(os);
    if (!os) throw std::runtime_error("failed writing cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::filesystem::path cache_path(const std::filesystem::path& dir, const char* prefix, std::uint64_t key) {
  std::ostringstream name;
  name << prefix << '-' << std::hex << key << ".pzc";
  return dir / name.str();
}

}  // namespace

std::uint64_t cache_key(ArrayKind kind, const ArrayGeometry& geometry, const MediumParams& medium,
                        const FrequencyPlan& plan, const QuadratureSpec& quad, std::span<const Point2> points) {
  Fnv1a h;
  h.u64(kCacheVersion);
  h.u64(kind == ArrayKind::pal ? 0 : 1);
  h.u64(geometry.n_elements);
  h.f64(geometry.element_width);
  h.f64(geometry.v0);
  for (double c : geometry.element_centers) h.f64(c);
  h.f64(medium.rho0);
  h.f64(medium.c0);
  h.f64(medium.beta);
  h.f64(medium.temperature_c);
  h.f64(medium.humidity_pct);
  h.f64(medium.pressure_kpa);
  h.u64(medium.alpha_override.has_value());
  h.f64(medium.alpha_override.value_or(0.0));
  h.f64(plan.f_center);
  h.f64(plan.f_audio);
  if (kind == ArrayKind::pal) {
    h.f64(quad.x_min);
    h.f64(quad.x_max);
    h.f64(quad.z_min);
    h.f64(quad.z_max);
    h.f64(quad.dx);
    h.f64(quad.dz);
  }
  h.u64(points.size());
  for (const auto& p : points) {
    h.f64(p.x);
    h.f64(p.z);
  }
  return h.value();
}

void save_tensor(const std::filesystem::path& path, std::uint64_t key, const TransferTensor& tensor) {
  atomic_write(path, [&](std::ostream& os) {
    const std::uint64_t n = tensor.elements();
    if (tensor.kind() == ArrayKind::pal) {
      write_header(os, kPayloadTensor, key, 0, n, n, tensor.points());
      for (const auto& h : tensor.matrices()) put_matrix(os, h);
    } else {
      write_header(os, kPayloadTensor, key, 1, tensor.points(), n, 1);
      put_matrix(os, tensor.rows());
    }
  });
}

std::optional<TransferTensor> load_tensor(const std::filesystem::path& path, std::uint64_t key) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  const auto h = read_header(is, kPayloadTensor, key);
  if (!h) return std::nullopt;
  if (h->kind == 0) {
    std::vector<Eigen::MatrixXcd> mats(h->count);
    for (auto& m : mats)
      if (!get_matrix(is, m, h->rows, h->cols)) return std::nullopt;
    return TransferTensor::pal(std::move(mats));
  }
  if (h->kind == 1 && h->count == 1) {
    Eigen::MatrixXcd rows;
    if (!get_matrix(is, rows, h->rows, h->cols)) return std::nullopt;
    return TransferTensor::edl(std::move(rows));
  }
  return std::nullopt;
}

void save_field_table(const std::filesystem::path& path, std::uint64_t key, const UltrasoundFieldTable& table) {
  atomic_write(path, [&](std::ostream& os) {
    write_header(os, kPayloadTable, key, 0, static_cast<std::uint64_t>(table.carrier1.rows()),
                 static_cast<std::uint64_t>(table.carrier1.cols()), 2);
    put_matrix(os, table.carrier1);
    put_matrix(os, table.carrier2);
    for (const auto& p : table.points) {
      put(os, p.x);
      put(os, p.z);
    }
  });
}

std::optional<UltrasoundFieldTable> load_field_table(const std::filesystem::path& path, std::uint64_t key) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  const auto h = read_header(is, kPayloadTable, key);
  if (!h || h->count != 2) return std::nullopt;
  UltrasoundFieldTable t;
  if (!get_matrix(is, t.carrier1, h->rows, h->cols) || !get_matrix(is, t.carrier2, h->rows, h->cols))
    return std::nullopt;
  t.points.resize(h->rows);
  for (auto& p : t.points)
    if (!get(is, p.x) || !get(is, p.z)) return std::nullopt;
  return t;
}

TransferTensor cached_pal_tensor(const std::filesystem::path& dir, const ArrayGeometry& geometry,
                                 const MediumParams& medium, const FrequencyPlan& plan, const QuadratureSpec& quad,
                                 std::span<const Point2> points) {
  if (dir.empty()) return assemble_pal_tensor(geometry, medium, plan, quad, points);
  const auto key = cache_key(ArrayKind::pal, geometry, medium, plan, quad, points);
  const auto path = cache_path(dir, "pal", key);
  if (auto hit = load_tensor(path, key)) return std::move(*hit);
  TransferTensor t = assemble_pal_tensor(geometry, medium, plan, quad, points);
  save_tensor(path, key, t);
  return t;
}

TransferTensor cached_edl_vector(const std::filesystem::path& dir, const ArrayGeometry& geometry,
                                 const MediumParams& medium, const FrequencyPlan& plan,
                                 std::span<const Point2> points) {
  if (dir.empty()) return assemble_edl_vector(geometry, medium, plan, points);
  const auto key = cache_key(ArrayKind::edl, geometry, medium, plan, QuadratureSpec{}, points);
  const auto path = cache_path(dir, "edl", key);
  if (auto hit = load_tensor(path, key)) return std::move(*hit);
  TransferTensor t = assemble_edl_vector(geometry, medium, plan, points);
  save_tensor(path, key, t);
  return t;
}

}  // namespace palzone
