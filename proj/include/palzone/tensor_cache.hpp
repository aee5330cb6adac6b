#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>

#include "palzone/field_solver.hpp"

namespace palzone {

// Binary cache layout, little-endian:
//   char[8]  magic      "PZCACHE\0"
//   uint32   version    kCacheVersion
//   uint32   payload    1 = TransferTensor, 2 = UltrasoundFieldTable
//   uint64   key        cache_key(...) of the inputs
//   uint32   kind       0 = PAL, 1 = EDL (tensors); 0 (tables)
//   uint64   rows, cols, count
//   double[] data       interleaved (re, im), column-major per matrix
// A table stores its point list (x, z pairs) after the two carrier matrices.
inline constexpr std::uint32_t kCacheVersion = 2;

/// FNV-1a over the bit patterns of every input that determines the result.
std::uint64_t cache_key(ArrayKind kind, const ArrayGeometry& geometry, const MediumParams& medium,
                        const FrequencyPlan& plan, const QuadratureSpec& quad, std::span<const Point2> points);

void save_tensor(const std::filesystem::path& path, std::uint64_t key, const TransferTensor& tensor);

/// Empty when the file is missing, truncated, of another version, or keyed differently.
std::optional<TransferTensor> load_tensor(const std::filesystem::path& path, std::uint64_t key);

void save_field_table(const std::filesystem::path& path, std::uint64_t key, const UltrasoundFieldTable& table);
std::optional<UltrasoundFieldTable> load_field_table(const std::filesystem::path& path, std::uint64_t key);

/// Loads `<dir>/<kind>-<key>.pzc` or assembles and stores it. An empty `dir` disables caching.
TransferTensor cached_pal_tensor(const std::filesystem::path& dir, const ArrayGeometry& geometry,
                                 const MediumParams& medium, const FrequencyPlan& plan, const QuadratureSpec& quad,
                                 std::span<const Point2> points);
TransferTensor cached_edl_vector(const std::filesystem::path& dir, const ArrayGeometry& geometry,
                                 const MediumParams& medium, const FrequencyPlan& plan,
                                 std::span<const Point2> points);

}  // namespace palzone
