#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "palzone/config_io.hpp"
#include "palzone/report.hpp"
#include "palzone/tensor_cache.hpp"

using namespace palzone;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("palzone_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> errors_of(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

}  // namespace

TEST_SUITE("config_io") {
  TEST_CASE("defaults round-trip through JSON") {
    const ExperimentConfig c;
    CHECK(config_from_json(config_to_json(c)) == c);
    CHECK(config_from_json(json::object()) == c);
  }

  TEST_CASE("partial documents override only the given fields") {
    const json j = json::parse(R"({"array": {"n_elements": 8}, "perturbation": {"snr_db": "inf", "snr_grid": [20, null]}})");
    const ExperimentConfig c = config_from_json(j);
    CHECK(c.array.n_elements == 8);
    CHECK(c.array.element_width == 0.01);
    CHECK(std::isinf(c.perturbation.snr_db));
    CHECK(std::isinf(c.perturbation.snr_grid[1]));
    CHECK(config_from_json(config_to_json(c)) == c);
  }

  TEST_CASE("unknown keys and type errors carry their path") {
    const auto e = errors_of(json::parse(R"({"arary": 1, "bright": {"nx": "ten"}, "medium": {"rho0": true}})"));
    CHECK(e.size() == 3);
    CHECK(std::find(e.begin(), e.end(), "arary: unknown key") != e.end());
    CHECK(std::find(e.begin(), e.end(), "bright.nx: expected an integer") != e.end());
    CHECK(std::find(e.begin(), e.end(), "medium.rho0: expected a number") != e.end());
    CHECK(errors_of(json::parse(R"({"dark": {"nz": -2}})")).size() == 1);
    CHECK(errors_of(json::array()).size() == 1);
  }

  TEST_CASE("dotted overrides") {
    json j = json::object();
    apply_override(j, "optimizer.n_itr=50");
    apply_override(j, "audio_frequencies=[1000,8000]");
    apply_override(j, "perturbation.snr_db=inf");
    const ExperimentConfig c = config_from_json(j);
    CHECK(c.optimizer.n_itr == 50);
    CHECK(c.audio_frequencies == std::vector<double>{1000, 8000});
    CHECK(std::isinf(c.perturbation.snr_db));
    CHECK_THROWS_AS(apply_override(j, "novalue"), ConfigError);
    CHECK_THROWS_AS(apply_override(j, "optimizer..seed=1"), ConfigError);
  }

  TEST_CASE("load_config reads files and reports parse errors") {
    const fs::path dir = scratch_dir("config");
    std::ofstream(dir / "good.json") << R"({"f_center": 41000, "optimizer": {"seed": 9}})";
    std::ofstream(dir / "bad.json") << R"({"f_center": )";
    const ExperimentConfig c = load_config(dir / "good.json", {"optimizer.seed=10"});
    CHECK(c.f_center == 41000.0);
    CHECK(c.optimizer.seed == 10);
    CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  }
}

TEST_SUITE("tensor_cache") {
  TEST_CASE("tensors round-trip and stale entries are rejected") {
    const fs::path dir = scratch_dir("cache");
    std::vector<Eigen::MatrixXcd> mats{Eigen::MatrixXcd::Random(3, 3), Eigen::MatrixXcd::Random(3, 3)};
    const TransferTensor pal = TransferTensor::pal(mats);
    const TransferTensor edl = TransferTensor::edl(Eigen::MatrixXcd::Random(4, 3));
    save_tensor(dir / "pal.pzc", 11, pal);
    save_tensor(dir / "edl.pzc", 12, edl);

    const auto p = load_tensor(dir / "pal.pzc", 11);
    REQUIRE(p.has_value());
    CHECK(p->kind() == ArrayKind::pal);
    CHECK(p->matrix(1) == mats[1]);
    const auto e = load_tensor(dir / "edl.pzc", 12);
    REQUIRE(e.has_value());
    CHECK(e->rows() == edl.rows());

    CHECK(!load_tensor(dir / "pal.pzc", 99).has_value());
    CHECK(!load_tensor(dir / "nothing.pzc", 11).has_value());

    // Bump the version field in place.
    {
      std::fstream f(dir / "pal.pzc", std::ios::in | std::ios::out | std::ios::binary);
      f.seekp(8);
      const std::uint32_t v = kCacheVersion + 1;
      f.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    CHECK(!load_tensor(dir / "pal.pzc", 11).has_value());

    // Truncation.
    fs::resize_file(dir / "edl.pzc", fs::file_size(dir / "edl.pzc") - 8);
    CHECK(!load_tensor(dir / "edl.pzc", 12).has_value());
  }

  TEST_CASE("field tables round-trip") {
    const fs::path dir = scratch_dir("table");
    UltrasoundFieldTable t;
    t.points = {{0.1, 0.2}, {0.3, 0.4}};
    t.carrier1 = Eigen::MatrixXcd::Random(2, 3);
    t.carrier2 = Eigen::MatrixXcd::Random(2, 3);
    save_field_table(dir / "t.pzc", 5, t);
    const auto r = load_field_table(dir / "t.pzc", 5);
    REQUIRE(r.has_value());
    CHECK(r->points == t.points);
    CHECK(r->carrier2 == t.carrier2);
    CHECK(!load_tensor(dir / "t.pzc", 5).has_value());
  }

  TEST_CASE("cache keys separate every input") {
    const auto g = ArrayGeometry::uniform(2, 0.01);
    const std::vector<Point2> pts{{0.0, 0.5}};
    const MediumParams m;
    const FrequencyPlan plan{40000.0, 1000.0};
    const QuadratureSpec q;
    const auto k = cache_key(ArrayKind::pal, g, m, plan, q, pts);
    CHECK(k == cache_key(ArrayKind::pal, g, m, plan, q, pts));
    CHECK(k != cache_key(ArrayKind::edl, g, m, plan, q, pts));
    CHECK(k != cache_key(ArrayKind::pal, g, m, {40000.0, 2000.0}, q, pts));
    QuadratureSpec q2 = q;
    q2.dx = 0.5 * q.dx;
    CHECK(k != cache_key(ArrayKind::pal, g, m, plan, q2, pts));
    MediumParams m2 = m;
    m2.alpha_override = 0.0;
    CHECK(k != cache_key(ArrayKind::pal, g, m2, plan, q, pts));
    const std::vector<Point2> other{{0.0, 0.6}};
    CHECK(k != cache_key(ArrayKind::pal, g, m, plan, q, other));
  }

  TEST_CASE("cached assembly equals direct assembly") {
    const fs::path dir = scratch_dir("cached");
    const auto g = ArrayGeometry::uniform(2, 0.01);
    QuadratureSpec q;
    q.x_min = -0.05, q.x_max = 0.05, q.z_max = 0.1, q.dx = q.dz = 0.005;
    const std::vector<Point2> pts{{0.0, 0.08}};
    const FrequencyPlan plan{40000.0, 1000.0};
    const TransferTensor first = cached_pal_tensor(dir, g, MediumParams{}, plan, q, pts);
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
    const TransferTensor second = cached_pal_tensor(dir, g, MediumParams{}, plan, q, pts);
    CHECK(first.matrix(0) == second.matrix(0));
    CHECK(first.matrix(0) == assemble_pal_tensor(g, MediumParams{}, plan, q, pts).matrix(0));
  }
}

TEST_SUITE("report") {
  TEST_CASE("fixed formatting") {
    CHECK(fixed(1.5, 3) == "1.500");
    CHECK(fixed(-0.0000001, 3) == "0.000");
    CHECK(fixed(INFINITY) == "inf");
    CHECK(fixed(-INFINITY) == "-inf");
    CHECK(fixed(NAN) == "nan");
  }

  TEST_CASE("csv shapes") {
    std::vector<ConvergenceRun> runs{{1000.0, {1.0, 2.0, 3.0}}, {2000.0, {4.0, 5.0, 6.0}}};
    const std::string c = convergence_csv(runs);
    CHECK(c.rfind("frequency_hz,iteration,contrast_db\n", 0) == 0);
    CHECK(std::count(c.begin(), c.end(), '\n') == 7);
    CHECK(c.find("2000.000,3,6.000000\n") != std::string::npos);

    std::vector<Design> designs(4);
    const std::string t = contrast_table_csv(designs);
    CHECK(std::count(t.begin(), t.end(), '\n') == 9);

    FieldMap f;
    f.grid.x_min = 0, f.grid.x_max = 0.02, f.grid.z_min = 0, f.grid.z_max = 0.01, f.grid.step = 0.005;
    f.spl_db.assign(8, 50.0);
    const std::string fc = field_csv(f);
    CHECK(fc.rfind("# nx=4 nz=2 ", 0) == 0);
    CHECK(std::count(fc.begin(), fc.end(), '\n') == 10);
  }

  TEST_CASE("robustness csv row count") {
    SweepCell cell;
    cell.f_audio = 1000.0;
    cell.pal.contrasts = {1, 2, 3};
    cell.edl.contrasts = {4, 5, 6};
    const std::string r = robustness_csv({cell, cell});
    CHECK(std::count(r.begin(), r.end(), '\n') == 1 + 2 * 3 * 2);
    CHECK(r.rfind("frequency_hz,snr_db,phase_range_deg,trial,array_kind,contrast_db\n", 0) == 0);
    const std::string s = robustness_summary_csv({cell});
    CHECK(std::count(s.begin(), s.end(), '\n') == 3);
  }

  TEST_CASE("svg output") {
    CHECK(viridis(0.0) == "#440154");
    CHECK(viridis(1.0) == "#fde725");
    FieldMap f;
    f.grid.x_min = -0.1, f.grid.x_max = 0.1, f.grid.z_min = 0, f.grid.z_max = 0.1, f.grid.step = 0.05;
    f.spl_db = {10, 20, 30, 40, 50, 60, 70, 80};
    const std::string h = heatmap_svg(f, Zone{-0.1, 0.0, 0.02, 0.08, 1, 1}, Zone{0.0, 0.1, 0.02, 0.08, 1, 1});
    CHECK(h.find("stroke=\"white\"") != std::string::npos);
    CHECK(h.find("stroke=\"black\"") != std::string::npos);
    CHECK(h.find("SPL (dB)") != std::string::npos);
    const std::string l = line_plot_svg({"t", "x", "y", {{"a", "#000000", {1, 2}, {3, 4}, {0.5, 0.5}, false}}});
    CHECK(l.find("<polyline") != std::string::npos);
    CHECK(l.rfind("<svg", 0) == 0);
  }
}

TEST_SUITE("config_io") {
  TEST_CASE("shipped default config matches the built-in defaults") {
    CHECK(load_config(fs::path(PALZONE_SOURCE_DIR) / "configs" / "default.json") == ExperimentConfig{});
  }
}
