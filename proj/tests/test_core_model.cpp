#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "palzone/core_model.hpp"

using namespace palzone;

namespace {

bool has_violation(const ConfigError& e, const std::string& needle) {
  return std::any_of(e.violations().begin(), e.violations().end(),
                     [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

std::vector<std::string> violations_of(const ExperimentConfig& c) {
  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

// ISO 9613-1 at 20 C, 70 % RH, 101.325 kPa, evaluated independently (Np/m).
struct IsoRef {
  double f, alpha;
};
constexpr IsoRef kIso[] = {
    {1000.0, 0.00057308437108083}, {2000.0, 0.00104069029705164}, {4000.0, 0.0026578131849678},
    {8000.0, 0.0089377334947075},  {39500.0, 0.14538410532866},   {40000.0, 0.148005144443553},
    {40500.0, 0.150624890627903},  {44000.0, 0.16890038170629},
};

}  // namespace

TEST_SUITE("core_model") {
  TEST_CASE("default configuration validates") {
    const Model m = validate_config(ExperimentConfig{});
    CHECK(m.geometry.n_elements == 24);
    CHECK(m.geometry.element_centers.size() == 24);
    CHECK(m.plans.size() == 4);
    CHECK(m.bright_points.size() == 100);
    CHECK(m.dark_points.size() == 100);
  }

  TEST_CASE("validation is idempotent") {
    const Model a = validate_config(ExperimentConfig{});
    const Model b = validate_config(a.config);
    CHECK(a == b);
  }

  TEST_CASE("audio frequency above the carrier is rejected with a field path") {
    ExperimentConfig c;
    c.audio_frequencies = {1000.0, 50000.0};
    const auto v = violations_of(c);
    REQUIRE(!v.empty());
    CHECK(std::find(v.begin(), v.end(), "audio_frequencies[1]: f_audio < f_center violated") != v.end());
  }

  TEST_CASE("degenerate zone names the offending field") {
    ExperimentConfig c;
    c.bright.nx = 0;
    try {
      validate_config(c);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(has_violation(e, "bright.nx"));
    }
  }

  TEST_CASE("every violation is reported at once") {
    ExperimentConfig c;
    c.medium.rho0 = -1.0;
    c.medium.humidity_pct = 120.0;
    c.array.n_elements = 0;
    c.dark.z_min = 2.0;
    const auto v = violations_of(c);
    CHECK(v.size() >= 4);
  }

  TEST_CASE("frequency plan is symmetric about the centre frequency") {
    for (double fa : {1000.0, 2000.0, 4000.0, 8000.0, 333.3}) {
      const FrequencyPlan p{40000.0, fa};
      CHECK(p.f2() - p.f1() == doctest::Approx(fa).epsilon(1e-12));
      CHECK(p.f1() + p.f2() == doctest::Approx(80000.0).epsilon(1e-15));
    }
  }

  TEST_CASE("uniform geometry is closely packed and centred") {
    const auto g = ArrayGeometry::uniform(24, 0.01);
    for (std::size_t i = 0; i < 24; ++i) CHECK(g.element_centers[i] == -g.element_centers[23 - i]);
    for (std::size_t i = 1; i < 24; ++i)
      CHECK(g.element_centers[i] - g.element_centers[i - 1] == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(g.aperture_min() == doctest::Approx(-0.12));
    CHECK(g.aperture_max() == doctest::Approx(0.12));
  }

  TEST_CASE("zone control points cover the rectangle edges") {
    const Zone z{-0.6, -0.3, 0.6, 0.9, 10, 10};
    const auto pts = z.control_points();
    REQUIRE(pts.size() == 100);
    for (const auto& p : pts) CHECK(z.contains(p));
    CHECK(pts.front().x == doctest::Approx(-0.6));
    CHECK(pts.back().z == doctest::Approx(0.9));
    const Zone single{0.0, 1.0, 1.0, 2.0, 1, 1};
    CHECK(single.control_points().front() == Point2{0.5, 1.5});
  }

  TEST_CASE("absorption matches ISO 9613-1 reference values") {
    const MediumParams m;
    for (const auto& r : kIso) {
      CAPTURE(r.f);
      CHECK(absorption_coefficient(m, r.f) == doctest::Approx(r.alpha).epsilon(1e-9));
    }
    // 1 kHz, 20 C, 70 %: 4.98 dB/km in the published table.
    CHECK(absorption_coefficient(m, 1000.0) * 20.0 / std::log(10.0) * 1000.0 == doctest::Approx(4.98).epsilon(0.002));
  }

  TEST_CASE("absorption override and monotonicity") {
    MediumParams m;
    double prev = 0.0;
    for (double f = 30000.0; f <= 50000.0; f += 250.0) {
      const double a = absorption_coefficient(m, f);
      CHECK(a > prev);
      prev = a;
    }
    m.alpha_override = 0.0;
    CHECK(absorption_coefficient(m, 40000.0) == 0.0);
    CHECK_THROWS_AS(absorption_coefficient(m, 0.0), std::domain_error);
  }
}
