#include <doctest.h>

#include <cmath>
#include <random>

#include "palzone/acc_optimizer.hpp"
#include "palzone/hermitian_eigen.hpp"

using namespace palzone;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n;
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cd(n(rng), n(rng));
  return m;
}

Eigen::VectorXcd random_unit(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::VectorXcd v = random_matrix(rng, n, 1);
  return v / v.norm();
}

Eigen::MatrixXcd random_psd(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank) {
  const Eigen::MatrixXcd x = random_matrix(rng, n, rank);
  return x * x.adjoint();
}

double quotient(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, const Eigen::VectorXcd& v) {
  return (v.adjoint() * a * v)(0).real() / (v.adjoint() * b * v)(0).real();
}

TransferTensor random_pal(std::mt19937_64& rng, std::size_t points, Eigen::Index n) {
  std::vector<Eigen::MatrixXcd> m;
  for (std::size_t i = 0; i < points; ++i) m.push_back(random_matrix(rng, n, n));
  return TransferTensor::pal(std::move(m));
}

// Quotient of the PAL contrast summed term by term.
double brute_contrast(const ZonedTensor& t, const SourcePair& d) {
  double eb = 0.0, ed = 0.0;
  for (const auto* zone : {&t.bright, &t.dark})
    for (std::size_t m = 0; m < zone->points(); ++m) {
      cd p = 0.0;
      const auto& h = zone->matrix(m);
      for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) p += std::conj(d.s1[i]) * h(i, j) * d.s2[j];
      (zone == &t.bright ? eb : ed) += std::norm(p);
    }
  return 10.0 * std::log10(eb / ed);
}

}  // namespace

TEST_SUITE("acc_optimizer") {
  TEST_CASE("cholesky and jacobi basics") {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXcd b = random_psd(rng, 5, 5) + Eigen::MatrixXcd::Identity(5, 5);
    const Eigen::MatrixXcd l = cholesky_lower(b);
    CHECK((l * l.adjoint() - b).norm() < 1e-12 * b.norm());
    CHECK_THROWS_AS(cholesky_lower(-Eigen::MatrixXcd::Identity(2, 2)), CholeskyError);

    const HermitianEigen e = jacobi_eigen(b);
    CHECK((e.vectors.adjoint() * e.vectors - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-12);
    CHECK((b * e.vectors - e.vectors * e.values.cast<cd>().asDiagonal()).norm() < 1e-10 * b.norm());
  }

  TEST_CASE("diagonal pair") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 1.0;
    const auto r = max_generalized_eigenpair(a, Eigen::MatrixXcd::Identity(2, 2), 0.0);
    CHECK(r.eigenvalue == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(r.eigenvector[0]) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.eigenvector[0].imag() == 0.0);
    CHECK(!r.degenerate);
  }

  TEST_CASE("identical pair is degenerate with eigenvalue one") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXcd a = random_psd(rng, 4, 4) + 0.1 * Eigen::MatrixXcd::Identity(4, 4);
    const auto r = max_generalized_eigenpair(a, a, 0.0);
    CHECK(r.eigenvalue == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(quotient(a, a, r.eigenvector) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.degenerate);
  }

  TEST_CASE("random PSD pairs: quotient, residual and probe oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXcd a = random_psd(rng, 3, 2);
      const Eigen::MatrixXcd b = random_psd(rng, 3, 3);
      const auto r = max_generalized_eigenpair(a, b, 0.0);
      CHECK(r.eigenvector.norm() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(quotient(a, b, r.eigenvector) == doctest::Approx(r.eigenvalue).epsilon(1e-10));
      const Eigen::VectorXcd res = a * r.eigenvector - r.eigenvalue * (b * r.eigenvector);
      CHECK(res.norm() <= 1e-8 * (a.norm() + r.eigenvalue * b.norm()));
      for (int p = 0; p < 1000; ++p) CHECK(quotient(a, b, random_unit(rng, 3)) <= r.eigenvalue * (1 + 1e-12));
    }
  }

  TEST_CASE("ridge escalation recovers from a singular B") {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXcd a = random_psd(rng, 4, 4);
    const Eigen::MatrixXcd b = random_psd(rng, 4, 1);  // rank one
    const auto r = max_generalized_eigenpair_regularized(a, b, 1e-10);
    CHECK(r.ridge > 0.0);
    CHECK(std::isfinite(r.eigenvalue));
    CHECK_THROWS_AS(max_generalized_eigenpair_regularized(Eigen::MatrixXcd::Zero(2, 2), Eigen::MatrixXcd::Zero(2, 2), 1e-10),
                    NumericalError);
  }

  TEST_CASE("G matrices") {
    std::mt19937_64 rng(13);
    const TransferTensor one = random_pal(rng, 1, 2);
    const Eigen::VectorXcd s = random_unit(rng, 2);
    const Eigen::MatrixXcd g1 = build_g_matrix(one, s, FixedVector::s1);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(g1);
    int nonzero = 0;
    for (auto ev : es.eigenvalues()) {
      CHECK(ev.real() >= -1e-12 * g1.norm());
      if (std::abs(ev) > 1e-10 * g1.norm()) ++nonzero;
    }
    CHECK(nonzero == 1);

    const TransferTensor three = random_pal(rng, 3, 2);
    const Eigen::MatrixXcd g = build_g_matrix(three, s, FixedVector::s1);
    const Eigen::MatrixXcd h = build_g_matrix(three, s, FixedVector::s2);
    CHECK((g - g.adjoint()).norm() <= 1e-12 * g.norm());
    Eigen::MatrixXcd g_ref = Eigen::MatrixXcd::Zero(2, 2), h_ref = Eigen::MatrixXcd::Zero(2, 2);
    for (const auto& hm : three.matrices()) {
      g_ref += hm.adjoint() * s * s.adjoint() * hm;
      h_ref += hm * s * s.adjoint() * hm.adjoint();
    }
    CHECK((g - g_ref).norm() < 1e-13 * g_ref.norm());
    CHECK((h - h_ref).norm() < 1e-13 * h_ref.norm());
    CHECK_THROWS_AS(build_g_matrix(three, Eigen::VectorXcd::Zero(2), FixedVector::s1), std::invalid_argument);
  }

  TEST_CASE("contrast definition") {
    std::mt19937_64 rng(17);
    const TransferTensor b = random_pal(rng, 3, 2);
    const TransferTensor d = random_pal(rng, 4, 2);
    const SourcePair drives = SourcePair::pal(random_unit(rng, 2), random_unit(rng, 2));
    CHECK(acoustic_contrast({b, b}, drives) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    const ZonedTensor t{b, d};
    const double c = acoustic_contrast(t, drives);
    CHECK(c == doctest::Approx(brute_contrast(t, drives)).epsilon(1e-12));
    const SourcePair scaled = SourcePair::pal(cd(3, -2) * drives.s1, cd(-0.1, 0.5) * drives.s2);
    CHECK(std::abs(acoustic_contrast(t, scaled) - c) < 1e-12);
  }

  TEST_CASE("single-element PAL contrast is the energy ratio") {
    std::vector<Eigen::MatrixXcd> hb{Eigen::MatrixXcd::Constant(1, 1, cd(2, 1))};
    std::vector<Eigen::MatrixXcd> hd{Eigen::MatrixXcd::Constant(1, 1, cd(0.1, -0.2))};
    const ZonedTensor t{TransferTensor::pal(hb), TransferTensor::pal(hd)};
    const auto r = acc_pal(t, {10, 1, 1e-10, 1});
    const double expected = 10 * std::log10(5.0 / 0.05);
    for (double h : r.history) CHECK(h == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("acc_pal: monotone, half-step optimal, deterministic") {
    std::mt19937_64 rng(19);
    const ZonedTensor t{random_pal(rng, 6, 3), random_pal(rng, 6, 3)};
    const AccOptions opts{40, 5, 1e-10, 1};
    const auto r = acc_pal(t, opts);
    REQUIRE(r.history.size() == 40);
    CHECK(r.iterations_run == 40);
    for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] >= r.history[i - 1] - 1e-9);
    CHECK(r.drives.s1.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.drives.s2.norm() == doctest::Approx(1.0).epsilon(1e-14));

    // s1 is the last eigen-step: nothing beats it with s2 held fixed.
    for (int p = 0; p < 1000; ++p)
      CHECK(acoustic_contrast(t, SourcePair::pal(random_unit(rng, 3), r.drives.s2)) <= r.contrast_db + 1e-9);

    const auto again = acc_pal(t, opts);
    CHECK(again.history == r.history);
    CHECK(again.drives.s1 == r.drives.s1);

    const SourcePair gauge = SourcePair::pal(std::polar(1.0, 0.3) * r.drives.s1, std::polar(1.0, -2.0) * r.drives.s2);
    CHECK(std::abs(acoustic_contrast(t, gauge) - r.contrast_db) < 1e-12);
  }

  TEST_CASE("acc_pal beats random drive pairs on a two-element instance") {
    std::mt19937_64 rng(23);
    const ZonedTensor t{random_pal(rng, 4, 2), random_pal(rng, 4, 2)};
    const auto r = acc_pal(t, {200, 1, 1e-10, 1});
    double best = -INFINITY;
    for (int p = 0; p < 10000; ++p)
      best = std::max(best, acoustic_contrast(t, SourcePair::pal(random_unit(rng, 2), random_unit(rng, 2))));
    CHECK(r.contrast_db >= best - 1e-9);
  }

  TEST_CASE("multi-start keeps the best run") {
    std::mt19937_64 rng(29);
    const ZonedTensor t{random_pal(rng, 5, 4), random_pal(rng, 5, 4)};
    const auto one = acc_pal(t, {30, 2, 1e-10, 1});
    const auto many = acc_pal(t, {30, 2, 1e-10, 4});
    CHECK(many.contrast_db >= one.contrast_db);
    CHECK_THROWS_AS(acc_pal(t, {0, 2, 1e-10, 1}), std::invalid_argument);
  }

  TEST_CASE("acc_edl matches the closed-form rank-one quotient") {
    Eigen::MatrixXcd hb(1, 2), hd(1, 2);
    hb << cd(1, 0.5), cd(-0.3, 0.8);
    hd << cd(0.2, -0.1), cd(0.6, 0.4);
    const ZonedTensor t{TransferTensor::edl(hb), TransferTensor::edl(hd)};
    const Eigen::MatrixXcd a = edl_energy_matrix(t.bright);
    const Eigen::MatrixXcd b = edl_energy_matrix(t.dark);
    // s^H A s = |h^T s|^2
    const Eigen::VectorXcd s = Eigen::VectorXcd::Ones(2) / std::sqrt(2.0);
    CHECK((s.adjoint() * a * s)(0).real() == doctest::Approx(std::norm((hb * s)(0))).epsilon(1e-14));

    const double ridge = 1e-3;
    const auto pair = max_generalized_eigenpair(a, b, ridge);
    // For A = u u^H the maximum is u^H (B + ridge I)^{-1} u with u = conj(h_b).
    const Eigen::VectorXcd u = hb.row(0).adjoint();
    Eigen::MatrixXcd breg = b + ridge * Eigen::MatrixXcd::Identity(2, 2);
    const double closed = (u.adjoint() * breg.inverse() * u)(0).real();
    CHECK(pair.eigenvalue == doctest::Approx(closed).epsilon(1e-10));

    const auto r = acc_edl(t);
    CHECK(r.history.size() == 1);
    CHECK(r.iterations_run == 1);
    // Scaling invariance needs a nonsingular dark matrix.
    Eigen::MatrixXcd hd2(2, 2);
    hd2 << cd(0.2, -0.1), cd(0.6, 0.4), cd(-0.5, 0.3), cd(0.1, 0.9);
    const ZonedTensor full{TransferTensor::edl(hb), TransferTensor::edl(hd2)};
    const ZonedTensor scaled{TransferTensor::edl(cd(5, 2) * hb), TransferTensor::edl(cd(5, 2) * hd2)};
    CHECK(acc_edl(scaled).contrast_db == doctest::Approx(acc_edl(full).contrast_db).epsilon(1e-12));
  }

  TEST_CASE("acc_edl beats random drives") {
    std::mt19937_64 rng(31);
    const ZonedTensor t{TransferTensor::edl(random_matrix(rng, 8, 4)), TransferTensor::edl(random_matrix(rng, 8, 4))};
    const auto r = acc_edl(t);
    for (int p = 0; p < 1000; ++p)
      CHECK(acoustic_contrast(t, SourcePair::edl(random_unit(rng, 4))) <= r.contrast_db + 1e-9);
  }

  TEST_CASE("zero dark energy is clamped") {
    std::vector<Eigen::MatrixXcd> hb{Eigen::MatrixXcd::Identity(2, 2)};
    std::vector<Eigen::MatrixXcd> hd{Eigen::MatrixXcd::Zero(2, 2)};
    const ZonedTensor t{TransferTensor::pal(hb), TransferTensor::pal(hd)};
    const SourcePair d = SourcePair::pal(Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(2, 0));
    CHECK(acoustic_contrast(t, d) == kContrastClampDb);
    const ZonedTensor both{TransferTensor::pal(hd), TransferTensor::pal(hd)};
    CHECK_THROWS_AS(acoustic_contrast(both, d), std::domain_error);
  }
}
