#include "doctest.h"

#include <cmath>

#include "qtherm/demux.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/model.hpp"
#include "qtherm/oracle.hpp"

using namespace qtherm;
using model::DiffractionGeometry;
using model::SourcePair;

TEST_SUITE("model") {

TEST_CASE("derive_params: equal temperatures give gamma = 0") {
  for (double t : {0.3, 1.0, 7.5}) {
    auto dp = model::derive_params({t, t, 1.0, 0.5});
    CHECK(dp.gamma == 0.0);
    CHECK(dp.n_total == doctest::Approx(1.0 / std::expm1(1.0 / t)).epsilon(1e-14));
  }
}

TEST_CASE("derive_params: cold first source limit") {
  // T1 -> 0+: chi1 -> inf, gamma -> +1, N -> (1/2)/(chi2 - 1)
  auto dp = model::derive_params({0.02, 1.0, 1.0, 1.0});
  CHECK(dp.gamma > 0.999999);
  CHECK(dp.n_total == doctest::Approx(0.5 / std::expm1(1.0)).epsilon(1e-9));
}

TEST_CASE("derive_params: frozen high-precision point") {
  // omega=10, T1=8, T2=10, checked against 40-digit evaluation of the
  // defining occupancy formulas.
  auto dp = model::derive_params({8.0, 10.0, 10.0, 0.5});
  CHECK(dp.chi1 == doctest::Approx(3.490342957461841376).epsilon(1e-15));
  CHECK(dp.chi2 == doctest::Approx(2.718281828459045235).epsilon(1e-15));
  CHECK(dp.gamma == doctest::Approx(0.1834473654162690861).epsilon(1e-14));
  CHECK(dp.n_total == doctest::Approx(0.4917639126811696521).epsilon(1e-14));
}

TEST_CASE("derive_params: invariants on a grid") {
  for (double t1 : {0.1, 0.9, 4.0})
    for (double t2 : {0.2, 1.1, 9.0}) {
      auto dp = model::derive_params({t1, t2, 1.0, 0.7});
      CHECK(dp.chi1 > 1.0);
      CHECK(dp.chi2 > 1.0);
      CHECK(std::fabs(dp.gamma) < 1.0);
      CHECK(dp.n_total > 0.0);
      // per-source populations N(1 -+ gamma) recover the occupancies
      CHECK(dp.n_total * (1.0 - dp.gamma) ==
            doctest::Approx(1.0 / dp.chi1m1).epsilon(1e-12));
      CHECK(dp.n_total * (1.0 + dp.gamma) ==
            doctest::Approx(1.0 / dp.chi2m1).epsilon(1e-12));
      if (t1 == t2) CHECK(dp.gamma == 0.0);
    }
}

TEST_CASE("derive_params: rejects bad input") {
  CHECK_THROWS_AS(model::derive_params({-1.0, 1.0, 1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(model::derive_params({1.0, 0.0, 1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(model::derive_params({1.0, 1.0, -2.0, 0.5}), DomainError);
  CHECK_THROWS_AS(model::derive_params({1.0, 1.0, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(model::derive_params({1.0, 1.0, 1.0, 1.5}), DomainError);
  // chi overflow guard: T below omega/700
  CHECK_THROWS_AS(model::derive_params({1.0, 1.0, 800.0, 0.5}), RangeError);
}

TEST_CASE("gaussian_overlap: endpoints and monotone decay") {
  CHECK(model::gaussian_overlap(0.0, 1.0) == 1.0);
  double prev = 1.0;
  for (double d = 0.5; d < 12.0; d += 0.5) {
    double s = model::gaussian_overlap(d, 2.0);
    CHECK(s > 0.0);
    CHECK(s < prev);
    prev = s;
  }
  CHECK(model::gaussian_overlap(40.0, 1.0) < 1e-100);
  CHECK_THROWS_AS(model::gaussian_overlap(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(model::gaussian_overlap(-1.0, 1.0), DomainError);
}

TEST_CASE("gaussian_overlap: matches independent quadrature at d = 2 varpi") {
  // frozen from 40-digit quadrature of the overlap integral
  double s = model::gaussian_overlap(2.0, 1.0);
  CHECK(s == doctest::Approx(0.1353352832366126919).epsilon(1e-10));
  // scale invariance: only d/varpi matters
  CHECK(model::gaussian_overlap(5.0, 2.5) == doctest::Approx(s).epsilon(1e-10));
  // against the Romberg oracle at several separations
  for (double d : {0.25, 1.0, 3.5}) {
    CHECK(model::gaussian_overlap(d, 1.0) ==
          doctest::Approx(oracle::quadrature_overlap(d, 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("geometry: overlap vs separation forms agree") {
  auto g1 = DiffractionGeometry::from_separation(2.0, 1.0);
  auto g2 = DiffractionGeometry::from_overlap(g1.overlap());
  auto [d, varpi] = g2.demux_geometry();
  CHECK(d / varpi == doctest::Approx(2.0).epsilon(1e-7));
  CHECK_THROWS_AS(g2.separation(), UsageError);
  CHECK_THROWS_AS(DiffractionGeometry::from_overlap(1.5), DomainError);
  CHECK_THROWS_AS(DiffractionGeometry::from_overlap(-0.1), DomainError);
}

TEST_CASE("build_image_state: gamma = 0 gives a diagonal P matrix") {
  auto st = model::build_image_state({1.0, 1.0, 1.0, 0.5},
                                     DiffractionGeometry::from_overlap(0.3));
  CHECK(st.pmatrix(0, 1) == 0.0);
  CHECK(st.cov(0, 1) == 0.0);
  CHECK(st.cov(2, 3) == 0.0);
}

TEST_CASE("build_image_state: s = 1 leaves the minus mode in vacuum") {
  auto st = model::build_image_state({0.8, 1.2, 1.0, 0.5},
                                     DiffractionGeometry::from_overlap(1.0));
  CHECK(st.n_minus == 0.0);
  CHECK(st.cov(1, 1) == 1.0);
  CHECK(st.cov(3, 3) == 1.0);
  CHECK(st.cov(0, 1) == 0.0);
}

TEST_CASE("build_image_state: invariants") {
  SourcePair pair{0.8, 1.2, 1.0, 0.5};
  for (double s : {0.0, 0.25, 0.7, 1.0}) {
    auto st = model::build_image_state(pair, DiffractionGeometry::from_overlap(s));
    auto dp = model::derive_params(pair);
    CHECK(st.n_plus >= st.n_minus);
    CHECK(st.n_plus + st.n_minus ==
          doctest::Approx(2.0 * dp.n_total * pair.eta).epsilon(1e-14));
    CHECK(st.displacement.norm() == 0.0);
    CHECK((st.cov - st.cov.transpose()).norm() == 0.0);
    // physicality: sigma - I >= 0 and det V >= 0
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(
        st.cov - Eigen::Matrix4d::Identity());
    CHECK(es.eigenvalues()(0) > -1e-12);
    CHECK(st.pmatrix.determinant() >= 0.0);
  }
}

TEST_CASE("build_image_state: covariance matches the Fock oracle") {
  SourcePair pair{8.0, 10.0, 10.0, 0.5};
  auto geom = DiffractionGeometry::from_overlap(0.5);
  auto st = model::build_image_state(pair, geom);
  auto rho = oracle::fock_density(pair, geom, 24);
  CHECK((st.cov - rho.second_moments()).cwiseAbs().maxCoeff() < 1e-8);
  // sign of the cross correlation fixes the -gamma sqrt(N+N-) convention
  double expected = -st.gamma * std::sqrt(st.n_plus * st.n_minus);
  CHECK(rho.cross_correlation() == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("overlap equals the alternating HG coefficient sum") {
  for (double d : {0.5, 1.0, 2.0, 3.0}) {
    double s = model::gaussian_overlap(d, 1.0);
    double s_beta = demux::overlap_from_betas(d, 1.0, 1e-15);
    CHECK(s == doctest::Approx(s_beta).epsilon(1e-8));
  }
}

}  // TEST_SUITE
