#include "doctest.h"

#include <cmath>
#include <random>

#include "qtherm/demux.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/gaussian_fisher.hpp"
#include "qtherm/model.hpp"
#include "qtherm/oracle.hpp"

using namespace qtherm;
using model::DiffractionGeometry;
using model::SourcePair;

TEST_SUITE("demux") {

TEST_CASE("hg_beta: aligned sources concentrate in mode 0") {
  CHECK(demux::hg_beta(0, 0.0, 1.0) == 1.0);
  for (int k : {1, 2, 7}) CHECK(demux::hg_beta(k, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(demux::hg_beta(-1, 1.0, 1.0), UsageError);
  CHECK_THROWS_AS(demux::hg_beta(0, 1.0, -1.0), DomainError);
}

TEST_CASE("hg_beta: normalization and overlap identities") {
  for (double ratio : {0.5, 1.0, 2.0, 3.0}) {
    double sum = 0.0, alt = 0.0;
    for (int k = 0; k <= 40; ++k) {
      double b = demux::hg_beta(k, ratio, 1.0);
      sum += b * b;
      alt += (k % 2 == 0 ? b * b : -b * b);
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
    double s = oracle::quadrature_overlap(ratio, 1.0);
    CHECK(std::fabs(alt - s) < 1e-10);
  }
}

TEST_CASE("hg_beta: paper-literal exponent variant differs by exp(d^2/(4w^2))") {
  double neg = demux::hg_beta(3, 2.0, 1.0, demux::BetaExponent::negative);
  double pos = demux::hg_beta(3, 2.0, 1.0, demux::BetaExponent::paper);
  CHECK(pos / neg == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("mean_photon_hg: zero modes, photon conservation, oracle check") {
  SourcePair pair{1.0, 1.0, 1.0, 0.5};
  CHECK(demux::mean_photon_hg(2, pair, 0.0, 1.0) == 0.0);  // beta_2(0) = 0
  auto dp = model::derive_params(pair);
  double total = 0.0;
  for (int k = 0; k <= 60; ++k) total += demux::mean_photon_hg(k, pair, 1.0, 1.0);
  CHECK(total == doctest::Approx(2.0 * dp.n_total * pair.eta).epsilon(1e-12));

  // <N_0> against the Fock expectation of g0^2 n+
  auto geom = DiffractionGeometry::from_separation(1.0, 1.0);
  auto rho = oracle::fock_density(pair, geom, 24);
  double s = geom.overlap();
  double b0 = demux::hg_beta(0, 1.0, 1.0);
  double g0sq = 2.0 * b0 * b0 / (1.0 + s);
  double fock_mean = g0sq * rho.expect(oracle::sector_n_plus);
  CHECK(demux::mean_photon_hg(0, pair, 1.0, 1.0) ==
        doctest::Approx(fock_mean).epsilon(1e-8));
}

TEST_CASE("moment_sensitivity: single observable is plain error transfer") {
  Eigen::VectorXd d(1);
  d << 3.0;
  Eigen::MatrixXd g(1, 1);
  g << 4.0;
  auto ms = demux::moment_sensitivity(d, g);
  CHECK(ms.value == doctest::Approx(9.0 / 4.0));
  CHECK(ms.rank == 1);
  CHECK_FALSE(ms.used_pinv);
}

TEST_CASE("moment_sensitivity: optimum dominates random directions") {
  std::mt19937 rng(20240817);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = normal(rng);
  Eigen::MatrixXd gamma = a * a.transpose() + Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd d(3);
  d << 1.0, -2.0, 0.5;
  auto ms = demux::moment_sensitivity(d, gamma);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd m(3);
    for (int i = 0; i < 3; ++i) m(i) = normal(rng);
    m.normalize();
    double num = m.dot(d);
    double sens = num * num / m.dot(gamma * m);
    CHECK(sens <= ms.value * (1.0 + 1e-12));
  }
  // equality at the optimal coefficients
  double num = ms.coefficients.dot(d);
  CHECK(num * num / ms.coefficients.dot(gamma * ms.coefficients) ==
        doctest::Approx(ms.value).epsilon(1e-12));
}

TEST_CASE("moment_sensitivity: zero derivatives and singular covariance") {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  CHECK(demux::moment_sensitivity(d, g).value == 0.0);
  // rank-1 covariance with d in its range uses the pseudo-inverse
  Eigen::MatrixXd sing(2, 2);
  sing << 1.0, 1.0, 1.0, 1.0;
  Eigen::VectorXd dr(2);
  dr << 1.0, 1.0;
  auto ms = demux::moment_sensitivity(dr, sing);
  CHECK(ms.used_pinv);
  CHECK(ms.rank == 1);
  // Gamma = 2 v v^T with v = (1,1)/sqrt(2); D^T Gamma^+ D = (v.D)^2/2 = 1
  CHECK(ms.value == doctest::Approx(1.0));
}

TEST_CASE("moment summary: partial sums approach (s, 1) and stay ordered") {
  SourcePair pair{0.9, 1.3, 1.0, 0.7};
  double d = 1.2, varpi = 1.0;
  double s = model::gaussian_overlap(d, varpi);
  auto ms = demux::hg_moment_summary(pair, d, varpi, 60);
  CHECK(ms.s2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ms.s1 == doctest::Approx(s).epsilon(1e-10));
  CHECK(std::fabs(ms.s1) <= ms.s2);
  CHECK(ms.a_plus > 0.0);
  CHECK(ms.a_minus > 0.0);
  CHECK(ms.a_plus * ms.a_minus - ms.b * ms.b > 0.0);
}

TEST_CASE("count covariance building blocks match the Fock oracle") {
  // The assembled Gamma rests on three second moments of the +- mode pair;
  // check each against brute force at a correlated point.
  SourcePair pair{0.8, 1.2, 1.0, 0.5};
  auto geom = DiffractionGeometry::from_overlap(0.5);
  auto st = model::build_image_state(pair, geom);
  auto rho = oracle::fock_density(pair, geom, 26);
  auto var_of = [&](const std::function<Eigen::MatrixXd(int)>& op) {
    double first = rho.expect(op);
    double second = rho.expect([&](int s) { return Eigen::MatrixXd(op(s) * op(s)); });
    return second - first * first;
  };
  CHECK(var_of(oracle::sector_n_plus) ==
        doctest::Approx(st.n_plus * (st.n_plus + 1.0)).epsilon(1e-8));
  CHECK(var_of(oracle::sector_n_minus) ==
        doctest::Approx(st.n_minus * (st.n_minus + 1.0)).epsilon(1e-8));
  double joint = rho.expect([&](int s) {
    return Eigen::MatrixXd(oracle::sector_n_plus(s) * oracle::sector_n_minus(s));
  });
  double cov = joint - rho.expect(oracle::sector_n_plus) *
                           rho.expect(oracle::sector_n_minus);
  double cross = st.gamma * st.gamma * st.n_plus * st.n_minus;
  CHECK(cov == doctest::Approx(cross).epsilon(1e-8));
}

TEST_CASE("closed form equals the generic optimizer on the assembled counts") {
  SourcePair pair{0.9, 1.3, 1.0, 0.7};
  double varpi = 1.0;
  for (double s : {0.2, 0.5, 0.8})
    for (int k_max : {0, 1, 4, 12})
      for (int which : {1, 2}) {
        double d = std::sqrt(-2.0 * std::log(s)) * varpi;
        auto geom = DiffractionGeometry::from_separation(d, varpi);
        auto counts = demux::hg_counts_model(pair, d, varpi, k_max, which);
        auto ms = demux::moment_sensitivity(counts.d_means, counts.covariance);
        double closed = demux::hg_sensitivity(pair, geom, k_max, which);
        CHECK(closed == doctest::Approx(ms.value).epsilon(1e-8));
      }
}

TEST_CASE("sensitivity is nondecreasing in K and bounded by the QFI") {
  SourcePair pair{1.0, 1.4, 1.0, 0.6};
  for (double s : {0.1, 0.5, 0.9}) {
    auto geom = DiffractionGeometry::from_overlap(s);
    double h11 = fisher::qfi_matrix(pair, geom).h11;
    double prev = -1.0;
    for (int k : {0, 1, 2, 5, 10, 25, 60}) {
      double m = demux::hg_sensitivity(pair, geom, k, 1);
      CHECK(m >= prev - 1e-13);
      CHECK(m >= 0.0);
      CHECK(m <= h11 + 1e-9);
      prev = m;
    }
    // K = 60 has converged to the full-basis closed form
    CHECK(demux::hg_sensitivity_full(pair, geom, 1) ==
          doctest::Approx(prev).epsilon(1e-8));
  }
}

TEST_CASE("full basis saturates the QFI at s = 1 for any attenuation") {
  SourcePair pair{1.0, 1.3, 1.0, 0.5};
  for (double eta : {0.1, 0.5, 1.0}) {
    SourcePair p = pair;
    p.eta = eta;
    auto geom = DiffractionGeometry::from_overlap(1.0);
    double m = demux::hg_sensitivity_full(p, geom, 1);
    double h11 = fisher::qfi_matrix(p, geom).h11;
    CHECK(m / h11 == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("full basis at s = 0 with gamma = 0 matches direct evaluation") {
  // frozen from extended-precision evaluation of the full-basis expression
  // at s = 0, gamma = 0
  SourcePair pair{1.0, 1.0, 1.0, 0.5};
  auto geom = DiffractionGeometry::from_overlap(0.0);
  double ne = model::derive_params(pair).n_total * pair.eta;
  auto grad = model::param_gradients(pair);
  double expect = std::pow(2.0 * pair.eta * grad.dn_dt[0], 2) *
                  (1.0 / (2.0 * ne) -
                   (2.0 + 2.0 * ne) / (4.0 + 8.0 * ne + 4.0 * ne * ne));
  CHECK(demux::hg_sensitivity_full(pair, geom, 1) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("low flux: sensitivity reaches the photon-counting FI") {
  SourcePair pair{1.0, 1.0, 1.0, 1.0};
  pair.eta = 1e-4 / model::derive_params({1.0, 1.0, 1.0, 1.0}).n_total;
  auto geom = DiffractionGeometry::from_overlap(0.5);
  double m = demux::hg_sensitivity(pair, geom, 40, 1);
  double fi = demux::poisson_fi(pair, geom, 40, 1);
  CHECK(std::fabs(m - fi) / m < 1e-2);
}

TEST_CASE("ratio to the QFI grows with diffraction") {
  SourcePair pair{1.0, 1.0, 1.0, 0.5};
  double prev = 0.0;
  for (int i = 1; i <= 20; ++i) {
    double s = i / 20.0 * 0.999;
    auto geom = DiffractionGeometry::from_overlap(s);
    double ratio = demux::hg_sensitivity_full(pair, geom, 1) /
                   fisher::qfi_matrix(pair, geom).h11;
    CHECK(ratio > prev);
    CHECK(ratio <= 1.0 + 1e-9);
    prev = ratio;
  }
}

}  // TEST_SUITE
