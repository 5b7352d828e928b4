#include "qtherm/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "qtherm/counting.hpp"
#include "qtherm/demux.hpp"
#include "qtherm/equal_temp.hpp"
#include "qtherm/gaussian_fisher.hpp"
#include "qtherm/model.hpp"
#include "qtherm/oracle.hpp"

namespace qtherm {

namespace {

struct Check {
  std::string name;
  std::function<double()> deviation;  // must stay below bound
  double bound;
};

}  // namespace

int run_selftest(std::ostream& out, bool verbose) {
  using model::DiffractionGeometry;
  using model::SourcePair;

  const SourcePair generic{0.8, 1.2, 1.0, 0.5, };
  const DiffractionGeometry half = DiffractionGeometry::from_overlap(0.5);
  const int dim = 24;

  std::vector<Check> checks;

  checks.push_back({"covariance matches Fock second moments", [&] {
    auto st = model::build_image_state(generic, half);
    auto rho = oracle::fock_density(generic, half, dim);
    return (st.cov - rho.second_moments()).cwiseAbs().maxCoeff();
  }, 1e-8});

  checks.push_back({"cross correlation sign <a+^dag a-> = -gamma sqrt(N+N-)", [&] {
    auto st = model::build_image_state(generic, half);
    auto rho = oracle::fock_density(generic, half, dim);
    double expected = -st.gamma * std::sqrt(st.n_plus * st.n_minus);
    return std::fabs(rho.cross_correlation() - expected);
  }, 1e-8});

  checks.push_back({"equal-T closed form matches spectral QFI", [&] {
    SourcePair eq{1.0, 1.0, 1.0, 0.5};
    auto rho = oracle::fock_density(eq, half, dim);
    auto d1 = oracle::fock_density_derivative(eq, half, dim, 1);
    auto d2 = oracle::fock_density_derivative(eq, half, dim, 2);
    auto sum = oracle::FockState::combine({{1.0, &d1}, {1.0, &d2}});
    double qfi = oracle::spectral_qfi(rho, sum).value;
    double closed = equal_temp::qfi_equal(1.0, 1.0, 0.5, 0.5).qfi;
    return std::fabs(qfi - closed) / closed;
  }, 1e-6});

  checks.push_back({"QFI matrix matches spectral QFI", [&] {
    auto h = fisher::qfi_matrix(generic, half);
    auto rho = oracle::fock_density(generic, half, dim);
    auto d1 = oracle::fock_density_derivative(generic, half, dim, 1);
    auto d2 = oracle::fock_density_derivative(generic, half, dim, 2);
    double worst = std::fabs(oracle::spectral_qfi(rho, d1).value - h.h11) / h.h11;
    worst = std::max(worst,
        std::fabs(oracle::spectral_qfi(rho, d2).value - h.h22) / h.h22);
    worst = std::max(worst,
        std::fabs(oracle::spectral_qfi(rho, d1, d2).value - h.h12) / std::fabs(h.h12));
    return worst;
  }, 1e-5});

  checks.push_back({"weak commutation vanishes (closed form and Fock)", [&] {
    double closed = std::fabs(fisher::weak_commutation(generic, half));
    auto rho = oracle::fock_density(generic, half, dim);
    auto l1 = oracle::sld_blocks(rho, oracle::fock_density_derivative(generic, half, dim, 1));
    auto l2 = oracle::sld_blocks(rho, oracle::fock_density_derivative(generic, half, dim, 2));
    double fock = std::fabs(oracle::commutator_expectation(rho, l1, l2));
    return std::max(closed * 1e3, fock);  // closed bound 1e-9, Fock 1e-6
  }, 1e-6});

  checks.push_back({"joint counting law matches Fock number diagonal", [&] {
    auto rho = oracle::fock_density(generic, half, dim);
    double worst = 0.0;
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j <= 10; ++j)
        worst = std::max(worst, std::fabs(counting::joint_prob(i, j, generic, half) -
                                          rho.number_diagonal(i, j)));
    return worst;
  }, 1e-8});

  checks.push_back({"PSF overlap: quadrature vs HG coefficient identity", [&] {
    double worst = 0.0;
    for (double d : {0.5, 1.0, 2.0, 3.0}) {
      double s_quad = oracle::quadrature_overlap(d, 1.0);
      double s_model = model::gaussian_overlap(d, 1.0);
      double s_beta = demux::overlap_from_betas(d, 1.0, 1e-15);
      worst = std::max({worst, std::fabs(s_quad - s_model),
                        std::fabs(s_quad - s_beta)});
    }
    return worst;
  }, 1e-10});

  checks.push_back({"equal-T series matches closed form", [&] {
    double closed = equal_temp::qfi_equal(1.0, 1.0, 0.5, 0.5).qfi;
    double series = equal_temp::qfi_equal_series(1.0, 1.0, 0.5, 0.5, 1e-14);
    return std::fabs(series - closed) / closed;
  }, 1e-10});

  int failures = 0;
  for (const auto& check : checks) {
    double dev = 0.0;
    bool ok = true;
    std::string note;
    try {
      dev = check.deviation();
      ok = dev < check.bound;
    } catch (const std::exception& e) {
      ok = false;
      note = e.what();
    }
    if (!ok) ++failures;
    if (verbose || !ok) {
      out << (ok ? "ok   " : "FAIL ") << check.name;
      if (note.empty())
        out << " (deviation " << dev << ", bound " << check.bound << ")";
      else
        out << " (" << note << ")";
      out << "\n";
    }
  }
  return failures;
}

}  // namespace qtherm
