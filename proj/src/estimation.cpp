#include "qtherm/estimation.hpp"

#include <limits>

#include "qtherm/equal_temp.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/gaussian_fisher.hpp"

namespace qtherm::estimation {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double simultaneous_bound(const FisherMatrix& h, double nu) {
  if (!(nu > 0.0)) throw DomainError("simultaneous_bound: nu must be positive");
  double det = h.det();
  // The s -> 1 limiting matrix is singular by construction; its det is only
  // zero up to rounding, so the flag decides.
  if (h.limit_path || det <= 0.0) return kInf;
  return (h.h11 + h.h22) / (nu * det);
}

double individual_bound(const FisherMatrix& h, double nu) {
  if (!(nu > 0.0)) throw DomainError("individual_bound: nu must be positive");
  if (!(h.h11 > 0.0) || !(h.h22 > 0.0))
    throw DomainError("individual_bound: diagonal Fisher entries must be positive");
  return (2.0 / nu) * (1.0 / h.h11 + 1.0 / h.h22);
}

double ratio_mu(const FisherMatrix& h, MuConvention convention) {
  if (!(h.h11 > 0.0) || !(h.h22 > 0.0))
    throw DomainError("ratio_mu: diagonal Fisher entries must be positive");
  double det = h.det();
  if (h.limit_path || det <= 0.0) return kInf;
  double mu = h.h11 * h.h22 / det;
  return convention == MuConvention::resource ? 0.5 * mu : mu;
}

StrategyComparison compare_strategies(const FisherMatrix& h, double nu,
                                      MuConvention convention) {
  StrategyComparison out;
  out.nu = nu;
  out.sim_bound = simultaneous_bound(h, nu);
  out.ind_bound = individual_bound(h, nu);
  out.mu = ratio_mu(h, convention);
  return out;
}

PriorGain prior_gain(double t1, double omega, double eta, double s) {
  PriorGain out;
  out.f_prior = equal_temp::qfi_equal(t1, omega, eta, s).qfi;
  out.two_h11 = 2.0 * fisher::qfi_equal_limit_closed(t1, omega, eta, s);
  out.gain = out.f_prior / out.two_h11;
  return out;
}

}  // namespace qtherm::estimation
