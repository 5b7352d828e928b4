#include "qtherm/equal_temp.hpp"

#include <cmath>

#include "qtherm/errors.hpp"
#include "qtherm/model.hpp"

namespace qtherm::equal_temp {

namespace {

struct BranchParams {
  double m;        // occupancy M
  double dm;       // dM/dT
};

BranchParams branch_params(Branch branch, double t, double omega, double eta,
                           double s) {
  model::validate({t, t, omega, eta});
  if (!(s >= 0.0) || s > 1.0)
    throw DomainError("equal_temp: s must lie in [0, 1]");
  double em = std::expm1(omega / t);
  double chi = 1.0 + em;
  double sgn = (branch == Branch::plus) ? 1.0 : -1.0;
  double weight = eta * (1.0 + sgn * s);
  BranchParams bp;
  bp.m = weight / em;
  bp.dm = weight * omega * chi / (t * t * em * em);
  return bp;
}

// FI of a single thermal mode: sum_n [dp(n)]^2/p(n) = (M')^2 / (M(M+1)),
// summed explicitly with geometric tail control.
double branch_series(const BranchParams& bp, double tail_tol) {
  if (bp.m <= 0.0) return 0.0;  // vacuum carries no temperature information
  double q = bp.m / (bp.m + 1.0);
  int n_max = static_cast<int>(
      std::ceil(std::log(tail_tol * (1.0 - q)) / std::log(q)));
  double scale = bp.dm / (bp.m * (bp.m + 1.0));
  double sum = 0.0, comp = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double p = std::exp(n * std::log(q) - std::log1p(bp.m));
    double dev = n - bp.m;
    double term = p * dev * dev * scale * scale;
    double y = term - comp;  // Kahan
    double t2 = sum + y;
    comp = (t2 - sum) - y;
    sum = t2;
  }
  return sum;
}

}  // namespace

double fock_prob(int n, Branch branch, double t, double omega, double eta,
                 double s) {
  if (n < 0) throw UsageError("fock_prob: n must be nonnegative");
  if (branch != Branch::plus && branch != Branch::minus)
    throw UsageError("fock_prob: invalid branch tag");
  BranchParams bp = branch_params(branch, t, omega, eta, s);
  if (bp.m == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(bp.m) - (n + 1) * std::log1p(bp.m));
}

EqualTempResult qfi_equal(double t, double omega, double eta, double s) {
  BranchParams plus = branch_params(Branch::plus, t, omega, eta, s);
  BranchParams minus = branch_params(Branch::minus, t, omega, eta, s);
  double em = std::expm1(omega / t);
  double chi = 1.0 + em;
  double t4 = t * t * t * t;
  EqualTempResult out;
  out.m_plus = plus.m;
  out.m_minus = minus.m;
  out.qfi = 2.0 * chi * chi * omega * omega * eta * (em + eta * (1.0 - s * s)) /
            (em * em * t4 * (em + eta * (1.0 - s)) * (em + eta * (1.0 + s)));
  out.qfi_low_t = 2.0 * omega * omega * eta * std::exp(-omega / t) / t4;
  double x = omega / t;
  out.qfi_high_t = 2.0 * eta * (x + eta * (1.0 - s * s)) /
                   (t * t * (x + eta * (1.0 - s)) * (x + eta * (1.0 + s)));
  return out;
}

double qfi_equal_series(double t, double omega, double eta, double s,
                        double tail_tol) {
  if (!(tail_tol > 0.0))
    throw DomainError("qfi_equal_series: tail_tol must be positive");
  return branch_series(branch_params(Branch::plus, t, omega, eta, s), tail_tol) +
         branch_series(branch_params(Branch::minus, t, omega, eta, s), tail_tol);
}

}  // namespace qtherm::equal_temp
