#include "qtherm/demux.hpp"

#include <cmath>

#include "qtherm/errors.hpp"

namespace qtherm::demux {

namespace {

// beta_k^2 = exp(-lam) lam^k / k!  with lam = d^2/(4 varpi^2): Poisson
// weights, so they sum to 1 and carry the overlap in the alternating sum.
double beta_sq(int k, double lam) {
  if (lam == 0.0) return k == 0 ? 1.0 : 0.0;
  if (!std::isfinite(lam)) return 0.0;
  return std::exp(-lam + k * std::log(lam) - std::lgamma(k + 1.0));
}

struct PartialSums {
  double p;  // sum beta_k^2
  double q;  // sum (-1)^k beta_k^2
};

PartialSums beta_partial_sums(double d, double varpi, int k_max) {
  double lam = d * d / (4.0 * varpi * varpi);
  PartialSums out{0.0, 0.0};
  for (int k = 0; k <= k_max; ++k) {
    double b2 = beta_sq(k, lam);
    out.p += b2;
    out.q += (k % 2 == 0) ? b2 : -b2;
  }
  return out;
}

void check_which(int which) {
  if (which != 1 && which != 2)
    throw UsageError("demux: which must be 1 or 2");
}

}  // namespace

double hg_beta(int k, double d, double varpi, BetaExponent exponent) {
  if (k < 0) throw UsageError("hg_beta: k must be nonnegative");
  if (!(varpi > 0.0)) throw DomainError("hg_beta: varpi must be positive");
  if (d < 0.0) throw DomainError("hg_beta: d must be nonnegative");
  if (d == 0.0) return k == 0 ? 1.0 : 0.0;
  if (!std::isfinite(d)) return 0.0;
  double x = d / (2.0 * varpi);
  double sign = (exponent == BetaExponent::negative) ? -1.0 : 1.0;
  double log_b = sign * d * d / (8.0 * varpi * varpi) + k * std::log(x) -
                 0.5 * std::lgamma(k + 1.0);
  return std::exp(log_b);
}

double overlap_from_betas(double d, double varpi, double tol) {
  if (!(varpi > 0.0)) throw DomainError("overlap_from_betas: varpi must be positive");
  if (d == 0.0) return 1.0;
  if (!std::isfinite(d)) return 0.0;
  double lam = d * d / (4.0 * varpi * varpi);
  double sum = 0.0;
  double term = std::exp(-lam);
  for (int k = 0; k < 100000; ++k) {
    sum += (k % 2 == 0) ? term : -term;
    // Past the Poisson mode the terms decay faster than geometrically with
    // ratio lam/(k+1); bound the remaining mass by a geometric series.
    if (k + 1 > lam) {
      double r = lam / (k + 2);
      double tail = term * (lam / (k + 1)) / (1.0 - r);
      if (tail < tol) return sum;
    }
    term *= lam / (k + 1);
  }
  throw ConvergenceError("overlap_from_betas: tail bound not reached");
}

double mean_photon_hg(int k, const model::SourcePair& pair, double d,
                      double varpi) {
  model::DerivedParams dp = model::derive_params(pair);
  double f_plus = hg_beta(k, d, varpi);
  double f_minus = (k % 2 == 0) ? f_plus : -f_plus;
  double ne = dp.n_total * pair.eta;
  return ne * (f_plus * f_plus + f_minus * f_minus) -
         dp.gamma * ne * (f_plus * f_plus - f_minus * f_minus);
}

MomentSensitivity moment_sensitivity(const Eigen::VectorXd& d_means,
                                     const Eigen::MatrixXd& covariance) {
  const auto n = d_means.size();
  if (covariance.rows() != n || covariance.cols() != n)
    throw UsageError("moment_sensitivity: dimension mismatch");
  if (!covariance.isApprox(covariance.transpose(), 1e-10))
    throw DomainError("moment_sensitivity: covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance);
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev(0) < -1e-10 * std::max(1.0, ev(n - 1)))
    throw DomainError("moment_sensitivity: covariance is not positive semidefinite");
  double cutoff = 1e-12 * std::max(ev(n - 1), 0.0);
  MomentSensitivity out;
  out.rank = 0;
  out.value = 0.0;
  out.coefficients = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ev(i) <= cutoff) continue;
    ++out.rank;
    double proj = es.eigenvectors().col(i).dot(d_means);
    out.value += proj * proj / ev(i);
    out.coefficients += es.eigenvectors().col(i) * (proj / ev(i));
  }
  out.used_pinv = out.rank < n;
  return out;
}

HGMomentSummary hg_moment_summary(const model::SourcePair& pair, double d,
                                  double varpi, int k_max) {
  if (k_max < 0) throw UsageError("hg_moment_summary: k_max must be >= 0");
  model::DerivedParams dp = model::derive_params(pair);
  PartialSums ps = beta_partial_sums(d, varpi, k_max);
  double ne = dp.n_total * pair.eta;
  double g2 = dp.gamma * dp.gamma;
  HGMomentSummary out;
  out.s1 = ps.q;
  out.s2 = ps.p;
  out.a_plus = 2.0 / (1.0 + g2) + 2.0 * ne * ps.p;
  out.a_minus = 2.0 / (1.0 - g2) + 2.0 * ne * ps.p;
  out.b = 2.0 * ne * ps.q;
  out.beta.resize(k_max + 1);
  for (int k = 0; k <= k_max; ++k) out.beta[k] = hg_beta(k, d, varpi);
  return out;
}

HGCountsModel hg_counts_model(const model::SourcePair& pair, double d,
                              double varpi, int k_max, int which) {
  check_which(which);
  if (k_max < 0) throw UsageError("hg_counts_model: k_max must be >= 0");
  model::DerivedParams dp = model::derive_params(pair);
  model::ParamGradients grad = model::param_gradients(pair);
  double s = std::isfinite(d) ? model::gaussian_overlap(d, varpi) : 0.0;
  double n_plus = dp.n_total * pair.eta * (1.0 + s);
  double n_minus = dp.n_total * pair.eta * (1.0 - s);
  double cross_sq = dp.gamma * dp.gamma * n_plus * n_minus;
  int n = k_max + 1;
  double lam = d * d / (4.0 * varpi * varpi);
  // Mode k couples to a+ for even k and to a- for odd k with weight
  // w_k = |g_k|^2; the remaining HG-mode content is vacuum and only adds the
  // shot-noise diagonal.
  Eigen::VectorXd w(n), d_means(n);
  std::vector<bool> even(n);
  for (int k = 0; k < n; ++k) {
    even[k] = (k % 2 == 0);
    double b2 = beta_sq(k, lam);
    double denom = even[k] ? (1.0 + s) : (1.0 - s);
    w(k) = (b2 == 0.0) ? 0.0 : 2.0 * b2 / denom;
    double d_occ = pair.eta * denom * grad.dn_dt[which - 1];
    d_means(k) = w(k) * d_occ;
  }
  Eigen::MatrixXd cov(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      double c;
      if (even[k] && even[l]) c = w(k) * w(l) * n_plus * n_plus;
      else if (!even[k] && !even[l]) c = w(k) * w(l) * n_minus * n_minus;
      else c = w(k) * w(l) * cross_sq;
      if (k == l) c += w(k) * (even[k] ? n_plus : n_minus);
      cov(k, l) = c;
    }
  }
  return {d_means, cov};
}

double hg_sensitivity(const model::SourcePair& pair,
                      const model::DiffractionGeometry& geom, int k_max,
                      int which) {
  check_which(which);
  if (k_max < 0) throw UsageError("hg_sensitivity: k_max must be >= 0");
  auto [d, varpi] = geom.demux_geometry();
  model::DerivedParams dp = model::derive_params(pair);
  model::ParamGradients grad = model::param_gradients(pair);
  HGMomentSummary ms = hg_moment_summary(pair, d, varpi, k_max);
  double det = ms.a_plus * ms.a_minus - ms.b * ms.b;
  if (det <= 0.0)
    throw SingularError("hg_sensitivity: degenerate count covariance");
  double ne = dp.n_total * pair.eta;
  double bracket = ms.s2 / (2.0 * ne) -
                   (ms.a_plus * ms.s1 * ms.s1 - 2.0 * ms.b * ms.s1 * ms.s2 +
                    ms.a_minus * ms.s2 * ms.s2) / det;
  double f = 2.0 * pair.eta * grad.dn_dt[which - 1];
  return f * f * bracket;
}

double hg_sensitivity_full(const model::SourcePair& pair,
                           const model::DiffractionGeometry& geom,
                           int which) {
  check_which(which);
  model::DerivedParams dp = model::derive_params(pair);
  model::ParamGradients grad = model::param_gradients(pair);
  double s = geom.overlap();
  double ne = dp.n_total * pair.eta;
  double g2 = dp.gamma * dp.gamma;
  double g4 = g2 * g2;
  double one_m_s2 = (1.0 - s) * (1.0 + s);
  // K -> infinity of the finite-basis formula (S2 -> 1, S1 -> s); the last
  // numerator term comes out as (1 - s^2).
  double num = 2.0 * s * s * (1.0 - g2) + 2.0 * (1.0 + g2) +
               2.0 * ne * (1.0 - g4) * one_m_s2;
  double den = 4.0 + 8.0 * ne + 4.0 * ne * ne * one_m_s2 * (1.0 - g4);
  double bracket = 1.0 / (2.0 * ne) - num / den;
  double f = 2.0 * pair.eta * grad.dn_dt[which - 1];
  return f * f * bracket;
}

double poisson_fi(const model::SourcePair& pair,
                  const model::DiffractionGeometry& geom, int k_max,
                  int which) {
  check_which(which);
  auto [d, varpi] = geom.demux_geometry();
  model::DerivedParams dp = model::derive_params(pair);
  model::ParamGradients grad = model::param_gradients(pair);
  double lam = d * d / (4.0 * varpi * varpi);
  double ne = dp.n_total * pair.eta;
  double d_ne = pair.eta * grad.dn_dt[which - 1];
  double fi = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    double b2 = beta_sq(k, lam);
    if (b2 == 0.0) continue;
    double mean = 2.0 * ne * b2;
    double d_mean = 2.0 * d_ne * b2;
    fi += d_mean * d_mean / mean;
  }
  return fi;
}

}  // namespace qtherm::demux
