#include "qtherm/counting.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qtherm/errors.hpp"

namespace qtherm::counting {

namespace {

// State-level scalars entering P(n+, n-) and its temperature derivatives.
struct CountingScalars {
  double n_plus, n_minus;
  double theta;  // gamma^2
  double u;      // 1 - gamma^2
  double lam_plus, lam_minus;
  double z;                       // theta / (lam+ lam-)
  double d_nplus[2], d_nminus[2]; // d/dT_i
  double d_theta[2];
};

CountingScalars scalars_of(const model::SourcePair& pair,
                           const model::DiffractionGeometry& geom) {
  model::DerivedParams dp = model::derive_params(pair);
  model::ParamGradients grad = model::param_gradients(pair);
  double s = geom.overlap();
  CountingScalars c;
  c.n_plus = dp.n_total * pair.eta * (1.0 + s);
  c.n_minus = dp.n_total * pair.eta * (1.0 - s);
  c.theta = dp.gamma * dp.gamma;
  c.u = 1.0 - c.theta;
  c.lam_plus = 1.0 + c.n_plus * c.u;
  c.lam_minus = 1.0 + c.n_minus * c.u;
  c.z = c.theta / (c.lam_plus * c.lam_minus);
  for (int i = 0; i < 2; ++i) {
    c.d_nplus[i] = pair.eta * (1.0 + s) * grad.dn_dt[i];
    c.d_nminus[i] = pair.eta * (1.0 - s) * grad.dn_dt[i];
    c.d_theta[i] = 2.0 * dp.gamma * grad.dgamma_dt[i];
  }
  return c;
}

struct F21Eval {
  double log_value;
  double dlog_dz;  // F'/F
};

// 2F1(1+n, 1+m; 1; z) for nonnegative integers n, m and z in [0, 1).
// Evaluated through the Euler transformation
//   2F1(a, b; 1; z) = (1-z)^(1-a-b) 2F1(-n, -m; 1; z),
// whose right factor terminates after min(n, m)+1 positive terms
//   G(z) = sum_j C(n,j) C(m,j) z^j,
// so the evaluation is exact for every z in [0, 1), including the z -> 1
// regime reached at extreme temperature contrast. Accumulators are
// renormalized against overflow; logs are returned.
F21Eval gauss_2f1_c1(int a, int b, double z, F21Series series) {
  if (z < 0.0 || z >= 1.0)
    throw ConvergenceError("2F1: argument must lie in [0, 1)");
  if (series == F21Series::paper) {
    // literal expansion sum_m (a b z)^m / m! = exp(a b z)
    double ab = static_cast<double>(a) * b;
    return {ab * z, ab};
  }
  if (z == 0.0) return {0.0, static_cast<double>(a) * b};
  const int n = a - 1, m = b - 1;
  const int j_max = std::min(n, m);
  double log_scale = 0.0;
  double term = 1.0;   // t_j / exp(log_scale)
  double sum = 1.0;    // G
  double sum_j = 0.0;  // sum j t_j, for G'
  for (int j = 0; j < j_max; ++j) {
    term *= (static_cast<double>(n - j) * (m - j)) / ((j + 1.0) * (j + 1.0)) * z;
    sum += term;
    sum_j += (j + 1.0) * term;
    if (sum > 1e280) {
      log_scale += std::log(sum);
      term /= sum;
      sum_j /= sum;
      sum = 1.0;
    }
  }
  double log_value = -(n + m + 1.0) * std::log1p(-z) + log_scale + std::log(sum);
  double dlog = (n + m + 1.0) / (1.0 - z) + sum_j / (z * sum);
  return {log_value, dlog};
}

struct LogProb {
  double log_p;
  double dlog_dt[2];
};

LogProb log_joint(int n_plus, int n_minus, const CountingScalars& c,
                  F21Series series) {
  LogProb out;
  F21Eval f = gauss_2f1_c1(1 + n_plus, 1 + n_minus, c.z, series);
  double log_p = (1.0 + n_plus + n_minus) * std::log(c.u) -
                 (n_plus + 1.0) * std::log(c.lam_plus) -
                 (n_minus + 1.0) * std::log(c.lam_minus) + f.log_value;
  if (n_plus > 0) log_p += n_plus * std::log(c.n_plus);
  if (n_minus > 0) log_p += n_minus * std::log(c.n_minus);
  out.log_p = log_p;

  // chain rule through (N+, N-, theta); z = theta/(lam+ lam-)
  double dlogf_dnp = -f.dlog_dz * c.z * c.u / c.lam_plus;
  double dlogf_dnm = -f.dlog_dz * c.z * c.u / c.lam_minus;
  double dlogp_dnp = (n_plus > 0 ? n_plus / c.n_plus : 0.0) -
                     (n_plus + 1.0) * c.u / c.lam_plus + dlogf_dnp;
  double dlogp_dnm = (n_minus > 0 ? n_minus / c.n_minus : 0.0) -
                     (n_minus + 1.0) * c.u / c.lam_minus + dlogf_dnm;
  double lplm = c.lam_plus * c.lam_minus;
  double dz_dtheta = 1.0 / lplm +
                     c.theta * (c.n_plus * c.lam_minus + c.n_minus * c.lam_plus) /
                         (lplm * lplm);
  double dlogp_dtheta = -(1.0 + n_plus + n_minus) / c.u +
                        (n_plus + 1.0) * c.n_plus / c.lam_plus +
                        (n_minus + 1.0) * c.n_minus / c.lam_minus +
                        f.dlog_dz * dz_dtheta;
  for (int i = 0; i < 2; ++i) {
    out.dlog_dt[i] = dlogp_dnp * c.d_nplus[i] + dlogp_dnm * c.d_nminus[i] +
                     dlogp_dtheta * c.d_theta[i];
  }
  return out;
}

// Smallest cap with thermal marginal tail (n/(n+1))^(cap+1) <= tol.
int marginal_cap(double occupancy, double tol) {
  if (occupancy <= 0.0) return 0;
  double q = occupancy / (occupancy + 1.0);
  int cap = static_cast<int>(std::ceil(std::log(tol) / std::log(q))) + 1;
  return std::max(cap, 2);
}

double pairwise_sum(std::vector<double>& v, size_t lo, size_t hi) {
  if (hi - lo == 1) return v[lo];
  size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double pairwise_sum(std::vector<double> v) {
  if (v.empty()) return 0.0;
  return pairwise_sum(v, 0, v.size());
}

}  // namespace

double joint_prob(int n_plus, int n_minus, const model::SourcePair& pair,
                  const model::DiffractionGeometry& geom, F21Series series) {
  if (n_plus < 0 || n_minus < 0)
    throw UsageError("joint_prob: photon numbers must be nonnegative");
  CountingScalars c = scalars_of(pair, geom);
  if (c.n_minus == 0.0 && n_minus > 0) return 0.0;  // vacuum minus mode
  if (c.n_plus == 0.0 && n_plus > 0) return 0.0;
  return std::exp(log_joint(n_plus, n_minus, c, series).log_p);
}

JointProbGradient joint_prob_gradient(int n_plus, int n_minus,
                                      const model::SourcePair& pair,
                                      const model::DiffractionGeometry& geom) {
  if (n_plus < 0 || n_minus < 0)
    throw UsageError("joint_prob_gradient: photon numbers must be nonnegative");
  CountingScalars c = scalars_of(pair, geom);
  if ((c.n_minus == 0.0 && n_minus > 0) || (c.n_plus == 0.0 && n_plus > 0))
    return {0.0, {0.0, 0.0}};
  LogProb lp = log_joint(n_plus, n_minus, c, F21Series::standard);
  double p = std::exp(lp.log_p);
  return {p, {p * lp.dlog_dt[0], p * lp.dlog_dt[1]}};
}

CountDistribution count_distribution(const model::SourcePair& pair,
                                     const model::DiffractionGeometry& geom,
                                     double tail_tol) {
  if (!(tail_tol > 0.0))
    throw DomainError("count_distribution: tail_tol must be positive");
  CountingScalars c = scalars_of(pair, geom);
  CountDistribution out;
  out.cap_plus = marginal_cap(c.n_plus, 0.5 * tail_tol);
  out.cap_minus = c.n_minus > 0.0 ? marginal_cap(c.n_minus, 0.5 * tail_tol) : 0;
  out.probs.resize(out.cap_plus + 1, out.cap_minus + 1);
  for (int i = 0; i <= out.cap_plus; ++i)
    for (int j = 0; j <= out.cap_minus; ++j)
      out.probs(i, j) = std::exp(log_joint(i, j, c, F21Series::standard).log_p);
  out.tail_mass = 1.0 - out.probs.sum();
  return out;
}

FisherMatrix counting_fi_matrix(const model::SourcePair& pair,
                                const model::DiffractionGeometry& geom,
                                double tail_tol) {
  if (!(tail_tol > 0.0))
    throw DomainError("counting_fi_matrix: tail_tol must be positive");
  CountingScalars c = scalars_of(pair, geom);
  int cap_plus = marginal_cap(c.n_plus, 0.5 * tail_tol);
  // At s = 1 the minus mode is vacuum: only n- = 0 carries probability.
  int cap_minus = c.n_minus > 0.0 ? marginal_cap(c.n_minus, 0.5 * tail_tol) : 0;
  std::vector<double> rows11, rows12, rows22;
  rows11.reserve(cap_plus + 1);
  rows12.reserve(cap_plus + 1);
  rows22.reserve(cap_plus + 1);
  for (int i = 0; i <= cap_plus; ++i) {
    std::vector<double> r11(cap_minus + 1), r12(cap_minus + 1), r22(cap_minus + 1);
    for (int j = 0; j <= cap_minus; ++j) {
      LogProb lp = log_joint(i, j, c, F21Series::standard);
      double p = std::exp(lp.log_p);
      r11[j] = p * lp.dlog_dt[0] * lp.dlog_dt[0];
      r12[j] = p * lp.dlog_dt[0] * lp.dlog_dt[1];
      r22[j] = p * lp.dlog_dt[1] * lp.dlog_dt[1];
    }
    rows11.push_back(pairwise_sum(std::move(r11)));
    rows12.push_back(pairwise_sum(std::move(r12)));
    rows22.push_back(pairwise_sum(std::move(r22)));
  }
  FisherMatrix fi;
  fi.h11 = pairwise_sum(std::move(rows11));
  fi.h12 = pairwise_sum(std::move(rows12));
  fi.h22 = pairwise_sum(std::move(rows22));
  return fi;
}

}  // namespace qtherm::counting
