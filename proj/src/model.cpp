#include "qtherm/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qtherm/errors.hpp"

namespace qtherm::model {

namespace {

// L2-normalized Gaussian PSF of width varpi.
double psf(double x, double varpi) {
  return std::pow(2.0 / (M_PI * varpi * varpi), 0.25) *
         std::exp(-x * x / (varpi * varpi));
}

double overlap_integrand(double x, double d, double varpi) {
  return psf(x + 0.5 * d, varpi) * psf(x - 0.5 * d, varpi);
}

// Adaptive Simpson with absolute tolerance; integrand is smooth and decays
// like exp(-2x^2/varpi^2).
double adaptive_simpson(double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, double d,
                        double varpi) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = overlap_integrand(lm, d, varpi);
  double frm = overlap_integrand(rm, d, varpi);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0) throw ConvergenceError("gaussian_overlap: quadrature did not converge");
  if (std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, d, varpi) +
         adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, d, varpi);
}

}  // namespace

void validate(const SourcePair& pair) {
  if (!(pair.t1 > 0.0) || !(pair.t2 > 0.0))
    throw DomainError("SourcePair: temperatures must be positive");
  if (!(pair.omega > 0.0))
    throw DomainError("SourcePair: omega must be positive");
  if (!(pair.eta > 0.0) || pair.eta > 1.0)
    throw DomainError("SourcePair: eta must lie in (0, 1]");
  // exp(omega/T) overflows doubles near omega/T = 709; reject instead of
  // silently saturating.
  if (pair.omega / pair.t1 > 700.0 || pair.omega / pair.t2 > 700.0)
    throw RangeError("SourcePair: temperature below omega/700 (chi overflows)");
}

DerivedParams derive_params(const SourcePair& pair) {
  validate(pair);
  DerivedParams out;
  out.chi1m1 = std::expm1(pair.omega / pair.t1);
  out.chi2m1 = std::expm1(pair.omega / pair.t2);
  out.chi1 = 1.0 + out.chi1m1;
  out.chi2 = 1.0 + out.chi2m1;
  // n_i = 1/(chi_i - 1) are the per-source mean occupancies; gamma is their
  // relative asymmetry, so the source populations are exactly N(1 -+ gamma).
  out.gamma = (out.chi1m1 - out.chi2m1) / (out.chi1m1 + out.chi2m1);
  out.n_total = 0.5 * (1.0 / out.chi1m1 + 1.0 / out.chi2m1);
  return out;
}

ParamGradients param_gradients(const SourcePair& pair) {
  DerivedParams dp = derive_params(pair);
  ParamGradients g;
  const double t[2] = {pair.t1, pair.t2};
  const double chi[2] = {dp.chi1, dp.chi2};
  const double em[2] = {dp.chi1m1, dp.chi2m1};
  double sum = em[0] + em[1];
  for (int i = 0; i < 2; ++i) {
    double dchi = -pair.omega * chi[i] / (t[i] * t[i]);  // d chi_i / d T_i
    g.dn_dt[i] = -0.5 * dchi / (em[i] * em[i]);
    double dgamma_dchi = (i == 0 ? 2.0 * em[1] : -2.0 * em[0]) / (sum * sum);
    g.dgamma_dt[i] = dgamma_dchi * dchi;
  }
  return g;
}

double gaussian_overlap(double d, double varpi) {
  if (!(varpi > 0.0)) throw DomainError("gaussian_overlap: varpi must be positive");
  if (d < 0.0) throw DomainError("gaussian_overlap: d must be nonnegative");
  if (d == 0.0) return 1.0;
  if (!std::isfinite(d)) return 0.0;
  // Integrand support: centered at 0 with width varpi/2; its peak value is
  // psf(d/2)^2, so far-separated images give an exponentially small s.
  double half = 8.0 * varpi;
  double fa = overlap_integrand(-half, d, varpi);
  double fb = overlap_integrand(half, d, varpi);
  double fm = overlap_integrand(0.0, d, varpi);
  double whole = 2.0 * half / 6.0 * (fa + 4.0 * fm + fb);
  double s = adaptive_simpson(-half, half, fa, fm, fb, whole, 1e-13, 48, d, varpi);
  return std::min(s, 1.0);
}

DiffractionGeometry DiffractionGeometry::from_overlap(double s) {
  if (!(s >= 0.0) || s > 1.0)
    throw DomainError("DiffractionGeometry: overlap s must lie in [0, 1]");
  DiffractionGeometry g;
  g.s_ = s;
  return g;
}

DiffractionGeometry DiffractionGeometry::from_separation(double d, double varpi) {
  DiffractionGeometry g;
  g.s_ = gaussian_overlap(d, varpi);
  g.separation_ = d;
  g.psf_width_ = varpi;
  return g;
}

std::pair<double, double> DiffractionGeometry::demux_geometry() const {
  if (separation_) return {*separation_, *psf_width_};
  if (s_ == 0.0) return {std::numeric_limits<double>::infinity(), 1.0};
  return {std::sqrt(-2.0 * std::log(s_)), 1.0};
}

double DiffractionGeometry::separation() const {
  if (!separation_) throw UsageError("DiffractionGeometry: no separation given");
  return *separation_;
}

double DiffractionGeometry::psf_width() const {
  if (!psf_width_) throw UsageError("DiffractionGeometry: no PSF width given");
  return *psf_width_;
}

ImageState build_image_state(const SourcePair& pair,
                             const DiffractionGeometry& geom) {
  DerivedParams dp = derive_params(pair);
  double s = geom.overlap();
  ImageState st;
  st.n_plus = dp.n_total * pair.eta * (1.0 + s);
  st.n_minus = dp.n_total * pair.eta * (1.0 - s);
  st.gamma = dp.gamma;
  // <a+^dag a-> = sqrt(eta+ eta-) <c+^dag c-> = -gamma sqrt(N+ N-).
  double cross = -dp.gamma * std::sqrt(st.n_plus * st.n_minus);
  st.pmatrix << st.n_plus, cross, cross, st.n_minus;
  Eigen::Matrix2d block = 2.0 * st.pmatrix + Eigen::Matrix2d::Identity();
  st.cov.setZero();
  st.cov.block<2, 2>(0, 0) = block;
  st.cov.block<2, 2>(2, 2) = block;
  st.displacement.setZero();
  return st;
}

Eigen::Matrix4d cov_derivative(const SourcePair& pair,
                               const DiffractionGeometry& geom, int which) {
  if (which != 1 && which != 2)
    throw UsageError("cov_derivative: which must be 1 or 2");
  DerivedParams dp = derive_params(pair);
  ParamGradients g = param_gradients(pair);
  double s = geom.overlap();
  int i = which - 1;
  double d_nplus = pair.eta * (1.0 + s) * g.dn_dt[i];
  double d_nminus = pair.eta * (1.0 - s) * g.dn_dt[i];
  // d/dT_i of gamma*sqrt(N+ N-) = eta sqrt(1-s^2) (gamma N)' since
  // sqrt(N+ N-) = N eta sqrt(1-s^2).
  double d_cross = pair.eta * std::sqrt((1.0 - s) * (1.0 + s)) *
                   (dp.gamma * g.dn_dt[i] + dp.n_total * g.dgamma_dt[i]);
  Eigen::Matrix2d block;
  block << 2.0 * d_nplus, -2.0 * d_cross, -2.0 * d_cross, 2.0 * d_nminus;
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  out.block<2, 2>(0, 0) = block;
  out.block<2, 2>(2, 2) = block;
  return out;
}

Eigen::Matrix4d commutation_signature() {
  Eigen::Matrix4d k = Eigen::Matrix4d::Identity();
  k(2, 2) = -1.0;
  k(3, 3) = -1.0;
  return k;
}

}  // namespace qtherm::model
