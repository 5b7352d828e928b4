#include "qtherm/gaussian_fisher.hpp"

#include <cmath>

#include "qtherm/errors.hpp"

namespace qtherm::fisher {

namespace {

constexpr double kConditionLimit = 1e12;

Eigen::MatrixXd kron4(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b) {
  Eigen::MatrixXd out(16, 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

Eigen::VectorXd vec4(const Eigen::Matrix4d& m) {
  Eigen::VectorXd v(16);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) v(4 * j + i) = m(i, j);
  return v;
}

Eigen::Matrix4d unvec4(const Eigen::VectorXd& v) {
  Eigen::Matrix4d m;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) m(i, j) = v(4 * j + i);
  return m;
}

struct KroneckerSystem {
  Eigen::MatrixXd r;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double condition;
};

// R = conj(sigma) (x) sigma - K (x) K. sigma is real here, but the
// conjugation step is kept so the construction generalizes.
KroneckerSystem build_system(const model::ImageState& state) {
  Eigen::Matrix4d sigma_conj = state.cov.conjugate();
  Eigen::Matrix4d k = model::commutation_signature();
  KroneckerSystem sys;
  sys.r = kron4(sigma_conj, state.cov) - kron4(k, k);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.r);
  double smin = svd.singularValues()(15);
  sys.condition = smin > 0.0 ? svd.singularValues()(0) / smin
                             : std::numeric_limits<double>::infinity();
  sys.lu.compute(sys.r);
  return sys;
}

// At s = 1 only the symmetric mode is occupied and thermal; the matrix
// degenerates to the rank-one H^ij = d_i N+ d_j N+ / (N+ (N+ + 1)).
FisherMatrix limit_matrix(const model::SourcePair& pair, double s) {
  model::ParamGradients g = model::param_gradients(pair);
  model::DerivedParams dp = model::derive_params(pair);
  double n_plus = dp.n_total * pair.eta * (1.0 + s);
  double d1 = pair.eta * (1.0 + s) * g.dn_dt[0];
  double d2 = pair.eta * (1.0 + s) * g.dn_dt[1];
  FisherMatrix h;
  h.h11 = d1 * d1 / (n_plus * (n_plus + 1.0));
  h.h22 = d2 * d2 / (n_plus * (n_plus + 1.0));
  h.h12 = d1 * d2 / (n_plus * (n_plus + 1.0));
  h.limit_path = true;
  return h;
}

}  // namespace

FisherMatrix qfi_matrix(const model::SourcePair& pair,
                        const model::DiffractionGeometry& geom) {
  model::ImageState state = model::build_image_state(pair, geom);
  KroneckerSystem sys = build_system(state);
  if (sys.condition > kConditionLimit) return limit_matrix(pair, geom.overlap());
  Eigen::VectorXd v1 = vec4(model::cov_derivative(pair, geom, 1));
  Eigen::VectorXd v2 = vec4(model::cov_derivative(pair, geom, 2));
  Eigen::VectorXd y1 = sys.lu.solve(v1);
  Eigen::VectorXd y2 = sys.lu.solve(v2);
  FisherMatrix h;
  h.h11 = 0.5 * v1.dot(y1);
  h.h12 = 0.5 * v1.dot(y2);
  h.h22 = 0.5 * v2.dot(y2);
  return h;
}

SLDRep sld(const model::SourcePair& pair,
           const model::DiffractionGeometry& geom, int which) {
  if (which != 1 && which != 2) throw UsageError("sld: which must be 1 or 2");
  model::ImageState state = model::build_image_state(pair, geom);
  KroneckerSystem sys = build_system(state);
  if (sys.condition > kConditionLimit)
    throw SingularError(
        "sld: covariance is degenerate (antisymmetric mode a- is vacuum at "
        "s = 1); the SLD quadratic form is not defined");
  Eigen::VectorXd y = sys.lu.solve(vec4(model::cov_derivative(pair, geom, which)));
  SLDRep rep;
  rep.quad = unvec4(y);
  rep.offset = -0.5 * (state.cov * rep.quad).trace();
  rep.linear = Eigen::Vector4d::Zero();
  return rep;
}

double weak_commutation(const model::SourcePair& pair,
                        const model::DiffractionGeometry& geom) {
  model::ImageState state = model::build_image_state(pair, geom);
  KroneckerSystem sys = build_system(state);
  if (sys.condition > kConditionLimit)
    throw SingularError("weak_commutation: degenerate covariance at s = 1");
  Eigen::VectorXd y1 = sys.lu.solve(vec4(model::cov_derivative(pair, geom, 1)));
  Eigen::VectorXd y2 = sys.lu.solve(vec4(model::cov_derivative(pair, geom, 2)));
  Eigen::Matrix4d k = model::commutation_signature();
  Eigen::MatrixXd mid =
      kron4(state.cov.conjugate(), k) - kron4(k, state.cov);
  // Displacement term 4 d_1 d^dag sigma^-1 K sigma^-1 d_2 d is identically
  // zero for thermal states.
  return y1.dot(mid * y2);
}

double qfi_equal_limit_closed(double t1, double omega, double eta, double s) {
  model::validate({t1, t1, omega, eta});
  if (!(s >= 0.0) || s > 1.0)
    throw DomainError("qfi_equal_limit_closed: s must lie in [0, 1]");
  double em = std::expm1(omega / t1);
  double chi = 1.0 + em;
  double one_m_s2 = (1.0 - s) * (1.0 + s);
  // Regrouped numerator: free of the cancellation the raw bracket suffers at
  // high temperature, and manifestly positive.
  double num = 0.5 * em * em * (2.0 - s * s) + 2.0 * em * eta * one_m_s2 +
               eta * eta * one_m_s2 * one_m_s2;
  double den = t1 * t1 * t1 * t1 * em * em *
               ((em + eta) * (em + eta) - s * s * eta * eta) *
               (em + eta * (1.0 - s * s));
  return chi * chi * omega * omega * eta * num / den;
}

}  // namespace qtherm::fisher
