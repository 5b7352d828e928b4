#pragma once
// Hermite-Gauss spatial-mode demultiplexing: overlap coefficients beta_k,
// per-mode photon counts, and the moment-optimized measurement sensitivity
// M = D^T Gamma^-1 D for photon counting in modes 0..K.

#include <Eigen/Dense>

#include <vector>

#include "qtherm/model.hpp"

namespace qtherm::demux {

enum class BetaExponent {
  negative,  ///< exp(-d^2/(8 varpi^2)): normalized, sum_k beta_k^2 = 1
  paper      ///< exp(+d^2/(8 varpi^2)): paper-literal variant for comparison
};

/// Overlap beta_k(d) between HG mode k and a Gaussian image displaced by d/2:
/// beta_k = exp(-d^2/(8 varpi^2)) (d/(2 varpi))^k / sqrt(k!), evaluated in
/// log space for large k. The two displaced images have f_{+-,k} =
/// (+-1)^k beta_k.
double hg_beta(int k, double d, double varpi,
               BetaExponent exponent = BetaExponent::negative);

/// sum_k (-1)^k beta_k^2 summed to a Poisson tail bound below tol; equals the
/// Gaussian overlap s for the same (d, varpi).
double overlap_from_betas(double d, double varpi, double tol = 1e-14);

/// Mean photon count <N_k> in HG mode k. The general expression
/// N eta (|f+|^2 + |f-|^2) - gamma N eta (|f+|^2 - |f-|^2) reduces to
/// 2 N eta beta_k^2 for the centered HG basis.
double mean_photon_hg(int k, const model::SourcePair& pair, double d,
                      double varpi);

/// Result of optimizing the error-transfer sensitivity over all linear
/// combinations of the supplied observables.
struct MomentSensitivity {
  Eigen::VectorXd coefficients;  ///< optimal m, proportional to Gamma^+ D
  double value;                  ///< M = D^T Gamma^+ D
  int rank;                      ///< numerical rank of Gamma
  bool used_pinv;                ///< true when Gamma was singular
};

/// M = D^T Gamma^-1 D with D the parameter derivatives of the observable
/// means and Gamma their covariance. A singular Gamma falls back to the
/// pseudo-inverse with a rank diagnostic.
MomentSensitivity moment_sensitivity(const Eigen::VectorXd& d_means,
                                     const Eigen::MatrixXd& covariance);

/// Scalars entering the closed-form HG sensitivity.
struct HGMomentSummary {
  double a_plus;   ///< A+ = 2/(1 + gamma^2) + 2 N eta S2
  double a_minus;  ///< A- = 2/(1 - gamma^2) + 2 N eta S2
  double b;        ///< B = 2 N eta S1
  double s1;       ///< sum (-1)^k beta_k^2, k <= K
  double s2;       ///< sum beta_k^2, k <= K
  std::vector<double> beta;  ///< beta_0..beta_K
};

HGMomentSummary hg_moment_summary(const model::SourcePair& pair, double d,
                                  double varpi, int k_max);

/// Analytic mean-derivative vector D and count covariance Gamma of the HG
/// photon counts N_0..N_K, assembled from Wick factorization of the Gaussian
/// moments. Feeding these to moment_sensitivity reproduces hg_sensitivity.
struct HGCountsModel {
  Eigen::VectorXd d_means;
  Eigen::MatrixXd covariance;
};

HGCountsModel hg_counts_model(const model::SourcePair& pair, double d,
                              double varpi, int k_max, int which);

/// Closed-form sensitivity of T_which from photon counts in HG modes 0..K.
/// Satisfies 0 <= M <= H^ii and is nondecreasing in k_max.
double hg_sensitivity(const model::SourcePair& pair,
                      const model::DiffractionGeometry& geom, int k_max,
                      int which = 1);

/// Full-basis (K -> infinity) sensitivity. At s = 1 it equals H^ii exactly,
/// independent of the attenuation factor.
double hg_sensitivity_full(const model::SourcePair& pair,
                           const model::DiffractionGeometry& geom,
                           int which = 1);

/// Low-flux photon-counting Fisher information sum_k (d_i N_k)^2 / N_k over
/// modes 0..K; hg_sensitivity approaches it as N eta -> 0.
double poisson_fi(const model::SourcePair& pair,
                  const model::DiffractionGeometry& geom, int k_max,
                  int which = 1);

}  // namespace qtherm::demux
