#pragma once
// Joint photon-number statistics of the +/- image modes and the classical
// Fisher information of that counting measurement.

#include <Eigen/Dense>

#include "qtherm/fisher_matrix.hpp"
#include "qtherm/model.hpp"

namespace qtherm::counting {

enum class F21Series {
  standard,  ///< Gauss series sum_m (a)_m (b)_m / ((1)_m m!) z^m
  paper      ///< paper-literal expansion sum_m (a b z)^m / m!
};

/// P(n+, n-) for the image-plane state,
///   P = (1-g^2)^(1+n+ +n-) N+^n+ N-^n- 2F1[1+n+, 1+n-; 1; z]
///       / (lam+^(n+ +1) lam-^(n- +1)),
/// lam+- = 1 + N+-(1 - g^2), z = g^2/(lam+ lam-). Evaluated in log space.
double joint_prob(int n_plus, int n_minus, const model::SourcePair& pair,
                  const model::DiffractionGeometry& geom,
                  F21Series series = F21Series::standard);

/// Probability together with its analytic temperature derivatives, chain-ruled
/// through (N+, N-, gamma^2).
struct JointProbGradient {
  double p;
  double dp_dt[2];
};

JointProbGradient joint_prob_gradient(int n_plus, int n_minus,
                                      const model::SourcePair& pair,
                                      const model::DiffractionGeometry& geom);

/// Truncated joint distribution. probs(i, j) = P(i, j); tail_mass is the
/// omitted probability 1 - sum(probs) and stays below the tail tolerance the
/// caps were chosen for.
struct CountDistribution {
  int cap_plus;
  int cap_minus;
  Eigen::MatrixXd probs;
  double tail_mass;
};

CountDistribution count_distribution(const model::SourcePair& pair,
                                     const model::DiffractionGeometry& geom,
                                     double tail_tol);

/// Classical FI matrix of joint photon counting, truncated at tail mass below
/// tail_tol, with analytic derivatives in (T1, T2). Dominated by the QFI
/// matrix entrywise on the diagonal. At s = 1 the antisymmetric mode is
/// vacuum and the sum collapses to the n- = 0 line; the matrix is then
/// rank one (det = 0: no simultaneous information).
FisherMatrix counting_fi_matrix(const model::SourcePair& pair,
                                const model::DiffractionGeometry& geom,
                                double tail_tol);

}  // namespace qtherm::counting
