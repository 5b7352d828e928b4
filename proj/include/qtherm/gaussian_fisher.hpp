#pragma once
// Multiparameter QFI matrix, symmetric logarithmic derivatives and the weak
// commutation scalar for the two-mode image-plane Gaussian state.
//
// Everything is driven by the covariance-only Gaussian formulas
//   H^ij = 1/2 vec[d_i sigma]^T R^-1 vec[d_j sigma],
//   L_i  = dA^dag Phi_i dA - 1/2 tr[sigma Phi_i],  vec[Phi_i] = R^-1 vec[d_i sigma],
// with R = conj(sigma) (x) sigma - K (x) K; the displacement terms vanish for
// thermal states. The 16x16 Kronecker system is solved by dense LU with a
// condition guard that switches to the analytic s -> 1 limit.

#include <Eigen/Dense>

#include "qtherm/fisher_matrix.hpp"
#include "qtherm/model.hpp"

namespace qtherm::fisher {

/// QFI matrix over (T1, T2). For s extremely close to 1 the Kronecker system
/// is numerically singular and the rank-one limiting matrix is returned with
/// limit_path set (there h11*h22 = h12^2).
FisherMatrix qfi_matrix(const model::SourcePair& pair,
                        const model::DiffractionGeometry& geom);

/// Quadratic-form representation of one SLD: L = dA^dag quad dA + offset.
/// The linear part is identically zero because the displacement is zero.
struct SLDRep {
  Eigen::Matrix4d quad;
  double offset;
  Eigen::Vector4d linear;
};

/// SLD for T_which (1 or 2). Throws SingularError naming the vacuum
/// antisymmetric mode when the state is degenerate (s = 1).
SLDRep sld(const model::SourcePair& pair,
           const model::DiffractionGeometry& geom, int which);

/// tr[rho [L1, L2]] evaluated through the covariance formula. Vanishes for
/// this state family; returned so tests can pin |value| < 1e-9.
double weak_commutation(const model::SourcePair& pair,
                        const model::DiffractionGeometry& geom);

/// Closed form of H^11 = H^22 at t2 = t1 (equal temperatures, independent
/// parameters). Equals half the equal-temperature QFI at s = 0 and a quarter
/// of it at s = 1.
double qfi_equal_limit_closed(double t1, double omega, double eta, double s);

}  // namespace qtherm::fisher
