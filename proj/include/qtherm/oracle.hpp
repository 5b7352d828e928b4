#pragma once
// Brute-force ground truth in truncated Fock space. Everything the closed
// forms claim is re-derived here nonperturbatively: the image-plane density
// matrix (two thermal modes through a beam-splitter), spectral QFI and SLDs
// from finite-difference state derivatives, and quadrature overlaps.
//
// The image state commutes with the total photon number, so the density
// matrix is stored sector by sector: block S holds the (S+1)x(S+1) matrix
// over |n+ = S-j, n- = j>, j = 0..S. All operator algebra stays per sector.

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "qtherm/model.hpp"

namespace qtherm::oracle {

class FockState {
 public:
  FockState(int dim, std::vector<Eigen::MatrixXd> blocks, double tail_bound);

  int dim() const { return dim_; }
  int sector_max() const { return static_cast<int>(blocks_.size()) - 1; }
  double tail_bound() const { return tail_bound_; }

  const Eigen::MatrixXd& block(int sector) const { return blocks_[sector]; }

  double trace() const;

  /// <n+, n-| rho |n+, n-> (0 outside the kept sectors).
  double number_diagonal(int n_plus, int n_minus) const;

  /// Expectation of a sector-preserving observable given by its blocks.
  double expect(const std::function<Eigen::MatrixXd(int)>& op_block) const;

  /// Covariance matrix <{dA_i, dA_j^dag}> over A = (a+, a-, a+^dag, a-^dag),
  /// reconstructed from second moments of the stored state.
  Eigen::Matrix4d second_moments() const;

  /// <a+^dag a-> (real for this family); fixes the off-diagonal sign of V.
  double cross_correlation() const;

  /// Linear combination of states on the same sector layout.
  static FockState combine(const std::vector<std::pair<double, const FockState*>>& terms);

 private:
  int dim_;
  std::vector<Eigen::MatrixXd> blocks_;
  double tail_bound_;
};

/// Image-plane density matrix with per-mode truncation dim: the P-function
/// moment matrix V is diagonalized, two thermal modes with its eigenvalue
/// occupancies are built in Fock space, and the rotation is applied sector by
/// sector as a beam-splitter unitary. Throws ConvergenceError with a
/// required-dim estimate when the thermal tails exceed 1e-10 at this dim.
FockState fock_density(const model::SourcePair& pair,
                       const model::DiffractionGeometry& geom, int dim,
                       bool check_tail = true);

/// d rho / d T_which by central differences with one Richardson step.
/// rel_step is relative to T_which.
FockState fock_density_derivative(const model::SourcePair& pair,
                                  const model::DiffractionGeometry& geom,
                                  int dim, int which,
                                  double rel_step = 1e-4);

/// Number-basis sector matrices (index j = photons in the minus mode).
Eigen::MatrixXd sector_n_plus(int sector);
Eigen::MatrixXd sector_n_minus(int sector);
Eigen::MatrixXd sector_exchange(int sector);  ///< a+^dag a- + a-^dag a+

/// Fock-space blocks of a zero-linear-part quadratic form
/// dA^dag Phi dA + offset for block-structured Phi (no squeezing terms).
std::vector<Eigen::MatrixXd> quadratic_form_blocks(const Eigen::Matrix4d& phi,
                                                   double offset,
                                                   int sector_max);

struct SpectralQfi {
  double value;
  double discarded_weight;  ///< |<a|drho|b>|^2 mass on near-degenerate pairs
  bool warning;             ///< discarded_weight > 1e-8
};

/// QFI entry 2 sum_ab <a|drho_1|b><b|drho_2|a> / (p_a + p_b) from the
/// spectral decomposition of rho. Pairs with p_a + p_b < 1e-12 are skipped
/// and their weight recorded.
SpectralQfi spectral_qfi(const FockState& rho, const FockState& drho1,
                         const FockState& drho2);

inline SpectralQfi spectral_qfi(const FockState& rho, const FockState& drho) {
  return spectral_qfi(rho, drho, drho);
}

/// SLD blocks L_ab = 2 <a|drho|b> / (p_a + p_b) in the number basis.
std::vector<Eigen::MatrixXd> sld_blocks(const FockState& rho,
                                        const FockState& drho);

/// tr[rho [L1, L2]] for sector-diagonal SLD blocks.
double commutator_expectation(const FockState& rho,
                              const std::vector<Eigen::MatrixXd>& l1,
                              const std::vector<Eigen::MatrixXd>& l2);

/// Overlap integral of the displaced Gaussian PSFs by Romberg quadrature
/// (independent of the adaptive-Simpson path in the model module).
double quadrature_overlap(double d, double varpi);

struct FdResult {
  double value;
  double error;  ///< estimate from the last Richardson level
};

/// Central-difference derivative with two Richardson extrapolation levels.
FdResult fd_derivative(const std::function<double(double)>& f, double x,
                       double step);

}  // namespace qtherm::oracle
