#pragma once
// Physical model of two diffraction-blurred thermal point sources and the
// Gaussian state they produce in the image plane.
//
// Units: hbar = k_B = 1 throughout, so temperatures and the optical angular
// frequency omega share one energy scale. Lengths (d, varpi) only ever enter
// through the dimensionless ratio d/varpi.

#include <Eigen/Dense>
#include <optional>

namespace qtherm::model {

/// Two monochromatic thermal sources viewed through a common imaging system.
struct SourcePair {
  double t1;     ///< temperature of source 1 (> 0)
  double t2;     ///< temperature of source 2 (> 0)
  double omega;  ///< optical angular frequency (> 0)
  double eta;    ///< attenuation factor of the imaging system, in (0, 1]
};

/// Throws qtherm::DomainError / qtherm::RangeError on invalid parameters.
/// Temperatures below omega/700 are rejected: exp(omega/T) would overflow.
void validate(const SourcePair& pair);

/// Occupancy-level quantities derived from a SourcePair.
///
/// gamma is the relative population asymmetry (n2 - n1)/(n1 + n2) of the
/// per-source mean occupancies n_i = 1/(chi_i - 1); the per-source
/// populations are then exactly n_total*(1 -+ gamma). gamma = 0 iff t1 = t2,
/// and |gamma| < 1 for finite positive temperatures.
struct DerivedParams {
  double chi1;      ///< exp(omega/t1)
  double chi2;      ///< exp(omega/t2)
  double chi1m1;    ///< expm1(omega/t1), kept for precision at high T
  double chi2m1;    ///< expm1(omega/t2)
  double gamma;     ///< population asymmetry, in (-1, 1)
  double n_total;   ///< N = (n1 + n2)/2, half the emitted mean photon number
};

DerivedParams derive_params(const SourcePair& pair);

/// d/dT_i of N and gamma; building blocks for all Fisher-matrix derivatives.
struct ParamGradients {
  double dn_dt[2];      ///< dN/dT_i
  double dgamma_dt[2];  ///< dgamma/dT_i
};

ParamGradients param_gradients(const SourcePair& pair);

/// Overlap s = \int psi(x + d/2) psi(x - d/2) dx of the two source images for
/// the L2-normalized Gaussian point-spread function of width varpi.
/// Evaluated by adaptive quadrature; s is in (0, 1], with s = 1 at d = 0.
double gaussian_overlap(double d, double varpi);

/// Degree of diffraction, either given directly as the overlap s or derived
/// from a source separation d and PSF width varpi.
class DiffractionGeometry {
 public:
  static DiffractionGeometry from_overlap(double s);
  static DiffractionGeometry from_separation(double d, double varpi);

  double overlap() const { return s_; }
  bool has_separation() const { return separation_.has_value(); }

  /// (d, varpi) pair for mode-demultiplexing calculations. When the geometry
  /// was given as a bare overlap, varpi = 1 and d is the Gaussian-overlap
  /// inverse d = varpi*sqrt(-2 ln s) (infinite at s = 0).
  std::pair<double, double> demux_geometry() const;

  double separation() const;
  double psf_width() const;

 private:
  DiffractionGeometry() = default;
  double s_ = 1.0;
  std::optional<double> separation_;
  std::optional<double> psf_width_;
};

/// Image-plane Gaussian state in the orthogonal +/- mode pair.
///
/// cov is the 4x4 covariance matrix over A = (a+, a-, a+^dag, a-^dag) with
/// entries <{dA_i, dA_j^dag}>; pmatrix is the 2x2 normal-ordered moment
/// matrix V with V(0,0) = N+, V(1,1) = N-, off-diagonal -gamma*sqrt(N+ N-).
/// Thermal states carry no coherence, so displacement is identically zero.
struct ImageState {
  double n_plus;    ///< N+ = N eta (1 + s)
  double n_minus;   ///< N- = N eta (1 - s)
  double gamma;
  Eigen::Matrix2d pmatrix;
  Eigen::Matrix4d cov;
  Eigen::Vector4d displacement;
};

ImageState build_image_state(const SourcePair& pair,
                             const DiffractionGeometry& geom);

/// d(cov)/dT_i for the image state, analytic through (N, gamma).
Eigen::Matrix4d cov_derivative(const SourcePair& pair,
                               const DiffractionGeometry& geom, int which);

/// K = diag(1, 1, -1, -1), the commutation signature of the A ordering.
Eigen::Matrix4d commutation_signature();

}  // namespace qtherm::model
