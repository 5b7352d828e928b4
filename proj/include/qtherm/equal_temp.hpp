#pragma once
// Single-parameter temperature QFI when both sources are known a priori to
// share one temperature T. The image state is then a product of two thermal
// modes with occupancies M+- = eta(1 +- s)/(exp(omega/T) - 1).

namespace qtherm::equal_temp {

enum class Branch { plus, minus };

/// Photon-number probability p(n) = M^n/(M+1)^(n+1) of the +/- image mode.
double fock_prob(int n, Branch branch, double t, double omega, double eta,
                 double s);

struct EqualTempResult {
  double qfi;        ///< closed-form QFI of T (units 1/T^2)
  double qfi_low_t;  ///< low-temperature approximation 2 w^2 eta e^{-w/T}/T^4
  double qfi_high_t; ///< high-temperature approximation
  double m_plus;     ///< occupancy of the symmetric image mode
  double m_minus;    ///< occupancy of the antisymmetric image mode
};

/// Closed-form equal-temperature QFI plus its two limit approximations.
/// Finite for every s in [0, 1]; strictly positive for T, omega, eta > 0.
EqualTempResult qfi_equal(double t, double omega, double eta, double s);

/// Same QFI summed term by term over the photon-number distributions, with a
/// per-branch geometric tail bound below tail_tol. Serves as the second,
/// independent route to the closed form.
double qfi_equal_series(double t, double omega, double eta, double s,
                        double tail_tol);

}  // namespace qtherm::equal_temp
