#pragma once

namespace qtherm {

/// Symmetric 2x2 Fisher information matrix over (T1, T2), quantum or
/// classical. Units 1/T^2.
struct FisherMatrix {
  double h11 = 0.0;
  double h22 = 0.0;
  double h12 = 0.0;
  bool limit_path = false;  ///< true when the s -> 1 limit expression was used

  double det() const { return h11 * h22 - h12 * h12; }
};

}  // namespace qtherm
