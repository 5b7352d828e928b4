#pragma once
// Simultaneous versus individual estimation bounds and the ratio mu between
// them, plus the information gain from knowing a priori that T1 = T2.

#include "qtherm/fisher_matrix.hpp"

namespace qtherm::estimation {

enum class MuConvention {
  resource,  ///< mu = h11 h22 / (2 (h11 h22 - h12^2)); consistent with the
             ///< nu/2-split individual bound, so mu = sim/ind exactly
  paper      ///< same without the resource factor 2
};

/// Total-variance bound (1/nu)(h11 + h22)/det H of the joint measurement.
/// Returns +inf when det H <= 0 (maximum diffraction: no simultaneous
/// information).
double simultaneous_bound(const FisherMatrix& h, double nu = 1.0);

/// Total-variance bound (2/nu)(1/h11 + 1/h22) when each temperature is
/// measured separately nu/2 times. Finite for all s in [0, 1].
double individual_bound(const FisherMatrix& h, double nu = 1.0);

/// Ratio of the simultaneous to the individual bound under equal resources.
/// +inf when det H <= 0.
double ratio_mu(const FisherMatrix& h,
                MuConvention convention = MuConvention::resource);

struct StrategyComparison {
  double sim_bound;
  double ind_bound;
  double mu;
  double nu;
};

StrategyComparison compare_strategies(
    const FisherMatrix& h, double nu = 1.0,
    MuConvention convention = MuConvention::resource);

/// Prior-information comparison at equal temperatures: f_prior is the
/// known-equal QFI, two_h11 the independent-parameter total, and gain their
/// ratio, which runs from 1 at s = 0 to 2 at s = 1.
struct PriorGain {
  double f_prior;
  double two_h11;
  double gain;
};

PriorGain prior_gain(double t1, double omega, double eta, double s);

}  // namespace qtherm::estimation
