#include "qtherm.h"

#include <cstring>
#include <iostream>
#include <new>
#include <string>

#include "qtherm/counting.hpp"
#include "qtherm/demux.hpp"
#include "qtherm/equal_temp.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/estimation.hpp"
#include "qtherm/gaussian_fisher.hpp"
#include "qtherm/model.hpp"
#include "qtherm/selftest.hpp"

using qtherm::model::DiffractionGeometry;
using qtherm::model::SourcePair;

struct qtherm_scene {
  SourcePair pair;
  DiffractionGeometry geom = DiffractionGeometry::from_overlap(0.0);
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
qtherm_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return QTHERM_OK;
  } catch (const qtherm::DomainError& e) {
    g_last_error = e.what();
    return QTHERM_ERR_DOMAIN;
  } catch (const qtherm::RangeError& e) {
    g_last_error = e.what();
    return QTHERM_ERR_RANGE;
  } catch (const qtherm::SingularError& e) {
    g_last_error = e.what();
    return QTHERM_ERR_SINGULAR;
  } catch (const qtherm::ConvergenceError& e) {
    g_last_error = e.what();
    return QTHERM_ERR_NO_CONVERGENCE;
  } catch (const qtherm::UsageError& e) {
    g_last_error = e.what();
    return QTHERM_ERR_USAGE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return QTHERM_ERR_NO_CONVERGENCE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return QTHERM_ERR_USAGE;
  }
}

qtherm_status usage(const char* message) {
  g_last_error = message;
  return QTHERM_ERR_USAGE;
}

}  // namespace

extern "C" {

const char* qtherm_version(void) { return "0.1.0"; }

const char* qtherm_status_name(qtherm_status status) {
  switch (status) {
    case QTHERM_OK: return "ok";
    case QTHERM_ERR_DOMAIN: return "domain error";
    case QTHERM_ERR_RANGE: return "range error";
    case QTHERM_ERR_SINGULAR: return "singular";
    case QTHERM_ERR_NO_CONVERGENCE: return "no convergence";
    case QTHERM_ERR_USAGE: return "usage error";
  }
  return "unknown";
}

const char* qtherm_last_error(void) { return g_last_error.c_str(); }

qtherm_status qtherm_scene_new(double t1, double t2, double omega, double eta,
                               qtherm_scene** out) {
  if (!out) return usage("qtherm_scene_new: out is null");
  *out = nullptr;
  return guarded([&] {
    SourcePair pair{t1, t2, omega, eta};
    qtherm::model::validate(pair);
    *out = new qtherm_scene{pair};
  });
}

qtherm_status qtherm_scene_set_overlap(qtherm_scene* scene, double s) {
  if (!scene) return usage("qtherm_scene_set_overlap: scene is null");
  return guarded([&] { scene->geom = DiffractionGeometry::from_overlap(s); });
}

qtherm_status qtherm_scene_set_separation(qtherm_scene* scene, double d,
                                          double varpi) {
  if (!scene) return usage("qtherm_scene_set_separation: scene is null");
  return guarded(
      [&] { scene->geom = DiffractionGeometry::from_separation(d, varpi); });
}

void qtherm_scene_free(qtherm_scene* scene) { delete scene; }

qtherm_status qtherm_derived_params(const qtherm_scene* scene, double* chi1,
                                    double* chi2, double* gamma,
                                    double* n_total) {
  if (!scene) return usage("qtherm_derived_params: scene is null");
  return guarded([&] {
    auto dp = qtherm::model::derive_params(scene->pair);
    if (chi1) *chi1 = dp.chi1;
    if (chi2) *chi2 = dp.chi2;
    if (gamma) *gamma = dp.gamma;
    if (n_total) *n_total = dp.n_total;
  });
}

qtherm_status qtherm_overlap(const qtherm_scene* scene, double* s) {
  if (!scene || !s) return usage("qtherm_overlap: null argument");
  return guarded([&] { *s = scene->geom.overlap(); });
}

qtherm_status qtherm_mode_occupations(const qtherm_scene* scene,
                                      double* n_plus, double* n_minus) {
  if (!scene) return usage("qtherm_mode_occupations: scene is null");
  return guarded([&] {
    auto st = qtherm::model::build_image_state(scene->pair, scene->geom);
    if (n_plus) *n_plus = st.n_plus;
    if (n_minus) *n_minus = st.n_minus;
  });
}

qtherm_status qtherm_covariance(const qtherm_scene* scene, double cov[16]) {
  if (!scene || !cov) return usage("qtherm_covariance: null argument");
  return guarded([&] {
    auto st = qtherm::model::build_image_state(scene->pair, scene->geom);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) cov[4 * i + j] = st.cov(i, j);
  });
}

qtherm_status qtherm_gaussian_overlap(double d, double varpi, double* s) {
  if (!s) return usage("qtherm_gaussian_overlap: s is null");
  return guarded([&] { *s = qtherm::model::gaussian_overlap(d, varpi); });
}

qtherm_status qtherm_qfi_equal(const qtherm_scene* scene, double* qfi,
                               double* qfi_low_t, double* qfi_high_t) {
  if (!scene) return usage("qtherm_qfi_equal: scene is null");
  return guarded([&] {
    auto r = qtherm::equal_temp::qfi_equal(scene->pair.t1, scene->pair.omega,
                                           scene->pair.eta,
                                           scene->geom.overlap());
    if (qfi) *qfi = r.qfi;
    if (qfi_low_t) *qfi_low_t = r.qfi_low_t;
    if (qfi_high_t) *qfi_high_t = r.qfi_high_t;
  });
}

qtherm_status qtherm_qfi_equal_series(const qtherm_scene* scene,
                                      double tail_tol, double* qfi) {
  if (!scene || !qfi) return usage("qtherm_qfi_equal_series: null argument");
  return guarded([&] {
    *qfi = qtherm::equal_temp::qfi_equal_series(
        scene->pair.t1, scene->pair.omega, scene->pair.eta,
        scene->geom.overlap(), tail_tol);
  });
}

qtherm_status qtherm_qfi_matrix(const qtherm_scene* scene, double* h11,
                                double* h12, double* h22,
                                int* used_limit_path) {
  if (!scene) return usage("qtherm_qfi_matrix: scene is null");
  return guarded([&] {
    auto h = qtherm::fisher::qfi_matrix(scene->pair, scene->geom);
    if (h11) *h11 = h.h11;
    if (h12) *h12 = h.h12;
    if (h22) *h22 = h.h22;
    if (used_limit_path) *used_limit_path = h.limit_path ? 1 : 0;
  });
}

qtherm_status qtherm_weak_commutation(const qtherm_scene* scene,
                                      double* value) {
  if (!scene || !value) return usage("qtherm_weak_commutation: null argument");
  return guarded([&] {
    *value = qtherm::fisher::weak_commutation(scene->pair, scene->geom);
  });
}

qtherm_status qtherm_qfi_equal_limit(const qtherm_scene* scene, double* h11) {
  if (!scene || !h11) return usage("qtherm_qfi_equal_limit: null argument");
  return guarded([&] {
    *h11 = qtherm::fisher::qfi_equal_limit_closed(
        scene->pair.t1, scene->pair.omega, scene->pair.eta,
        scene->geom.overlap());
  });
}

qtherm_status qtherm_simultaneous_bound(const qtherm_scene* scene, double nu,
                                        double* bound) {
  if (!scene || !bound) return usage("qtherm_simultaneous_bound: null argument");
  return guarded([&] {
    auto h = qtherm::fisher::qfi_matrix(scene->pair, scene->geom);
    *bound = qtherm::estimation::simultaneous_bound(h, nu);
  });
}

qtherm_status qtherm_individual_bound(const qtherm_scene* scene, double nu,
                                      double* bound) {
  if (!scene || !bound) return usage("qtherm_individual_bound: null argument");
  return guarded([&] {
    auto h = qtherm::fisher::qfi_matrix(scene->pair, scene->geom);
    *bound = qtherm::estimation::individual_bound(h, nu);
  });
}

qtherm_status qtherm_ratio_mu(const qtherm_scene* scene,
                              qtherm_mu_convention convention, double* mu) {
  if (!scene || !mu) return usage("qtherm_ratio_mu: null argument");
  if (convention != QTHERM_MU_RESOURCE && convention != QTHERM_MU_PAPER)
    return usage("qtherm_ratio_mu: invalid convention");
  return guarded([&] {
    auto h = qtherm::fisher::qfi_matrix(scene->pair, scene->geom);
    *mu = qtherm::estimation::ratio_mu(
        h, convention == QTHERM_MU_RESOURCE
               ? qtherm::estimation::MuConvention::resource
               : qtherm::estimation::MuConvention::paper);
  });
}

qtherm_status qtherm_prior_gain(const qtherm_scene* scene, double* f_prior,
                                double* two_h11, double* gain) {
  if (!scene) return usage("qtherm_prior_gain: scene is null");
  return guarded([&] {
    auto g = qtherm::estimation::prior_gain(scene->pair.t1, scene->pair.omega,
                                            scene->pair.eta,
                                            scene->geom.overlap());
    if (f_prior) *f_prior = g.f_prior;
    if (two_h11) *two_h11 = g.two_h11;
    if (gain) *gain = g.gain;
  });
}

qtherm_status qtherm_hg_beta(int k, double d, double varpi,
                             qtherm_beta_exponent exponent, double* beta) {
  if (!beta) return usage("qtherm_hg_beta: beta is null");
  if (exponent != QTHERM_BETA_NEGATIVE && exponent != QTHERM_BETA_PAPER)
    return usage("qtherm_hg_beta: invalid exponent tag");
  return guarded([&] {
    *beta = qtherm::demux::hg_beta(k, d, varpi,
                                   exponent == QTHERM_BETA_NEGATIVE
                                       ? qtherm::demux::BetaExponent::negative
                                       : qtherm::demux::BetaExponent::paper);
  });
}

qtherm_status qtherm_hg_mean_photon(const qtherm_scene* scene, int k,
                                    double* mean) {
  if (!scene || !mean) return usage("qtherm_hg_mean_photon: null argument");
  return guarded([&] {
    auto [d, varpi] = scene->geom.demux_geometry();
    *mean = qtherm::demux::mean_photon_hg(k, scene->pair, d, varpi);
  });
}

qtherm_status qtherm_hg_sensitivity(const qtherm_scene* scene, int which,
                                    int k_max, double* m) {
  if (!scene || !m) return usage("qtherm_hg_sensitivity: null argument");
  return guarded([&] {
    *m = qtherm::demux::hg_sensitivity(scene->pair, scene->geom, k_max, which);
  });
}

qtherm_status qtherm_hg_sensitivity_full(const qtherm_scene* scene, int which,
                                         double* m) {
  if (!scene || !m) return usage("qtherm_hg_sensitivity_full: null argument");
  return guarded([&] {
    *m = qtherm::demux::hg_sensitivity_full(scene->pair, scene->geom, which);
  });
}

qtherm_status qtherm_joint_prob(const qtherm_scene* scene, int n_plus,
                                int n_minus, qtherm_f21_series series,
                                double* p) {
  if (!scene || !p) return usage("qtherm_joint_prob: null argument");
  if (series != QTHERM_F21_STANDARD && series != QTHERM_F21_PAPER)
    return usage("qtherm_joint_prob: invalid series tag");
  return guarded([&] {
    *p = qtherm::counting::joint_prob(
        n_plus, n_minus, scene->pair, scene->geom,
        series == QTHERM_F21_STANDARD ? qtherm::counting::F21Series::standard
                                      : qtherm::counting::F21Series::paper);
  });
}

qtherm_status qtherm_counting_fi_matrix(const qtherm_scene* scene,
                                        double tail_tol, double* f11,
                                        double* f12, double* f22) {
  if (!scene) return usage("qtherm_counting_fi_matrix: scene is null");
  return guarded([&] {
    auto fi = qtherm::counting::counting_fi_matrix(scene->pair, scene->geom,
                                                   tail_tol);
    if (f11) *f11 = fi.h11;
    if (f12) *f12 = fi.h12;
    if (f22) *f22 = fi.h22;
  });
}

qtherm_status qtherm_selftest(int verbose, int* failures) {
  if (!failures) return usage("qtherm_selftest: failures is null");
  return guarded([&] { *failures = qtherm::run_selftest(std::cout, verbose != 0); });
}

}  // extern "C"
