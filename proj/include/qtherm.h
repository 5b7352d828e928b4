/* qtherm C API: precision limits for two-source quantum thermometry under
 * diffraction.
 *
 * All functions return a qtherm_status; results go to out-parameters. A
 * scene bundles the source pair (t1, t2, omega, eta) with the diffraction
 * geometry (overlap s, or separation d and PSF width varpi) and is immutable
 * apart from its geometry setters. Scenes are cheap; create one per
 * parameter point. All calls are thread-safe as long as a scene is not
 * mutated concurrently with reads.
 *
 * Temperatures and omega share hbar = k_B = 1 units. Fisher quantities carry
 * units 1/T^2, variance bounds T^2.
 */
#ifndef QTHERM_H
#define QTHERM_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qtherm_status {
  QTHERM_OK = 0,
  QTHERM_ERR_DOMAIN = 1,         /* parameter outside its domain */
  QTHERM_ERR_RANGE = 2,          /* parameter outside representable range */
  QTHERM_ERR_SINGULAR = 3,       /* degenerate state or singular system */
  QTHERM_ERR_NO_CONVERGENCE = 4, /* series/quadrature tolerance not reached */
  QTHERM_ERR_USAGE = 5           /* null handle, bad tag, missing geometry */
} qtherm_status;

typedef enum qtherm_mu_convention {
  QTHERM_MU_RESOURCE = 0, /* resource-consistent: mu = h11 h22 / (2 det H) */
  QTHERM_MU_PAPER = 1     /* without the factor 2 */
} qtherm_mu_convention;

typedef enum qtherm_beta_exponent {
  QTHERM_BETA_NEGATIVE = 0, /* exp(-d^2/(8 varpi^2)); normalized */
  QTHERM_BETA_PAPER = 1     /* exp(+d^2/(8 varpi^2)) literal variant */
} qtherm_beta_exponent;

typedef enum qtherm_f21_series {
  QTHERM_F21_STANDARD = 0, /* Gauss hypergeometric series */
  QTHERM_F21_PAPER = 1     /* exp((1+n+)(1+n-)z) literal variant */
} qtherm_f21_series;

typedef struct qtherm_scene qtherm_scene; /* opaque */

const char* qtherm_version(void);
const char* qtherm_status_name(qtherm_status status);

/* Message for the most recent failure on this thread; empty string if none.
 * Valid until the next qtherm call on the same thread. */
const char* qtherm_last_error(void);

/* ---- scene lifecycle ---------------------------------------------------- */

/* Creates a scene with overlap s = 0 (no diffraction); set the geometry
 * afterwards. Requires t1, t2, omega > 0 (and >= omega/700), eta in (0,1]. */
qtherm_status qtherm_scene_new(double t1, double t2, double omega, double eta,
                               qtherm_scene** out);
qtherm_status qtherm_scene_set_overlap(qtherm_scene* scene, double s);
qtherm_status qtherm_scene_set_separation(qtherm_scene* scene, double d,
                                          double varpi);
void qtherm_scene_free(qtherm_scene* scene);

/* ---- model -------------------------------------------------------------- */

qtherm_status qtherm_derived_params(const qtherm_scene* scene, double* chi1,
                                    double* chi2, double* gamma,
                                    double* n_total);
qtherm_status qtherm_overlap(const qtherm_scene* scene, double* s);
qtherm_status qtherm_mode_occupations(const qtherm_scene* scene,
                                      double* n_plus, double* n_minus);
/* Row-major 4x4 covariance over (a+, a-, a+^dag, a-^dag). */
qtherm_status qtherm_covariance(const qtherm_scene* scene, double cov[16]);
/* Standalone Gaussian PSF overlap, no scene needed. */
qtherm_status qtherm_gaussian_overlap(double d, double varpi, double* s);

/* ---- equal temperatures (uses t1 as the shared T) ------------------------ */

qtherm_status qtherm_qfi_equal(const qtherm_scene* scene, double* qfi,
                               double* qfi_low_t, double* qfi_high_t);
qtherm_status qtherm_qfi_equal_series(const qtherm_scene* scene,
                                      double tail_tol, double* qfi);

/* ---- multiparameter bounds ----------------------------------------------- */

/* used_limit_path (may be NULL) reports whether the s -> 1 limiting matrix
 * replaced the dense Kronecker solve. */
qtherm_status qtherm_qfi_matrix(const qtherm_scene* scene, double* h11,
                                double* h12, double* h22,
                                int* used_limit_path);
qtherm_status qtherm_weak_commutation(const qtherm_scene* scene,
                                      double* value);
/* H^11 at t2 = t1 in closed form; evaluated at the scene's t1. */
qtherm_status qtherm_qfi_equal_limit(const qtherm_scene* scene, double* h11);
/* Bounds return +inf when det H <= 0 (no simultaneous information). */
qtherm_status qtherm_simultaneous_bound(const qtherm_scene* scene, double nu,
                                        double* bound);
qtherm_status qtherm_individual_bound(const qtherm_scene* scene, double nu,
                                      double* bound);
qtherm_status qtherm_ratio_mu(const qtherm_scene* scene,
                              qtherm_mu_convention convention, double* mu);
qtherm_status qtherm_prior_gain(const qtherm_scene* scene, double* f_prior,
                                double* two_h11, double* gain);

/* ---- Hermite-Gauss demultiplexing ---------------------------------------- */

qtherm_status qtherm_hg_beta(int k, double d, double varpi,
                             qtherm_beta_exponent exponent, double* beta);
qtherm_status qtherm_hg_mean_photon(const qtherm_scene* scene, int k,
                                    double* mean);
/* Sensitivity of T_which (1 or 2) from photon counts in HG modes 0..k_max. */
qtherm_status qtherm_hg_sensitivity(const qtherm_scene* scene, int which,
                                    int k_max, double* m);
qtherm_status qtherm_hg_sensitivity_full(const qtherm_scene* scene, int which,
                                         double* m);

/* ---- joint photon counting ------------------------------------------------ */

qtherm_status qtherm_joint_prob(const qtherm_scene* scene, int n_plus,
                                int n_minus, qtherm_f21_series series,
                                double* p);
qtherm_status qtherm_counting_fi_matrix(const qtherm_scene* scene,
                                        double tail_tol, double* f11,
                                        double* f12, double* f22);

/* ---- diagnostics ---------------------------------------------------------- */

/* Oracle-equivalence suite; *failures receives the number of failed checks.
 * verbose != 0 prints one line per check to stdout. */
qtherm_status qtherm_selftest(int verbose, int* failures);

#ifdef __cplusplus
}
#endif

#endif /* QTHERM_H */
