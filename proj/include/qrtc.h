/* qrtc — identical-quanta release-timing channel toolkit.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed through this API; every function returns a qrtc_status and
 * writes results through out-parameters. qrtc_last_error() carries a
 * human-readable detail message for the calling thread's most recent failure.
 *
 * Conventions: all information quantities are in nats; time is dimensionless
 * (rates and deadlines only enter through lambda*tau and chi = lambda/rho).
 */
#ifndef QRTC_H
#define QRTC_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qrtc_status {
    QRTC_OK = 0,
    QRTC_ERR_INVALID_ARGUMENT = 1,
    QRTC_ERR_DOMAIN = 2,
    QRTC_ERR_INTERNAL = 3
} qrtc_status;

typedef struct qrtc_model qrtc_model;       /* first-passage law */
typedef struct qrtc_marginal qrtc_marginal; /* iid emission-time marginal */
typedef struct qrtc_rng qrtc_rng;           /* seeded random stream */

typedef struct qrtc_estimate {
    double mean;
    double std_error;
    long long samples;
    unsigned long long seed;
} qrtc_estimate;

const char* qrtc_status_name(qrtc_status status);
/* Thread-local detail for the most recent error; empty string when clean. */
const char* qrtc_last_error(void);

/* ---- first-passage models ---- */
qrtc_status qrtc_model_exponential(double rate, qrtc_model** out);
qrtc_status qrtc_model_weibull(double rate, double shape, qrtc_model** out);
void qrtc_model_free(qrtc_model* model);
qrtc_status qrtc_model_density(const qrtc_model* model, double d, double* out);
qrtc_status qrtc_model_cdf(const qrtc_model* model, double d, double* out);
qrtc_status qrtc_model_ccdf(const qrtc_model* model, double d, double* out);
qrtc_status qrtc_model_quantile(const qrtc_model* model, double q, double* out);
qrtc_status qrtc_model_mean(const qrtc_model* model, double* out);

/* ---- emission marginals ---- */
qrtc_status qrtc_marginal_deadline(double rate, double tau, qrtc_marginal** out);
qrtc_status qrtc_marginal_uniform(double tau, qrtc_marginal** out);
qrtc_status qrtc_marginal_point(double location, qrtc_marginal** out);
void qrtc_marginal_free(qrtc_marginal* marginal);
qrtc_status qrtc_phi(const qrtc_marginal* marginal, const qrtc_model* model, double t,
                     double* out);
qrtc_status qrtc_expected_phi_pow(const qrtc_marginal* marginal, int k, double* out);

/* ---- sampling ---- */
qrtc_status qrtc_rng_create(unsigned long long seed, qrtc_rng** out);
qrtc_status qrtc_rng_stream(unsigned long long root_seed, unsigned long long stream,
                            qrtc_rng** out);
void qrtc_rng_free(qrtc_rng* rng);
qrtc_status qrtc_sample_passage(const qrtc_model* model, qrtc_rng* rng, double* out);
qrtc_status qrtc_sample_emissions(const qrtc_marginal* marginal, int m, qrtc_rng* rng,
                                  double* out_times);
/* Fills t, d and s_sorted (each of length m) and the sorting permutation
 * omega (s_sorted[i] == t[omega[i]] + d[omega[i]]). */
qrtc_status qrtc_simulate_channel_use(const qrtc_marginal* marginal, const qrtc_model* model,
                                      int m, qrtc_rng* rng, double* t, double* d,
                                      double* s_sorted, int* omega);

/* ---- admissible permutations ---- */
/* log |Omega| plus the exact count when m <= 20 (exact_valid != 0). */
qrtc_status qrtc_count_admissible(const double* t, const double* s, int m, double* log_count,
                                  unsigned long long* exact, int* exact_valid);
qrtc_status qrtc_perm_entropy(const qrtc_model* model, const double* t, const double* s_sorted,
                              int m, double* out);

/* ---- analytic bounds ---- */
qrtc_status qrtc_theta_bar(const qrtc_marginal* marginal, const qrtc_model* model, int m_total,
                           int m, int ell, double* out);
qrtc_status qrtc_gamma_bar(const qrtc_marginal* marginal, const qrtc_model* model, int m_total,
                           int ell, double* out);
qrtc_status qrtc_delta_gamma_general(const qrtc_marginal* marginal, const qrtc_model* model,
                                     int m_total, int ell, double* out);
qrtc_status qrtc_delta_gamma_deadline(long long m_total, double lambda_tau, long long k,
                                      double* out);
qrtc_status qrtc_h_up(const qrtc_marginal* marginal, const qrtc_model* model, int m_total,
                      double* out);
qrtc_status qrtc_h_omega_exponential(long long m_total, double lambda_tau, double* out);
qrtc_status qrtc_mi_ordered_lower(long long m_total, double lambda_tau, double* out);
qrtc_status qrtc_cq_finite(long long m_total, double chi, double* out);
qrtc_status qrtc_cq_simple(double chi, double* out);
qrtc_status qrtc_cq_series(double chi, double rel_tol, double* raw, double* clamped);
/* use_series == 0: rho * max{log chi, 0}; otherwise rho * clamped series bound. */
qrtc_status qrtc_ct_bound(double lambda, double chi, int use_series, double* out);
qrtc_status qrtc_binom_expect_log_factorial(long long trials, double p, double* out);

/* ---- Monte Carlo estimators ---- */
qrtc_status qrtc_estimate_h_omega(const qrtc_marginal* marginal, const qrtc_model* model, int m,
                                  long long n, unsigned long long seed, qrtc_estimate* out);
qrtc_status qrtc_estimate_log_count(const qrtc_marginal* marginal, const qrtc_model* model,
                                    int m, long long n, unsigned long long seed,
                                    qrtc_estimate* out);
/* Histogram-MI check of the sorting-loss decomposition at M = 2. */
qrtc_status qrtc_estimate_mi_decomposition(const qrtc_marginal* marginal,
                                           const qrtc_model* model, long long n,
                                           unsigned long long seed, qrtc_estimate* lhs,
                                           double* rhs_analytic, double* gap);
qrtc_status qrtc_epoch_feasibility(const qrtc_model* model, long long m, double rho,
                                   double epsilon, double* cdf_bound, double* m_gbar,
                                   int* feasible_trend);

/* ---- validation ---- */
/* Runs every cross-validation suite; *json_report (free with
 * qrtc_string_free) carries the full report, *all_passed the verdict. */
qrtc_status qrtc_validate(long long samples, unsigned long long seed, double rho, double epsilon,
                          int* all_passed, char** json_report);
void qrtc_string_free(char* str);

#ifdef __cplusplus
}
#endif

#endif /* QRTC_H */
