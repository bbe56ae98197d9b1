#include "qrtc.h"

#include <cstring>
#include <new>
#include <span>
#include <stdexcept>
#include <string>

#include "core/analytic_bounds.hpp"
#include "core/distributions.hpp"
#include "core/permutation.hpp"
#include "core/rng.hpp"
#include "core/simulation.hpp"
#include "core/validation.hpp"

struct qrtc_model {
    qrtc::FirstPassageModel impl;
};
struct qrtc_marginal {
    qrtc::EmissionMarginal impl;
};
struct qrtc_rng {
    qrtc::RngStream impl;
};

namespace {

thread_local std::string g_last_error;

qrtc_status fail(qrtc_status status, const char* what) {
    g_last_error = what;
    return status;
}

template <class Fn>
qrtc_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return QRTC_OK;
    } catch (const std::invalid_argument& e) {
        return fail(QRTC_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(QRTC_ERR_DOMAIN, e.what());
    } catch (const std::exception& e) {
        return fail(QRTC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(QRTC_ERR_INTERNAL, "unknown error");
    }
}

qrtc_status require(bool ok, const char* what) {
    return ok ? QRTC_OK : fail(QRTC_ERR_INVALID_ARGUMENT, what);
}

qrtc_estimate to_c(const qrtc::EstimateReport& r) {
    return {r.mean, r.std_error, static_cast<long long>(r.samples),
            static_cast<unsigned long long>(r.seed)};
}

} // namespace

extern "C" {

const char* qrtc_status_name(qrtc_status status) {
    switch (status) {
    case QRTC_OK: return "ok";
    case QRTC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QRTC_ERR_DOMAIN: return "domain error";
    case QRTC_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* qrtc_last_error(void) { return g_last_error.c_str(); }

qrtc_status qrtc_model_exponential(double rate, qrtc_model** out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = new qrtc_model{qrtc::FirstPassageModel::exponential(rate)}; });
}

qrtc_status qrtc_model_weibull(double rate, double shape, qrtc_model** out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = new qrtc_model{qrtc::FirstPassageModel::weibull(rate, shape)}; });
}

void qrtc_model_free(qrtc_model* model) { delete model; }

#define QRTC_MODEL_EVAL(name, expr)                                                              \
    qrtc_status name(const qrtc_model* model, double x, double* out) {                           \
        if (auto s = require(model && out, "null handle"); s != QRTC_OK) return s;               \
        return guarded([&] { *out = (expr); });                                                  \
    }

QRTC_MODEL_EVAL(qrtc_model_density, model->impl.density(x))
QRTC_MODEL_EVAL(qrtc_model_cdf, model->impl.cdf(x))
QRTC_MODEL_EVAL(qrtc_model_ccdf, model->impl.ccdf(x))
QRTC_MODEL_EVAL(qrtc_model_quantile, model->impl.quantile(x))
#undef QRTC_MODEL_EVAL

qrtc_status qrtc_model_mean(const qrtc_model* model, double* out) {
    if (auto s = require(model && out, "null handle"); s != QRTC_OK) return s;
    *out = model->impl.mean();
    return QRTC_OK;
}

qrtc_status qrtc_marginal_deadline(double rate, double tau, qrtc_marginal** out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded(
        [&] { *out = new qrtc_marginal{qrtc::EmissionMarginal::deadline_optimal(rate, tau)}; });
}

qrtc_status qrtc_marginal_uniform(double tau, qrtc_marginal** out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = new qrtc_marginal{qrtc::EmissionMarginal::uniform(tau)}; });
}

qrtc_status qrtc_marginal_point(double location, qrtc_marginal** out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = new qrtc_marginal{qrtc::EmissionMarginal::point(location)}; });
}

void qrtc_marginal_free(qrtc_marginal* marginal) { delete marginal; }

qrtc_status qrtc_phi(const qrtc_marginal* marginal, const qrtc_model* model, double t,
                     double* out) {
    if (auto s = require(marginal && model && out, "null handle"); s != QRTC_OK) return s;
    return guarded([&] { *out = marginal->impl.phi(t, model->impl); });
}

qrtc_status qrtc_expected_phi_pow(const qrtc_marginal* marginal, int k, double* out) {
    if (auto s = require(marginal && out, "null handle"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::expected_phi_pow(marginal->impl, k); });
}

qrtc_status qrtc_rng_create(unsigned long long seed, qrtc_rng** out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = new qrtc_rng{qrtc::RngStream(seed)}; });
}

qrtc_status qrtc_rng_stream(unsigned long long root_seed, unsigned long long stream,
                            qrtc_rng** out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = new qrtc_rng{qrtc::RngStream::child(root_seed, stream)}; });
}

void qrtc_rng_free(qrtc_rng* rng) { delete rng; }

qrtc_status qrtc_sample_passage(const qrtc_model* model, qrtc_rng* rng, double* out) {
    if (auto s = require(model && rng && out, "null handle"); s != QRTC_OK) return s;
    return guarded([&] { *out = model->impl.sample(rng->impl); });
}

qrtc_status qrtc_sample_emissions(const qrtc_marginal* marginal, int m, qrtc_rng* rng,
                                  double* out_times) {
    if (auto s = require(marginal && rng && out_times, "null handle"); s != QRTC_OK) return s;
    return guarded([&] {
        const auto schedule = qrtc::sample_emissions(marginal->impl, m, rng->impl);
        std::memcpy(out_times, schedule.times.data(), schedule.times.size() * sizeof(double));
    });
}

qrtc_status qrtc_simulate_channel_use(const qrtc_marginal* marginal, const qrtc_model* model,
                                      int m, qrtc_rng* rng, double* t, double* d,
                                      double* s_sorted, int* omega) {
    if (auto s = require(marginal && model && rng && t && d && s_sorted && omega, "null handle");
        s != QRTC_OK)
        return s;
    return guarded([&] {
        const auto use = qrtc::simulate_channel_use(marginal->impl, model->impl, m, rng->impl);
        std::memcpy(t, use.t.data(), use.t.size() * sizeof(double));
        std::memcpy(d, use.d.data(), use.d.size() * sizeof(double));
        std::memcpy(s_sorted, use.s_sorted.data(), use.s_sorted.size() * sizeof(double));
        std::memcpy(omega, use.omega.data(), use.omega.size() * sizeof(int));
    });
}

qrtc_status qrtc_count_admissible(const double* t, const double* s, int m, double* log_count,
                                  unsigned long long* exact, int* exact_valid) {
    if (auto st = require(t && s && log_count, "null pointer"); st != QRTC_OK) return st;
    return guarded([&] {
        const auto counted = qrtc::count_admissible(std::span<const double>(t, static_cast<std::size_t>(m)),
                                                    std::span<const double>(s, static_cast<std::size_t>(m)));
        *log_count = counted.log_count;
        if (exact) *exact = counted.exact;
        if (exact_valid) *exact_valid = counted.exact_valid ? 1 : 0;
    });
}

qrtc_status qrtc_perm_entropy(const qrtc_model* model, const double* t, const double* s_sorted,
                              int m, double* out) {
    if (auto st = require(model && t && s_sorted && out, "null pointer"); st != QRTC_OK) return st;
    return guarded([&] {
        *out = qrtc::perm_entropy(model->impl,
                                  std::span<const double>(t, static_cast<std::size_t>(m)),
                                  std::span<const double>(s_sorted, static_cast<std::size_t>(m)));
    });
}

qrtc_status qrtc_theta_bar(const qrtc_marginal* marginal, const qrtc_model* model, int m_total,
                           int m, int ell, double* out) {
    if (auto s = require(marginal && model && out, "null handle"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::theta_bar_iid(marginal->impl, model->impl, m_total, m, ell); });
}

qrtc_status qrtc_gamma_bar(const qrtc_marginal* marginal, const qrtc_model* model, int m_total,
                           int ell, double* out) {
    if (auto s = require(marginal && model && out, "null handle"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::gamma_bar(marginal->impl, model->impl, m_total, ell); });
}

qrtc_status qrtc_delta_gamma_general(const qrtc_marginal* marginal, const qrtc_model* model,
                                     int m_total, int ell, double* out) {
    if (auto s = require(marginal && model && out, "null handle"); s != QRTC_OK) return s;
    return guarded(
        [&] { *out = qrtc::delta_gamma_general(marginal->impl, model->impl, m_total, ell); });
}

qrtc_status qrtc_delta_gamma_deadline(long long m_total, double lambda_tau, long long k,
                                      double* out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::delta_gamma_deadline(m_total, lambda_tau, k); });
}

qrtc_status qrtc_h_up(const qrtc_marginal* marginal, const qrtc_model* model, int m_total,
                      double* out) {
    if (auto s = require(marginal && model && out, "null handle"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::h_up(marginal->impl, model->impl, m_total); });
}

qrtc_status qrtc_h_omega_exponential(long long m_total, double lambda_tau, double* out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::h_omega_exponential(m_total, lambda_tau); });
}

qrtc_status qrtc_mi_ordered_lower(long long m_total, double lambda_tau, double* out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::mi_ordered_lower(m_total, lambda_tau); });
}

qrtc_status qrtc_cq_finite(long long m_total, double chi, double* out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::cq_finite(m_total, chi); });
}

qrtc_status qrtc_cq_simple(double chi, double* out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::cq_simple(chi); });
}

qrtc_status qrtc_cq_series(double chi, double rel_tol, double* raw, double* clamped) {
    if (auto s = require(raw && clamped, "null pointer"); s != QRTC_OK) return s;
    return guarded([&] {
        const auto bound = qrtc::cq_series(chi, rel_tol > 0.0 ? rel_tol : 1e-12);
        *raw = bound.raw;
        *clamped = bound.clamped;
    });
}

qrtc_status qrtc_ct_bound(double lambda, double chi, int use_series, double* out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] {
        *out = qrtc::ct_bound(lambda, chi,
                              use_series ? qrtc::CtVariant::Series : qrtc::CtVariant::Simple);
    });
}

qrtc_status qrtc_binom_expect_log_factorial(long long trials, double p, double* out) {
    if (auto s = require(out != nullptr, "out must not be null"); s != QRTC_OK) return s;
    return guarded([&] { *out = qrtc::binom_expect_log_factorial(trials, p); });
}

qrtc_status qrtc_estimate_h_omega(const qrtc_marginal* marginal, const qrtc_model* model, int m,
                                  long long n, unsigned long long seed, qrtc_estimate* out) {
    if (auto s = require(marginal && model && out, "null handle"); s != QRTC_OK) return s;
    return guarded(
        [&] { *out = to_c(qrtc::estimate_h_omega(marginal->impl, model->impl, m, n, seed)); });
}

qrtc_status qrtc_estimate_log_count(const qrtc_marginal* marginal, const qrtc_model* model,
                                    int m, long long n, unsigned long long seed,
                                    qrtc_estimate* out) {
    if (auto s = require(marginal && model && out, "null handle"); s != QRTC_OK) return s;
    return guarded(
        [&] { *out = to_c(qrtc::estimate_log_count(marginal->impl, model->impl, m, n, seed)); });
}

qrtc_status qrtc_estimate_mi_decomposition(const qrtc_marginal* marginal,
                                           const qrtc_model* model, long long n,
                                           unsigned long long seed, qrtc_estimate* lhs,
                                           double* rhs_analytic, double* gap) {
    if (auto s = require(marginal && model && lhs && rhs_analytic && gap, "null handle");
        s != QRTC_OK)
        return s;
    return guarded([&] {
        const auto report =
            qrtc::estimate_mi_decomposition(marginal->impl, model->impl, 2, n, seed);
        *lhs = to_c(report.mi_histogram);
        *rhs_analytic = report.rhs_analytic;
        *gap = report.gap_analytic;
    });
}

qrtc_status qrtc_epoch_feasibility(const qrtc_model* model, long long m, double rho,
                                   double epsilon, double* cdf_bound, double* m_gbar,
                                   int* feasible_trend) {
    if (auto s = require(model && cdf_bound && m_gbar, "null handle"); s != QRTC_OK) return s;
    return guarded([&] {
        const auto diag = qrtc::epoch_feasibility(model->impl, m, rho, epsilon);
        *cdf_bound = diag.cdf_bound;
        *m_gbar = diag.m_gbar;
        if (feasible_trend) *feasible_trend = diag.feasible_trend ? 1 : 0;
    });
}

qrtc_status qrtc_validate(long long samples, unsigned long long seed, double rho, double epsilon,
                          int* all_passed, char** json_report) {
    if (auto s = require(all_passed && json_report, "null pointer"); s != QRTC_OK) return s;
    return guarded([&] {
        if (samples < 10000)
            throw std::invalid_argument("qrtc_validate: need at least 1e4 samples");
        qrtc::ValidationConfig config;
        config.samples = samples;
        config.seed = seed;
        config.rho = rho;
        config.epsilon = epsilon;
        const auto results = qrtc::run_validation(config);
        bool all = true;
        for (const auto& r : results) all = all && r.passed;
        const auto json = qrtc::validation_report_json(results, config);
        char* buffer = new char[json.size() + 1];
        std::memcpy(buffer, json.c_str(), json.size() + 1);
        *json_report = buffer;
        *all_passed = all ? 1 : 0;
    });
}

void qrtc_string_free(char* str) { delete[] str; }

} // extern "C"
