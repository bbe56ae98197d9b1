#pragma once

#include <cstdint>

#include "core/distributions.hpp"

namespace qrtc {

/// The two binomial families behind H_e(Omega | S_sorted, T) for exponential
/// passage under the deadline-optimal emission density.
struct BinomialMixture {
    std::int64_t trials;
    double p1;  // e / (e + lambda*tau)
    double p2;  // 1 / (e + lambda*tau)

    static BinomialMixture from_lambda_tau(std::int64_t m_total, double lambda_tau);
};

/// E[log K!] for K ~ Binomial(trials, p), evaluated with log-space PMF terms;
/// switches to the Poisson limit for trials > 1e5.
double binom_expect_log_factorial(std::int64_t trials, double p);

/// E[K log K!] for K ~ Binomial(trials, p).
double binom_expect_k_log_factorial(std::int64_t trials, double p);

/// theta_bar_{m,l}: expected probability that exactly l of the first m arrivals
/// (by emission order statistics) overtake the (m+1)-st smallest emission.
/// M C(M-1,l) C(M-l-1,m-l) Int f (1-F)^{M-m-1} phi^l (F-phi)^{m-l} dt.
double theta_bar_iid(const EmissionMarginal& marginal, const FirstPassageModel& model,
                     int m_total, int m, int ell);

/// Gamma_bar_{M,l} = sum_{m=l}^{M-1} theta_bar_{m,l}, consolidated to
/// M C(M-1,l) Int f phi^l (1-phi)^{M-1-l} dt. Defined as 0 for l == M.
double gamma_bar(const EmissionMarginal& marginal, const FirstPassageModel& model,
                 int m_total, int ell);

/// DeltaGamma_bar_{M,l} = Gamma_bar_{M,l} - Gamma_bar_{M,l+1} through the
/// alternating-sum closed form in the moments E[phi^k].
double delta_gamma_general(const EmissionMarginal& marginal, const FirstPassageModel& model,
                           int m_total, int ell);

/// DeltaGamma_bar_{M,k-1} for the deadline-optimal marginal with exponential
/// passage: C(M,k) p1^k (1-p1)^{M-k} + (lt/(1-p2)) (k - M/(lt+e)) C(M,k) p2^k (1-p2)^{M-k}.
/// Valid for k in [1, M]; the H_e sum uses k = 2..M. Log-space PMFs keep the
/// evaluation stable to M ~ 1e6.
double delta_gamma_deadline(std::int64_t m_total, double lambda_tau, std::int64_t k);

/// H_up(T) = sum_l DeltaGamma_bar_{M,l} log (l+1)!, the expected log count of
/// admissible permutations. Upper-bounds H(Omega|S_sorted,T), with equality
/// iff passage is exponential.
double h_up(const EmissionMarginal& marginal, const FirstPassageModel& model, int m_total);

/// H_e(Omega|S_sorted,T) for exponential passage under the deadline-optimal
/// density: E[log K1!] + (lt/(1-p2)) E[(K2 - M p2) log K2!].
double h_omega_exponential(std::int64_t m_total, double lambda_tau);

/// I(S_sorted; T) >= M log(1 + lt/e) - log M! + H_e. May be negative for
/// small lt and large M; returned unclamped.
double mi_ordered_lower(std::int64_t m_total, double lambda_tau);

/// Per-quantum bound at finite M with tau(M) = M/rho: mi_ordered_lower(M, chi*M)/M.
double cq_finite(std::int64_t m_total, double chi);

/// Large-M bound max{log chi, 0} (any finite-mean passage law).
double cq_simple(double chi);

struct SeriesBound {
    double raw;      // log chi + e^{-1/chi} sum_{k>=2} chi^{-k} (k chi - 1) log k!/k!
    double clamped;  // max(raw, 0)
    int terms_used;
};

/// Exponential-passage series bound; truncates when a term falls below
/// rel_tol of the partial sum (cap 1e4 terms).
SeriesBound cq_series(double chi, double rel_tol = 1e-12);

enum class CtVariant { Simple, Series };

/// Per-time bound C_t = rho * C_q with rho = lambda / chi.
double ct_bound(double lambda, double chi, CtVariant variant);

/// One evaluated point of the capacity-bound curves; cq is clamped at zero
/// when reported as a capacity lower bound.
struct BoundPoint {
    double chi;
    std::int64_t quanta;  // 0 marks the M -> infinity limit
    double cq;
    double ct;
};

/// quanta == 0 evaluates the M -> infinity bound of the chosen variant,
/// anything else the finite-M per-quantum bound.
BoundPoint evaluate_bound_point(double chi, std::int64_t quanta, double lambda,
                                CtVariant variant);

} // namespace qrtc
