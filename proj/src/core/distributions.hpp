#pragma once

#include <functional>
#include <span>
#include <vector>

#include "core/rng.hpp"

namespace qrtc {

enum class PassageLaw { Exponential, Weibull };

/// First-passage time law with density g, CDF G, CCDF Gbar and mean 1/rate.
/// The Weibull law is parameterized by (rate, shape) with the scale chosen so
/// the mean stays 1/rate; shape == 1 reduces to the exponential law.
class FirstPassageModel {
public:
    static FirstPassageModel exponential(double rate);
    static FirstPassageModel weibull(double rate, double shape);

    PassageLaw law() const { return law_; }
    bool is_exponential() const { return law_ == PassageLaw::Exponential; }
    double rate() const { return rate_; }
    double shape() const { return shape_; }
    double mean() const { return 1.0 / rate_; }

    double density(double d) const;
    double cdf(double d) const;
    double ccdf(double d) const;
    /// Inverse CDF; q in [0, 1), quantile(0) == 0.
    double quantile(double q) const;
    double sample(RngStream& rng) const;

private:
    FirstPassageModel(PassageLaw law, double rate, double shape, double scale)
        : law_(law), rate_(rate), shape_(shape), scale_(scale) {}

    PassageLaw law_;
    double rate_;
    double shape_;
    double scale_;
};

struct AtomMass {
    double location;
    double mass;
};

/// Point masses of the deadline-optimal emission density.
struct DeadlineMasses {
    double at_zero;    // 1 / (e + lambda*tau)
    double uniform;    // lambda*tau / (e + lambda*tau)
    double at_deadline; // (e - 1) / (e + lambda*tau)
};

/// IID marginal of a single emission time on [0, tau].
///
/// Three kinds are supported: the deadline-optimal atom+uniform+atom mixture,
/// a plain uniform density (atomless, used wherever an absolutely continuous
/// marginal is needed), and a degenerate point mass (all emissions coincide).
class EmissionMarginal {
public:
    enum class Kind { DeadlineOptimal, Uniform, Point };

    /// The h(S)-maximizing mixture for exponential passage with a deadline:
    /// mass 1/(e+lt) at 0, density lambda/(e+lt) on (0,tau), mass (e-1)/(e+lt) at tau.
    static EmissionMarginal deadline_optimal(double rate, double tau);
    static EmissionMarginal uniform(double tau);
    static EmissionMarginal point(double location);

    Kind kind() const { return kind_; }
    /// Upper end of the support.
    double deadline() const { return tau_; }
    double rate() const { return rate_; }
    double lambda_tau() const { return rate_ * tau_; }
    DeadlineMasses deadline_masses() const;

    /// Right-continuous CDF (atoms included at their location).
    double cdf(double t) const;
    /// Absolutely continuous density component.
    double density(double t) const;
    std::span<const AtomMass> atoms() const { return atoms_; }

    double sample(RngStream& rng) const;

    /// phi(t) = E[ 1{T <= t} * Gbar(t - T) ], the probability that an emission
    /// happened by t but its quantum is still in flight. Closed form for the
    /// deadline-optimal marginal with exponential passage, quadrature otherwise.
    /// The t > tau branch uses exp(-rate*(t - tau)) so that it continues the
    /// atom-inclusive convolution at tau from the right.
    double phi(double t, const FirstPassageModel& model) const;

    /// phi with atoms at location >= t excluded; equals lim_{x->t-} phi(x).
    double phi_below(double t, const FirstPassageModel& model) const;

    /// Mixed-measure expectation E[h(T, F_T(T), phi(T))] for integrands that
    /// are polynomial in (F, phi). Atoms are folded: an atom of mass w at x
    /// contributes w * Int_0^1 h(x, F- + w u, phi- + w u) du, the limit of
    /// smearing the atom over a vanishing interval. This reproduces the
    /// delta-function convention Int delta(t) u^k(t) dt = 1/(k+1).
    double expect(const std::function<double(double, double, double)>& h,
                  const FirstPassageModel& model, int fold_points = 32) const;

private:
    EmissionMarginal(Kind kind, double rate, double tau)
        : kind_(kind), rate_(rate), tau_(tau) {}

    Kind kind_;
    double rate_;
    double tau_;
    std::vector<AtomMass> atoms_;
};

/// M emission times drawn iid from a marginal, all within the deadline.
struct EmissionSchedule {
    std::vector<double> times;
    double deadline;
};

EmissionSchedule sample_emissions(const EmissionMarginal& marginal, int m, RngStream& rng);

/// Closed form E[phi^k(T)] = (1/(e+lt))^{k+1} * (lt + e^{k+1}/(k+1)) for the
/// deadline-optimal marginal under exponential passage.
double expected_phi_pow(const EmissionMarginal& marginal, int k);

/// Density of the (m+1)-st smallest of M iid emissions at t (continuous part):
/// (m+1) C(M, m+1) f(t) F^m(t) (1-F(t))^{M-m-1}.
double order_stat_density_iid(const EmissionMarginal& marginal, int m_total, int m, double t);

/// Exact binomial coefficient as a double (n <= 60 stays exact in 53 bits).
double binomial(int n, int k);

} // namespace qrtc
