/** \file entropy.hpp
 *
 *  \brief Convex entropy densities beta, their derivatives and the occupation map xi.
 *
 *  For a strictly convex beta on [0, n_bar] with beta(0) = 0, the occupation map
 *  is xi(t) = (beta')^{-1}(-t) on (-beta_plus, -beta_minus), extended by n_bar
 *  below that interval and by 0 above it.
 */
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "gibbs/extended_real.hpp"

namespace gibbs {

enum class EntropyKind { Boltzmann, FermiDirac, BoseEinstein, Tsallis, Custom };

std::string_view to_string(EntropyKind kind);

/// Optional parameters for make_model(). Unset values take catalogue defaults.
struct ModelParams {
    std::optional<double> q;      ///< Tsallis index, required for tsallis
    std::optional<double> gamma;  ///< growth exponent, default 0.9
};

/// User-supplied entropy density. beta_second is used for xi' only.
struct CustomEntropy {
    std::function<double(double)> beta;
    std::function<double(double)> beta_prime;
    std::function<double(double)> beta_second;
    std::optional<double> r;  ///< Hoelder exponent near 0 (finite beta_minus only)
};

class EntropyModel {
public:
    EntropyKind kind() const { return kind_; }
    /// "boltzmann", "fermi_dirac", "bose_einstein", "tsallis(q)" or "custom".
    std::string name() const;
    double n_bar() const { return n_bar_; }
    double gamma() const { return gamma_; }
    /// Tsallis index; only meaningful for tsallis.
    double q() const { return q_; }
    const std::optional<double>& r() const { return r_; }

    ExtendedReal beta_minus() const { return beta_minus_; }
    ExtendedReal beta_plus() const { return beta_plus_; }

    double beta(double x) const;
    double beta_prime(double x) const;
    double beta_second(double x) const;

    /// xi(t) with the endpoint extension; total on the reals, values in [0, n_bar].
    double xi(double t) const;
    /// xi'(t) = -1 / beta''(xi(t)) inside the domain, 0 outside.
    double xi_prime(double t) const;

    /// Same entropy density on a different domain cap (used when the trace
    /// constraint changes, e.g. the global minimizer with a0 != n_bar).
    EntropyModel with_n_bar(double n_bar) const;

    /// sup_{x in (0, x_bar]} x^{1-gamma} |beta'(x)|, located by dense log-spaced
    /// sampling plus golden-section refinement. Infinite when the sampled
    /// profile is still growing at the smallest representable scale.
    double growth_constant(double x_bar) const;

    /// C with xi(t) <= C t^{-1/(1-gamma)} for t >= t_decay(); computed from the
    /// sup condition on x_bar = n_bar / 2. Only set when beta_minus = -inf
    /// (infinite if the sup diverges).
    double xi_decay_constant() const { return xi_decay_; }
    /// -beta'(n_bar / 2): where the decay bound starts to apply.
    double xi_decay_start() const { return -beta_prime(0.5 * n_bar_); }

private:
    friend EntropyModel make_model(std::string_view, double, const ModelParams&);
    friend EntropyModel make_custom_model(CustomEntropy, double, double);

    void classify_endpoints();
    void init_decay();
    double xi_interior(double t) const;

    EntropyKind kind_ = EntropyKind::Boltzmann;
    double n_bar_ = 1.0;
    double gamma_ = 0.9;
    double q_ = 0.0;
    std::optional<double> r_;
    ExtendedReal beta_minus_;
    ExtendedReal beta_plus_;
    double xi_decay_ = 0.0;
    CustomEntropy custom_;
};

/// Catalogue constructor. name is one of boltzmann, fermi_dirac,
/// bose_einstein, tsallis. Throws InvalidArgument on bad parameters.
EntropyModel make_model(std::string_view name, double n_bar, const ModelParams& params = {});

/// Custom model; xi is obtained by safeguarded bisection on beta'.
EntropyModel make_custom_model(CustomEntropy entropy, double n_bar, double gamma = 0.9);

/// xi(x / T), clamped to the extension values at and beyond the endpoints.
double xi_T(const EntropyModel& model, double T, double x);

/// Outcome of the growth-condition validation.
struct GrowthReport {
    bool accepted = false;
    std::string diagnostic;
    double gamma = 0.0;
    double x_upper = 0.0;         ///< x_bar used for the sup condition
    double sup_value = 0.0;       ///< sup x^{1-gamma}|beta'(x)| (inf if divergent)
    double xi_constant = 0.0;     ///< C with xi(t) <= C t^{-1/(1-gamma)}
    bool xi_bound_holds = true;   ///< sampled check of that bound (infinite beta_minus)
    std::optional<double> r;      ///< Hoelder exponent (finite beta_minus)
    double x_lower = 0.0;         ///< x_underbar used for the Hoelder fit
    double c_minus = 0.0;
    double c_plus = 0.0;
};

/// Checks gamma in (d/(d+2), 1), the sup growth condition, and either the
/// Hoelder constants (finite beta_minus) or the derived xi decay bound.
GrowthReport validate_growth(const EntropyModel& model, int sample_count, int dimension = 1);

}  // namespace gibbs
