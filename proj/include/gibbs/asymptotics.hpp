/** \file asymptotics.hpp
 *
 *  \brief Semiclassical quantities for V(x) = 1 + |x|^theta: Weyl constants,
 *  phase-space volumes, Riesz-mean ratios, eigenvalue power sums and the
 *  high-temperature scaling fit of the energy.
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gibbs/solver.hpp"
#include "gibbs/spectrum.hpp"

namespace gibbs {

struct WeylConfig {
    double s = 1.0;
    int dimension = 1;
    double theta = 2.0;

    void validate() const;
    /// (gamma/(1-gamma) - d/2) theta > d: needed for the finite-beta_minus Gibbs regime.
    bool gibbs_regime_ok(double gamma) const;
};

/// C_{s,d} = Gamma(s+1) / ((4 pi)^{d/2} Gamma(s+1+d/2)).
double weyl_constant(double s, int d);

/// W_s(1) = omega_{d-1} Gamma(1+s+d/2) Gamma(d/theta) / (theta Gamma(1+s+(1+2/theta) d/2)),
/// with omega_0 = 2 and omega_1 = 2 pi.
double phase_space_unit(double s, int d, double theta);

/// W_s(E) = int (E - V)_+^{s+d/2} dx = (E-1)_+^{s+(1+2/theta)d/2} W_s(1).
double phase_space_volume(double E, double s, int d, double theta);

/// Same integral by adaptive quadrature over {V <= E}; cross-check of the closed form.
double phase_space_volume_quadrature(double E, double s, int d, double theta, double rel_tol = 1e-12);

/// (1 + s + d/2 + d/theta) / (s + 1); always > 1.
double kappa(double s, int d, double theta);

/// 1 / (1 + (1 + 2/theta) d / (2 s)).
double predicted_scaling_exponent(double s, int d, double theta);

struct ScanRow {
    double x = 0.0;       ///< E (or T)
    double value = 0.0;
    double target = 0.0;
    double ratio = 0.0;   ///< value / target
};

/// value = Tr(E - H)_+^s / W_s(E), target C_{s,d}.
std::vector<ScanRow> weyl_ratio_scan(const SpectralHamiltonian& H, double s, std::span<const double> energies);

/// value = E Tr(E - H)_+^s / Tr(E - H)_+^{s+1}, target kappa(s, d, theta).
std::vector<ScanRow> kappa_ratio_scan(const SpectralHamiltonian& H, double s, std::span<const double> energies);

/// s int_0^{E - lambda_0} y^{s-1} N(E - y) dy by quadrature between the jumps of N.
double riesz_mean_from_counting(const SpectralHamiltonian& H, double E, double s, double rel_tol = 1e-12);

struct PowerSumReport {
    double exponent = 0.0;  ///< gamma / (1 - gamma)
    std::vector<std::size_t> checkpoints;
    std::vector<double> partial_sums;
    double tail_bound = 0.0;   ///< integral-test majorant beyond the last level
    double limit = 0.0;        ///< last partial sum
    bool converged = false;    ///< tail_bound <= 1e-9 * limit
    std::size_t stable_from = 0;  ///< first checkpoint within 1e-9 of the limit
    double potential_integral = 0.0;  ///< int V^{d/2 - exponent}
};

/// Partial sums of lambda_j^{-gamma/(1-gamma)}; throws InvalidArgument when
/// the sum (equivalently the potential integral) diverges.
PowerSumReport lt_sum_check(const SpectralHamiltonian& H, double gamma, int d, double theta);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double predicted = 0.0;
    std::size_t points = 0;
    double T_low = 0.0;
    double T_high = 0.0;
};

/// Least-squares slope of log E against log T over the top decade of the
/// sweep (at least 8 points). Only for finite beta_minus.
ScalingFit fit_scaling_exponent(const SweepReport& sweep, double s, int d, double theta);

}  // namespace gibbs
