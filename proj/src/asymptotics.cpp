#include "gibbs/asymptotics.hpp"

#include <cmath>
#include <numbers>

#include "gibbs/errors.hpp"
#include "gibbs/quadrature.hpp"

namespace gibbs {

namespace {

void check_order(double s)
{
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("Riesz order s must be positive");
}

void check_shape(int d, double theta)
{
    if (d != 1 && d != 2) throw InvalidArgument("dimension must be 1 or 2");
    if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidArgument("theta must be positive");
}

double sphere_area(int d) { return d == 1 ? 2.0 : 2.0 * std::numbers::pi; }

void check_increasing(std::span<const double> xs)
{
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw InvalidArgument("scan grid must increase strictly");
}

}  // namespace

void WeylConfig::validate() const
{
    check_order(s);
    check_shape(dimension, theta);
}

bool WeylConfig::gibbs_regime_ok(double gamma) const
{
    return (gamma / (1.0 - gamma) - 0.5 * dimension) * theta > dimension;
}

double weyl_constant(double s, int d)
{
    check_order(s);
    if (d < 1) throw InvalidArgument("dimension must be positive");
    return std::exp(std::lgamma(s + 1.0) - 0.5 * d * std::log(4.0 * std::numbers::pi) - std::lgamma(s + 1.0 + 0.5 * d));
}

double phase_space_unit(double s, int d, double theta)
{
    check_order(s);
    check_shape(d, theta);
    const double a = 1.0 + s + 0.5 * d;
    const double b = 1.0 + s + (1.0 + 2.0 / theta) * 0.5 * d;
    return sphere_area(d) * std::exp(std::lgamma(a) + std::lgamma(d / theta) - std::lgamma(b)) / theta;
}

double phase_space_volume(double E, double s, int d, double theta)
{
    const double unit = phase_space_unit(s, d, theta);
    if (!(E > 1.0)) return 0.0;
    return std::pow(E - 1.0, s + (1.0 + 2.0 / theta) * 0.5 * d) * unit;
}

double phase_space_volume_quadrature(double E, double s, int d, double theta, double rel_tol)
{
    check_order(s);
    check_shape(d, theta);
    if (!(E > 1.0)) return 0.0;
    // omega_{d-1} int_0^R (E - 1 - r^theta)^{s+d/2} r^{d-1} dr with R = (E-1)^{1/theta};
    // r = R (1 - t^2) smooths the root-type zero at r = R.
    const double R = std::pow(E - 1.0, 1.0 / theta);
    const double p = s + 0.5 * d;
    auto f = [&](double t) {
        const double r = R * (1.0 - t * t);
        const double inner = std::max(E - 1.0 - std::pow(r, theta), 0.0);
        return std::pow(inner, p) * std::pow(r, d - 1) * 2.0 * R * t;
    };
    const auto q = adaptive_simpson(f, 0.0, 1.0, rel_tol, 0.0, 1 << 18);
    return sphere_area(d) * q.value;
}

double kappa(double s, int d, double theta)
{
    check_order(s);
    check_shape(d, theta);
    return (1.0 + s + 0.5 * d + d / theta) / (s + 1.0);
}

double predicted_scaling_exponent(double s, int d, double theta)
{
    check_order(s);
    check_shape(d, theta);
    return 1.0 / (1.0 + (1.0 + 2.0 / theta) * d / (2.0 * s));
}

std::vector<ScanRow> weyl_ratio_scan(const SpectralHamiltonian& H, double s, std::span<const double> energies)
{
    check_increasing(energies);
    const double target = weyl_constant(s, H.dimension());
    std::vector<ScanRow> rows;
    for (double E : energies) {
        if (!(E > 1.0)) throw InvalidArgument("scan energies must exceed min V = 1");
        ScanRow r;
        r.x = E;
        r.value = riesz_mean(H, E, s) / phase_space_volume(E, s, H.dimension(), H.theta());
        r.target = target;
        r.ratio = r.value / target;
        rows.push_back(r);
    }
    return rows;
}

std::vector<ScanRow> kappa_ratio_scan(const SpectralHamiltonian& H, double s, std::span<const double> energies)
{
    check_increasing(energies);
    const double target = kappa(s, H.dimension(), H.theta());
    std::vector<ScanRow> rows;
    for (double E : energies) {
        const double hi = riesz_mean(H, E, s + 1.0);
        if (!(hi > 0.0)) throw InvalidArgument("scan energy must lie above the lowest eigenvalue");
        ScanRow r;
        r.x = E;
        r.value = E * riesz_mean(H, E, s) / hi;
        r.target = target;
        r.ratio = r.value / target;
        rows.push_back(r);
    }
    return rows;
}

double riesz_mean_from_counting(const SpectralHamiltonian& H, double E, double s, double rel_tol)
{
    check_order(s);
    const std::size_t n = counting_function(H, E);
    if (n == 0) return 0.0;
    // Breakpoints y_j = E - lambda_j where N(E - y) drops; N is constant between them.
    std::vector<double> cuts{0.0};
    for (std::size_t j = n; j-- > 0;) {
        const double y = E - H.eigenvalue(j);
        if (y > cuts.back()) cuts.push_back(y);
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double N = static_cast<double>(counting_function(H, E - 0.5 * (a + b)));
        if (a == 0.0 && s < 1.0) {
            // y = w^{1/s} removes the y^{s-1} singularity: s y^{s-1} dy = dw
            const auto q = adaptive_simpson([&](double) { return N; }, 0.0, std::pow(b, s), rel_tol);
            total += q.value;
        } else {
            const auto q = adaptive_simpson([&](double y) { return s * std::pow(y, s - 1.0) * N; }, a, b, rel_tol);
            total += q.value;
        }
    }
    return total;
}

PowerSumReport lt_sum_check(const SpectralHamiltonian& H, double gamma, int d, double theta)
{
    check_shape(d, theta);
    const double low = static_cast<double>(d) / (d + 2.0);
    if (!(gamma > low && gamma < 1.0))
        throw InvalidArgument("gamma must lie in (d/(d+2), 1) for the eigenvalue power sum");
    PowerSumReport rep;
    rep.exponent = gamma / (1.0 - gamma);
    const double kappa_w = 0.5 * d + d / theta;
    if (!(rep.exponent > kappa_w))
        throw InvalidArgument("divergent configuration: (gamma/(1-gamma) - d/2) theta must exceed d");

    const std::size_t K = H.count();
    double sum = 0.0;
    // checkpoints 10, 20, 50, 100, 200, 500, ... and K
    std::size_t next = 10;
    int step = 0;
    for (std::size_t j = 0; j < K; ++j) {
        sum += std::pow(H.eigenvalue(j), -rep.exponent);
        if (j + 1 == next || j + 1 == K) {
            rep.checkpoints.push_back(j + 1);
            rep.partial_sums.push_back(sum);
        }
        if (j + 1 == next) next = (step++ % 3 == 1) ? next / 2 * 5 : next * 2;
    }
    rep.limit = sum;
    const double top = H.eigenvalue(K - 1);
    // Weyl continuation N(E) = K ((E-1)/(top-1))^kappa beyond the last level
    rep.tail_bound = top > 1.0 ? static_cast<double>(K) * kappa_w / (rep.exponent - kappa_w) *
                                     std::pow(top - 1.0, -rep.exponent)
                               : HUGE_VAL;
    rep.converged = rep.tail_bound <= 1e-9 * rep.limit;
    rep.stable_from = rep.checkpoints.back();
    for (std::size_t i = 0; i < rep.checkpoints.size(); ++i) {
        if (std::abs(rep.partial_sums[i] - rep.limit) <= 1e-9 * rep.limit) {
            rep.stable_from = rep.checkpoints[i];
            break;
        }
    }

    // int V^{d/2 - p} = omega_{d-1} int_0^inf (1 + r^theta)^{d/2 - p} r^{d-1} dr, r = t/(1-t)
    const double expo = 0.5 * d - rep.exponent;
    auto f = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double r = t / (1.0 - t);
        return std::pow(1.0 + std::pow(r, theta), expo) * std::pow(r, d - 1) / ((1.0 - t) * (1.0 - t));
    };
    rep.potential_integral = sphere_area(d) * adaptive_simpson(f, 0.0, 1.0, 1e-10, 0.0, 1 << 16).value;
    return rep;
}

ScalingFit fit_scaling_exponent(const SweepReport& sweep, double s, int d, double theta)
{
    if (!sweep.beta_minus.is_finite())
        throw InvalidArgument("the scaling exponent applies to entropies with finite beta'(0) only");
    ScalingFit fit;
    fit.predicted = predicted_scaling_exponent(s, d, theta);

    double t_min = HUGE_VAL, t_max = 0.0;
    for (const auto& r : sweep.rows) {
        if (!r.ok || !(r.point.T > sweep.critical_temperature)) continue;
        t_min = std::min(t_min, r.point.T);
        t_max = std::max(t_max, r.point.T);
    }
    if (!(t_max > 0.0) || t_min > 0.1 * t_max * (1.0 + 1e-12))
        throw InvalidArgument("sweep too short: need one decade of T above the critical temperature");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    fit.T_low = HUGE_VAL;
    for (const auto& r : sweep.rows) {
        if (!r.ok || !(r.point.T > sweep.critical_temperature) || r.point.T < 0.1 * t_max * (1.0 - 1e-12)) continue;
        if (!(r.point.energy > 0.0)) throw InvalidArgument("energy must be positive for a log-log fit");
        const double x = std::log(r.point.T), y = std::log(r.point.energy);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
        fit.T_low = std::min(fit.T_low, r.point.T);
    }
    if (n < 8) throw InvalidArgument("sweep too short: need at least 8 points in the top decade");
    const double den = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.points = n;
    fit.T_high = t_max;
    return fit;
}

}  // namespace gibbs
