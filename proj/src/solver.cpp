#include "gibbs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gibbs/errors.hpp"
#include "gibbs/format.hpp"
#include "gibbs/quadrature.hpp"

namespace gibbs {

namespace {

void require_temperature(double T)
{
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("temperature must be positive and finite");
}

void require_cap(const EntropyModel& model, double n_bar)
{
    if (!(std::abs(n_bar - model.n_bar()) <= 1e-12 * model.n_bar()))
        throw InvalidArgument("n_bar must equal the cap of the entropy model (rebuild it with with_n_bar)");
}

bool doubly_finite(const EntropyModel& model)
{
    return model.beta_minus().is_finite() && model.beta_plus().is_finite();
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::string CutoffRank::to_string() const
{
    switch (kind_) {
    case Kind::Empty: return "-1";
    case Kind::Unbounded: return "inf";
    case Kind::Finite: break;
    }
    return std::to_string(last_);
}

ExtendedReal mu_lower_bound(const EntropyModel& model, const SpectralHamiltonian& H, double T)
{
    require_temperature(T);
    if (!model.beta_plus().is_finite()) return ExtendedReal::minus_infinity();
    return ExtendedReal::finite(-T * model.beta_plus().value() - H.eigenvalue(0));
}

CutoffRank cutoff_rank(const EntropyModel& model, const SpectralHamiltonian& H, double T, double mu)
{
    require_temperature(T);
    if (!model.beta_minus().is_finite()) return CutoffRank::unbounded();
    const double edge = -T * model.beta_minus().value() - mu;
    const auto ev = H.eigenvalues();
    const auto n = static_cast<std::size_t>(std::upper_bound(ev.begin(), ev.end(), edge) - ev.begin());
    return n == 0 ? CutoffRank::empty() : CutoffRank::finite(n - 1);
}

double partition_function(const EntropyModel& model, const SpectralHamiltonian& H, double T, double mu)
{
    require_temperature(T);
    if (std::isnan(mu)) throw InvalidArgument("mu is NaN");
    const ExtendedReal mu0 = mu_lower_bound(model, H, T);
    if (mu0.is_finite() && mu < mu0.value() - 1e-12 * std::max(1.0, std::abs(mu0.value())))
        throw InvalidArgument("mu below mu_0(T) = -T beta_plus - lambda_0");
    const bool cut = model.beta_minus().is_finite();
    const double edge = cut ? -T * model.beta_minus().value() : 0.0;
    double z = 0.0;
    for (double lam : H.eigenvalues()) {
        if (cut && lam + mu > edge) break;
        z += model.xi((lam + mu) / T);
    }
    return z;
}

double truncation_tail_bound(const EntropyModel& model, const SpectralHamiltonian& H, double T, double mu)
{
    require_temperature(T);
    const std::size_t K = H.count();
    const double top = H.eigenvalue(K - 1);
    if (model.beta_minus().is_finite()) {
        // Levels above the cutoff carry nothing; the cutoff must sit strictly
        // inside the trusted list.
        return top + mu > -T * model.beta_minus().value() ? 0.0 : HUGE_VAL;
    }

    // xi(t) <= C t^{-p} for t >= t0, and beyond the last trusted level the
    // counting function is continued as K ((E - 1)/(top - 1))^kappa. Then
    //   tail <= C K kappa / (p - kappa) (T / min(top - 1, top + mu))^p.
    const double C = model.xi_decay_constant();
    const double p = 1.0 / (1.0 - model.gamma());
    const double kappa = H.weyl_exponent();
    const double offset = H.potential().offset;
    if (!std::isfinite(C) || !(p > kappa) || !(top > offset)) return HUGE_VAL;
    const double a = (top + mu) / T;
    if (!(a > 0.0) || a < model.xi_decay_start()) return HUGE_VAL;
    const double scale = std::min(top - offset, top + mu);
    return C * static_cast<double>(K) * kappa / (p - kappa) * std::pow(T / scale, p);
}

double critical_temperature(const EntropyModel& model, const SpectralHamiltonian& H)
{
    if (!doubly_finite(model)) return 0.0;
    if (H.count() < 2) throw InvalidArgument("critical temperature needs at least two eigenvalues");
    return (H.eigenvalue(1) - H.eigenvalue(0)) / (model.beta_plus().value() - model.beta_minus().value());
}

double solve_mu(const EntropyModel& model, const SpectralHamiltonian& H, double T, double n_bar)
{
    require_temperature(T);
    require_cap(model, n_bar);
    const double lam0 = H.eigenvalue(0);
    const double Tc = critical_temperature(model, H);
    if (Tc > 0.0 && T <= Tc) return -T * model.beta_plus().value() - lam0;

    auto Z = [&](double mu) { return partition_function(model, H, T, mu); };
    const double target = n_bar;

    // Lower end: mu_0 itself when beta_plus is finite (Z(mu_0) >= n_bar there,
    // since the ground level alone carries n_bar).
    double lo;
    double z_lo;
    const ExtendedReal mu0 = mu_lower_bound(model, H, T);
    if (mu0.is_finite()) {
        lo = mu0.value();
        z_lo = Z(lo);
    } else {
        double step = std::max(1.0, T);
        lo = -lam0 - step;
        z_lo = Z(lo);
        for (int it = 0; z_lo <= target; ++it) {
            if (it == 200) throw SolverFailure("no lower bracket for mu: Z stays below n_bar");
            step *= 2.0;
            lo = -lam0 - step;
            z_lo = Z(lo);
        }
    }
    double best = lo;
    double best_res = std::abs(z_lo - target);
    if (best_res > 1e-15 * target) {
        // Upper end: where Z vanishes identically (finite beta_minus) or by expansion.
        double hi;
        if (model.beta_minus().is_finite()) {
            hi = -T * model.beta_minus().value() - lam0;
        } else {
            double step = std::max(1.0, T);
            hi = std::max(lo, -lam0) + step;
            for (int it = 0; Z(hi) >= target; ++it) {
                if (it == 200) throw SolverFailure("no upper bracket for mu: Z stays above n_bar");
                step *= 2.0;
                hi = std::max(lo, -lam0) + step;
            }
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double z = Z(mid);
            const double res = std::abs(z - target);
            if (res < best_res) {
                best = mid;
                best_res = res;
            }
            if (res <= 1e-15 * target) break;
            if (z > target)
                lo = mid;
            else
                hi = mid;
        }
    }
    if (!(best_res <= kTraceTolerance * target))
        throw SolverFailure("bisection for mu did not reach the trace tolerance");

    const double tail = truncation_tail_bound(model, H, T, best);
    if (!(tail <= kTailTolerance * target))
        throw SolverFailure("truncated spectrum too short at T = " + format_number(T) + ": tail bound " +
                            format_number(tail) + " exceeds tolerance; increase K");
    return best;
}

GibbsState build_state(const EntropyModel& model, const SpectralHamiltonian& H, double T, double n_bar)
{
    GibbsState st;
    st.T = T;
    st.n_bar = n_bar;
    st.mu = solve_mu(model, H, T, n_bar);
    const double Tc = critical_temperature(model, H);
    st.rank_one = Tc > 0.0 && T <= Tc;
    st.cutoff = cutoff_rank(model, H, T, st.mu);
    st.tail_bound = st.rank_one ? 0.0 : truncation_tail_bound(model, H, T, st.mu);

    st.occupations.assign(H.count(), 0.0);
    if (st.rank_one) {
        st.occupations[0] = n_bar;
        st.cutoff = CutoffRank::finite(0);
        return st;
    }
    const bool cut = model.beta_minus().is_finite();
    const double edge = cut ? -T * model.beta_minus().value() : 0.0;
    for (std::size_t j = 0; j < H.count(); ++j) {
        const double lam = H.eigenvalue(j);
        if (cut && lam + st.mu > edge) break;
        st.occupations[j] = model.xi((lam + st.mu) / T);
    }
    return st;
}

double free_energy(const EntropyModel& model, const SpectralHamiltonian& H, double T,
                   std::span<const double> occupations)
{
    if (occupations.size() > H.count()) throw InvalidArgument("more occupations than trusted eigenvalues");
    double e = 0.0, s = 0.0;
    for (std::size_t j = 0; j < occupations.size(); ++j) {
        e += H.eigenvalue(j) * occupations[j];
        s += model.beta(occupations[j]);
    }
    return e + T * s;
}

ThermoPoint evaluate(const EntropyModel& model, const SpectralHamiltonian& H, const GibbsState& state)
{
    ThermoPoint p;
    p.T = state.T;
    p.mu = state.mu;
    p.rank = state.cutoff;
    for (std::size_t j = 0; j < state.occupations.size(); ++j) {
        const double nu = state.occupations[j];
        if (nu == 0.0) continue;
        p.energy += H.eigenvalue(j) * nu;
        p.entropy += model.beta(nu);
    }
    p.free_energy = p.energy + state.T * p.entropy;
    return p;
}

FreeEnergyReport free_energy_check(const EntropyModel& model, const SpectralHamiltonian& H, const GibbsState& state,
                                   const std::vector<std::vector<double>>& trials)
{
    FreeEnergyReport rep;
    rep.state_free_energy = free_energy(model, H, state.T, state.occupations);
    rep.min_gap = HUGE_VAL;
    const double cap = model.n_bar();
    for (const auto& trial : trials) {
        if (trial.size() > H.count()) throw InvalidArgument("trial state longer than the trusted spectrum");
        double sum = 0.0;
        for (double v : trial) {
            if (!(v >= 0.0) || v > cap * (1.0 + 1e-12)) throw InvalidArgument("trial occupation outside [0, n_bar]");
            sum += v;
        }
        if (std::abs(sum - state.n_bar) > kTraceTolerance * state.n_bar)
            throw InvalidArgument("trial state violates the trace constraint");
        const double gap = free_energy(model, H, state.T, trial) - rep.state_free_energy;
        rep.min_gap = std::min(rep.min_gap, gap);
        if (gap < -kOptimalityTolerance) rep.optimal = false;
        ++rep.trials;
    }
    if (rep.trials == 0) rep.min_gap = 0.0;
    return rep;
}

std::vector<std::vector<double>> perturbed_trials(const GibbsState& state, std::size_t count, std::uint64_t seed)
{
    const std::size_t K = state.occupations.size();
    std::size_t support = 12;
    if (state.cutoff.kind() == CutoffRank::Kind::Finite) support = std::max<std::size_t>(state.cutoff.last() + 3, 6);
    support = std::min(support, K);
    if (support < 2) throw InvalidArgument("perturbations need at least two levels");

    double total = 0.0;
    for (double v : state.occupations) total += v;

    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> out;
    out.reserve(count);
    std::vector<double> r(support);
    for (std::size_t i = 0; i < count; ++i) {
        // random direction on the first levels, same total trace as the state
        double rs = 0.0;
        for (auto& v : r) {
            v = -std::log(1.0 - uniform01(rng));
            rs += v;
        }
        for (auto& v : r) v *= total / rs;
        const double u = uniform01(rng);
        const double w = u * u;  // mostly small steps, some large
        std::vector<double> trial = state.occupations;
        for (std::size_t j = 0; j < K; ++j) {
            const double rj = j < support ? r[j] : 0.0;
            trial[j] = (1.0 - w) * trial[j] + w * rj;
        }
        out.push_back(std::move(trial));
    }
    return out;
}

SweepReport sweep(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar,
                  std::span<const double> T_grid, const SweepOptions& options)
{
    require_cap(model, n_bar);
    for (std::size_t i = 0; i < T_grid.size(); ++i) {
        require_temperature(T_grid[i]);
        if (i > 0 && !(T_grid[i] > T_grid[i - 1])) throw InvalidArgument("sweep temperatures must increase strictly");
    }

    SweepReport rep;
    rep.model_name = model.name();
    rep.n_bar = n_bar;
    rep.critical_temperature = critical_temperature(model, H);
    rep.beta_minus = model.beta_minus();
    rep.grid = H.grid();
    rep.retained = H.count();
    rep.trusted_cap = H.trusted_cap();

    const double ground = H.eigenvalue(0) * n_bar;
    for (double T : T_grid) {
        SweepRow row;
        row.point.T = T;
        try {
            const GibbsState st = build_state(model, H, T, n_bar);
            row.point = evaluate(model, H, st);
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rep.rows.push_back(std::move(row));
    }

    const SweepRow* prev = nullptr;
    for (const auto& row : rep.rows) {
        if (!row.ok) continue;
        if (row.point.energy < ground * (1.0 - kTraceTolerance)) rep.energy_above_ground = false;
        if (!(row.point.T > rep.critical_temperature)) continue;
        if (prev) {
            if (!(row.point.energy > prev->point.energy)) rep.energy_increasing = false;
            if (!(row.point.entropy < prev->point.entropy)) rep.entropy_decreasing = false;
            if (row.point.mu / row.point.T < prev->point.mu / prev->point.T) rep.mu_over_T_nondecreasing = false;
            if (options.eqf) rep.eqf_residuals.push_back(eqf_check(model, H, n_bar, prev->point.T, row.point.T));
        }
        prev = &row;
    }

    if (model.beta_minus().is_finite() && !rep.rows.empty()) {
        const double bm = model.beta_minus().value();
        const double top = rep.rows.back().point.T;
        const SweepRow* last = nullptr;
        for (const auto& row : rep.rows) {
            if (!row.ok || !(row.point.T > rep.critical_temperature) || row.point.T < 0.1 * top) continue;
            if (last) {
                const double a0 = -last->point.T * bm - last->point.mu;
                const double a1 = -row.point.T * bm - row.point.mu;
                if (!(a1 > a0)) rep.alpha_increasing = false;
                if (!(a1 / row.point.T < a0 / last->point.T)) rep.alpha_over_T_decreasing = false;
            }
            last = &row;
        }
    }
    return rep;
}

FreeEnergyIdentity eqf_identity(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar, double T1,
                                double T2)
{
    require_temperature(T1);
    require_temperature(T2);
    require_cap(model, n_bar);
    if (T2 < T1) throw InvalidArgument("eqf needs T1 <= T2");
    const double Tc = critical_temperature(model, H);
    if (Tc > 0.0 && !(T1 > Tc)) throw InvalidArgument("eqf needs T1 above the critical temperature");

    auto point = [&](double T) { return evaluate(model, H, build_state(model, H, T, n_bar)); };
    FreeEnergyIdentity out;
    if (T1 == T2) return out;
    out.lhs = point(T2).free_energy - point(T1).free_energy;
    const auto q = adaptive_simpson([&](double T) { return point(T).entropy; }, T1, T2, 1e-11, 1e-12);
    if (!q.converged) throw SolverFailure("entropy integral did not converge");
    out.rhs = q.value;
    out.panels = q.panels;
    const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
    out.residual = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
    return out;
}

double eqf_check(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar, double T1, double T2)
{
    return eqf_identity(model, H, n_bar, T1, T2).residual;
}

MuDerivativeReport mu_derivative_check(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar,
                                       double T)
{
    require_temperature(T);
    require_cap(model, n_bar);
    const double delta = 1e-4 * T;
    const double Tc = critical_temperature(model, H);
    if (Tc > 0.0 && !(T - delta > Tc))
        throw InvalidArgument("finite-difference stencil reaches the critical temperature");

    const GibbsState st = build_state(model, H, T, n_bar);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < H.count(); ++j) {
        if (st.occupations[j] == 0.0) continue;
        const double d = model.xi_prime((H.eigenvalue(j) + st.mu) / T);
        num += H.eigenvalue(j) * d;
        den += d;
    }
    if (den == 0.0) throw SolverFailure("xi' vanishes on every occupied level");

    MuDerivativeReport rep;
    rep.analytic = st.mu / T + num / (T * den);

    const GibbsState up = build_state(model, H, T + delta, n_bar);
    const GibbsState dn = build_state(model, H, T - delta, n_bar);
    rep.finite_difference = (up.mu - dn.mu) / (2.0 * delta);
    rep.mu_relative_error = std::abs(rep.analytic - rep.finite_difference) /
                            std::max(std::abs(rep.finite_difference), 1e-12);

    const ThermoPoint pu = evaluate(model, H, up);
    const ThermoPoint pd = evaluate(model, H, dn);
    rep.dE_dT = (pu.energy - pd.energy) / (2.0 * delta);
    rep.dS_dT = (pu.entropy - pd.entropy) / (2.0 * delta);
    rep.entropy_relative_residual =
        std::abs(rep.dS_dT + rep.dE_dT / T) / std::max(std::abs(rep.dE_dT / T), 1e-300);
    return rep;
}

double solve_T_for_energy(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar, double c)
{
    require_cap(model, n_bar);
    const double ground = H.eigenvalue(0) * n_bar;
    if (!(c > ground)) throw OutOfRange("energy target must exceed lambda_0 n_bar");

    auto E = [&](double T) { return evaluate(model, H, build_state(model, H, T, n_bar)).energy; };

    double lo;
    const double Tc = critical_temperature(model, H);
    if (Tc > 0.0) {
        lo = Tc;
    } else {
        lo = 1.0;
        for (int it = 0; E(lo) >= c; ++it) {
            if (it == 100) throw SolverFailure("no lower temperature bracket for the energy target");
            lo *= 0.5;
        }
    }
    double hi = std::max(1.0, 2.0 * lo);
    try {
        for (int it = 0; E(hi) <= c; ++it) {
            if (it == 200) throw SolverFailure("no upper temperature bracket for the energy target");
            hi *= 2.0;
        }
    } catch (const SolverFailure&) {
        throw OutOfRange("energy target beyond what the trusted spectrum can represent; increase K");
    }

    double best = hi;
    double best_res = HUGE_VAL;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double e = E(mid);
        const double res = std::abs(e - c);
        if (res < best_res) {
            best = mid;
            best_res = res;
        }
        if (res <= 1e-14 * std::abs(c)) break;
        if (e < c)
            lo = mid;
        else
            hi = mid;
    }
    if (!(best_res <= 1e-7 * std::max(1.0, std::abs(c))))
        throw SolverFailure("temperature bisection did not reach the energy target");
    return best;
}

GlobalMinimizer min_entropy_global(const EntropyModel& model, const SpectralHamiltonian& H, double a0,
                                   std::span<const double> b0, double c)
{
    if (!(a0 > 0.0) || !std::isfinite(a0)) throw InvalidArgument("a0 must be positive");
    if (static_cast<int>(b0.size()) != H.dimension()) throw InvalidArgument("b0 must have one entry per dimension");
    double b2 = 0.0;
    for (double b : b0) {
        if (!std::isfinite(b)) throw InvalidArgument("b0 must be finite");
        b2 += b * b;
    }
    const double shift = b2 / a0;
    const double bound = a0 * H.eigenvalue(0) + shift;
    if (!(c > bound))
        throw OutOfRange("infeasible: c must exceed a0 lambda_0 + |b0|^2 / a0 = " + format_number(bound));

    GlobalMinimizer out{model.with_n_bar(a0), {}, {}, shift};
    const double T = solve_T_for_energy(out.model, H, a0, c - shift);
    out.state = build_state(out.model, H, T, a0);
    for (double b : b0) out.gauge.push_back(b / a0);
    return out;
}

}  // namespace gibbs
