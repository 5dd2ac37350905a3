#include "doctest.h"

#include <cmath>
#include <random>

#include "gibbs/errors.hpp"
#include "gibbs/solver.hpp"

using namespace gibbs;

namespace {

SpectralHamiltonian oscillator(std::size_t K)
{
    std::vector<double> ev(K);
    for (std::size_t j = 0; j < K; ++j) ev[j] = 2.0 * j + 2.0;
    return SpectralHamiltonian::from_eigenvalues(ev);
}

const SpectralHamiltonian& ho()
{
    static const SpectralHamiltonian H = oscillator(2000);
    return H;
}

EntropyModel tsallis2(double n_bar = 1.0)
{
    ModelParams p;
    p.q = 2.0;
    return make_model("tsallis", n_bar, p);
}

// Boltzmann on lambda_j = 2j + 2 with n_bar = 1: geometric series in closed form.
double boltz_mu(double T) { return -2.0 - T * std::log1p(-std::exp(-2.0 / T)); }
double boltz_energy(double T) { return 2.0 + 2.0 / std::expm1(2.0 / T); }
double boltz_entropy(double T) { return -(boltz_energy(T) + boltz_mu(T)) / T - 1.0; }
double boltz_dmu(double T)
{
    const double u = std::exp(-2.0 / T);
    return -std::log1p(-u) + 2.0 * u / (T * (1.0 - u));
}

// Independent root find for sum_j f((lambda_j + mu)/T) = n_bar with an
// explicitly written occupation function and plain bisection on a wide bracket.
template <class F>
double oracle_mu(F occ, double T, double n_bar, double lo, double hi, std::size_t K = 2000)
{
    auto Z = [&](double mu) {
        double z = 0.0;
        for (std::size_t j = 0; j < K; ++j) z += occ((2.0 * j + 2.0 + mu) / T);
        return z;
    };
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        (Z(mid) > n_bar ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Tsallis q = 2: nu_j = (M - lambda_j) / (2T) on the levels below M = -mu.
double tsallis2_mu(double T, double n_bar)
{
    double sum = 0.0;
    for (int k = 1;; ++k) {
        sum += 2.0 * (k - 1) + 2.0;
        const double M = (2.0 * T * n_bar + sum) / k;
        if (M <= 2.0 * k + 2.0) return -M;
    }
}

}  // namespace

TEST_CASE("Boltzmann oscillator: chemical potential, energy and entropy in closed form")
{
    const auto m = make_model("boltzmann", 1.0);
    for (double T : {0.5, 1.0, 2.0, 4.0}) {
        const GibbsState st = build_state(m, ho(), T, 1.0);
        const ThermoPoint p = evaluate(m, ho(), st);
        CHECK(st.mu == doctest::Approx(boltz_mu(T)).epsilon(1e-12));
        CHECK(p.energy == doctest::Approx(boltz_energy(T)).epsilon(1e-10));
        CHECK(p.entropy == doctest::Approx(boltz_entropy(T)).epsilon(1e-10));
        CHECK(st.occupations[0] == doctest::Approx(1.0 - std::exp(-2.0 / T)).epsilon(1e-10));
        CHECK(p.rank.kind() == CutoffRank::Kind::Unbounded);
        CHECK(st.tail_bound <= kTailTolerance);
    }
    CHECK(solve_mu(m, ho(), 1.0, 1.0) == doctest::Approx(-1.854587).epsilon(1e-6));
}

TEST_CASE("Fermi-Dirac and Bose-Einstein against an independent root find")
{
    const auto fd = make_model("fermi_dirac", 0.5);
    const auto be = make_model("bose_einstein", 1.0);
    for (double T : {0.3, 1.0, 3.0}) {
        // cap 1/2 sits at t = 0, and mu >= mu_0 = -lambda_0 keeps every argument t >= 0
        const double fd_mu = oracle_mu([](double t) { return 1.0 / (std::exp(t) + 1.0); }, T, 0.5, -2.0, 60.0);
        CHECK(solve_mu(fd, ho(), T, 0.5) == doctest::Approx(fd_mu).epsilon(1e-9));
        const double be_mu = oracle_mu([](double t) { return 1.0 / std::expm1(t); }, T, 1.0,
                                       -2.0 + T * std::log(2.0), 80.0);
        CHECK(solve_mu(be, ho(), T, 1.0) == doctest::Approx(be_mu).epsilon(1e-9));
    }
}

TEST_CASE("Tsallis q = 2: critical temperature and the pinned regime")
{
    const auto m = tsallis2();
    CHECK(critical_temperature(m, ho()) == doctest::Approx(1.0));
    for (double T : {0.1, 0.5, 1.0}) {
        const GibbsState st = build_state(m, ho(), T, 1.0);
        CHECK(st.rank_one);
        CHECK(st.mu == doctest::Approx(-2.0 * T - 2.0));
        CHECK(st.occupations[0] == 1.0);
        CHECK(evaluate(m, ho(), st).energy == doctest::Approx(2.0));
        CHECK(st.cutoff == CutoffRank::finite(0));
    }
    for (double T : {1.5, 3.0, 10.0, 200.0}) {
        const GibbsState st = build_state(m, ho(), T, 1.0);
        CHECK_FALSE(st.rank_one);
        CHECK(st.mu == doctest::Approx(tsallis2_mu(T, 1.0)).epsilon(1e-10));
        const std::size_t last = st.cutoff.last();
        CHECK(2.0 * last + 2.0 + st.mu <= 0.0);
        CHECK(2.0 * (last + 1) + 2.0 + st.mu > 0.0);
    }
    CHECK(cutoff_rank(m, ho(), 1.0, 10.0) == CutoffRank::empty());
    CHECK(cutoff_rank(make_model("boltzmann", 1.0), ho(), 1.0, 0.0) == CutoffRank::unbounded());
    CHECK(CutoffRank::empty().to_string() == "-1");
    CHECK(CutoffRank::unbounded().to_string() == "inf");
    CHECK(CutoffRank::finite(7).to_string() == "7");
}

TEST_CASE("partition function is nonincreasing in mu")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::vector<EntropyModel> models = {make_model("boltzmann", 1.0), make_model("fermi_dirac", 0.5),
                                              make_model("bose_einstein", 1.0), tsallis2()};
    for (const auto& m : models) {
        for (int i = 0; i < 100; ++i) {
            const double T = 0.2 + 5.0 * u(rng);
            const double mu0 = mu_lower_bound(m, ho(), T).value();
            const double a = mu0 + 20.0 * u(rng), b = mu0 + 20.0 * u(rng);
            const double lo = std::min(a, b), hi = std::max(a, b);
            CHECK(partition_function(m, ho(), T, lo) >= partition_function(m, ho(), T, hi));
        }
        CHECK_THROWS_AS(partition_function(m, ho(), 1.0, mu_lower_bound(m, ho(), 1.0).value() - 1.0),
                        InvalidArgument);
    }
}

TEST_CASE("state invariants across models and temperatures")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::vector<EntropyModel> models = {make_model("boltzmann", 1.0), make_model("boltzmann", 2.0),
                                              make_model("fermi_dirac", 0.5), make_model("fermi_dirac", 1.0),
                                              make_model("bose_einstein", 1.0), tsallis2(), tsallis2(3.0)};
    for (const auto& m : models) {
        for (int i = 0; i < 20; ++i) {
            const double T = 0.05 + 8.0 * u(rng);
            const GibbsState st = build_state(m, ho(), T, m.n_bar());
            double sum = 0.0;
            for (std::size_t j = 0; j < st.occupations.size(); ++j) {
                const double v = st.occupations[j];
                CHECK(v >= 0.0);
                CHECK(v <= m.n_bar());
                if (j > 0) CHECK(v <= st.occupations[j - 1]);
                sum += v;
            }
            CHECK(sum == doctest::Approx(m.n_bar()).epsilon(kTraceTolerance));
            const ThermoPoint p = evaluate(m, ho(), st);
            CHECK(p.energy >= ho().eigenvalue(0) * m.n_bar() * (1.0 - kTraceTolerance));
            CHECK(p.free_energy == doctest::Approx(free_energy(m, ho(), T, st.occupations)));
        }
    }
}

TEST_CASE("Gibbs state minimizes the free energy among feasible competitors")
{
    const std::vector<EntropyModel> models = {make_model("boltzmann", 1.0), make_model("fermi_dirac", 0.5),
                                              make_model("bose_einstein", 1.0), tsallis2()};
    for (const auto& m : models) {
        for (double T : {0.7, 1.0, 2.5}) {
            const GibbsState st = build_state(m, ho(), T, m.n_bar());
            const auto trials = perturbed_trials(st, 100, 42);
            const FreeEnergyReport rep = free_energy_check(m, ho(), st, trials);
            CHECK(rep.trials == 100);
            CHECK(rep.optimal);
            CHECK(rep.min_gap >= -kOptimalityTolerance);
        }
    }
    // determinism of the competitor stream
    const GibbsState st = build_state(make_model("boltzmann", 1.0), ho(), 1.0, 1.0);
    CHECK(perturbed_trials(st, 5, 9) == perturbed_trials(st, 5, 9));
    CHECK(perturbed_trials(st, 5, 9) != perturbed_trials(st, 5, 10));

    std::vector<std::vector<double>> bad = {{2.0}};
    CHECK_THROWS_AS(free_energy_check(make_model("boltzmann", 1.0), ho(), st, bad), InvalidArgument);
}

TEST_CASE("free energy difference equals the entropy integral")
{
    const auto b = make_model("boltzmann", 1.0);
    const FreeEnergyIdentity id = eqf_identity(b, ho(), 1.0, 1.0, 2.0);
    const double F1 = boltz_energy(1.0) + boltz_entropy(1.0);
    const double F2 = boltz_energy(2.0) + 2.0 * boltz_entropy(2.0);
    CHECK(id.lhs == doctest::Approx(F2 - F1).epsilon(1e-10));
    CHECK(id.residual < 1e-9);
    CHECK(eqf_check(make_model("fermi_dirac", 0.5), ho(), 0.5, 1.0, 2.0) < 1e-9);
    CHECK(eqf_check(tsallis2(), ho(), 1.0, 1.2, 4.0) < 1e-9);
    CHECK(eqf_check(b, ho(), 1.0, 1.5, 1.5) == 0.0);
    CHECK_THROWS_AS(eqf_check(tsallis2(), ho(), 1.0, 0.5, 2.0), InvalidArgument);
    CHECK_THROWS_AS(eqf_check(b, ho(), 1.0, 2.0, 1.0), InvalidArgument);
}

TEST_CASE("temperature derivative of mu and the entropy-energy relation")
{
    const auto b = make_model("boltzmann", 1.0);
    for (double T : {1.0, 3.0}) {
        const MuDerivativeReport rep = mu_derivative_check(b, ho(), 1.0, T);
        CHECK(rep.analytic == doctest::Approx(boltz_dmu(T)).epsilon(1e-10));
        CHECK(rep.mu_relative_error < 1e-6);
        CHECK(rep.entropy_relative_residual < 1e-6);
    }
    const auto fd = make_model("fermi_dirac", 0.5);
    for (double T : {1.0, 3.0}) {
        const MuDerivativeReport rep = mu_derivative_check(fd, ho(), 0.5, T);
        CHECK(rep.mu_relative_error < 1e-6);
        CHECK(rep.entropy_relative_residual < 1e-6);
    }
    CHECK_THROWS_AS(mu_derivative_check(tsallis2(), ho(), 1.0, 1.00001), InvalidArgument);
}

TEST_CASE("temperature for a prescribed energy")
{
    const auto b = make_model("boltzmann", 1.0);
    CHECK(solve_T_for_energy(b, ho(), 1.0, boltz_energy(2.0)) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(solve_T_for_energy(b, ho(), 1.0, boltz_energy(0.3)) == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(solve_T_for_energy(tsallis2(), ho(), 1.0, 2.5) > 1.0);
    CHECK_THROWS_AS(solve_T_for_energy(b, ho(), 1.0, 2.0), OutOfRange);
    CHECK_THROWS_AS(solve_T_for_energy(b, oscillator(40), 1.0, 1000.0), OutOfRange);
}

TEST_CASE("global minimizer with trace, current and energy constraints")
{
    const auto b = make_model("boltzmann", 1.0);
    const double b0[] = {0.5};
    const GlobalMinimizer g = min_entropy_global(b, ho(), 1.0, b0, 3.413953);
    CHECK(g.state.T == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(g.gauge.size() == 1);
    CHECK(g.gauge[0] == 0.5);
    CHECK(g.energy_shift == doctest::Approx(0.25));

    // a0 != 1 rebuilds the entropy on the new cap
    const double zero[] = {0.0};
    const GlobalMinimizer g2 = min_entropy_global(b, ho(), 2.0, zero, 6.0);
    CHECK(g2.model.n_bar() == 2.0);
    CHECK(evaluate(g2.model, ho(), g2.state).energy == doctest::Approx(6.0).epsilon(1e-9));

    CHECK_THROWS_AS(min_entropy_global(b, ho(), 1.0, b0, 2.25), OutOfRange);
    CHECK_THROWS_AS(min_entropy_global(b, ho(), 0.0, b0, 5.0), InvalidArgument);
    const double two[] = {0.1, 0.2};
    CHECK_THROWS_AS(min_entropy_global(b, ho(), 1.0, two, 5.0), InvalidArgument);
}

TEST_CASE("sweep flags")
{
    const auto b = make_model("boltzmann", 1.0);
    const double Ts[] = {0.5, 1.0, 2.0, 4.0};
    const SweepReport rep = sweep(b, ho(), 1.0, Ts, {true});
    REQUIRE(rep.rows.size() == 4);
    for (const auto& r : rep.rows) CHECK(r.ok);
    CHECK(rep.energy_increasing);
    CHECK(rep.entropy_decreasing);
    CHECK(rep.mu_over_T_nondecreasing);
    CHECK(rep.energy_above_ground);
    REQUIRE(rep.eqf_residuals.size() == 3);
    for (double r : rep.eqf_residuals) CHECK(r < 1e-9);

    const double bad[] = {1.0, 1.0};
    CHECK_THROWS_AS(sweep(b, ho(), 1.0, bad), InvalidArgument);
}

TEST_CASE("high-temperature chemical potential")
{
    // finite beta_minus: mu/T rises toward -beta_minus = 0
    const double Ts[] = {50.0, 200.0, 1000.0, 5000.0};
    const SweepReport ts = sweep(tsallis2(), ho(), 1.0, Ts);
    CHECK(ts.mu_over_T_nondecreasing);
    CHECK(ts.rows.back().point.mu / 5000.0 > -0.05);
    CHECK(ts.rows.back().point.mu < 0.0);

    // infinite beta_minus: mu/T grows without bound (here ~ log(T/2))
    const SpectralHamiltonian big = oscillator(60000);
    const double Tb[] = {10.0, 100.0, 1000.0};
    const SweepReport bz = sweep(make_model("boltzmann", 1.0), big, 1.0, Tb);
    for (const auto& r : bz.rows) REQUIRE(r.ok);
    CHECK(bz.mu_over_T_nondecreasing);
    CHECK(bz.rows.back().point.mu / 1000.0 == doctest::Approx(boltz_mu(1000.0) / 1000.0).epsilon(1e-9));
}

TEST_CASE("errors")
{
    const auto b = make_model("boltzmann", 1.0);
    CHECK_THROWS_AS(solve_mu(b, ho(), 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(solve_mu(b, ho(), -1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(solve_mu(b, ho(), 1.0, 2.0), InvalidArgument);
    // ten levels cannot certify the tail at T = 10
    CHECK_THROWS_AS(solve_mu(b, oscillator(10), 10.0, 1.0), SolverFailure);
    // Tsallis cutoff runs past the last trusted level
    CHECK_THROWS_AS(solve_mu(tsallis2(), oscillator(5), 50.0, 1.0), SolverFailure);
}
