#include "doctest.h"

#include <cmath>
#include <random>

#include "gibbs/entropy.hpp"
#include "gibbs/errors.hpp"

using namespace gibbs;

namespace {

ModelParams tsallis(double q, double gamma = 0.9)
{
    ModelParams p;
    p.q = q;
    p.gamma = gamma;
    return p;
}

std::vector<EntropyModel> catalogue()
{
    return {make_model("boltzmann", 1.0), make_model("boltzmann", 2.5), make_model("fermi_dirac", 0.5),
            make_model("fermi_dirac", 1.0), make_model("bose_einstein", 1.0), make_model("bose_einstein", 3.0),
            make_model("tsallis", 1.0, tsallis(2.0)), make_model("tsallis", 2.0, tsallis(3.0)),
            make_model("tsallis", 1.0, tsallis(0.5, 0.4))};
}

// Interior of (-beta_plus, -beta_minus), sampled uniformly in a window.
double sample_t(const EntropyModel& m, std::mt19937_64& rng)
{
    const double lo = m.beta_plus().is_finite() ? -m.beta_plus().value() : -30.0;
    const double hi = m.beta_minus().is_finite() ? -m.beta_minus().value() : 30.0;
    std::uniform_real_distribution<double> u(0.02, 0.98);
    return lo + (hi - lo) * u(rng);
}

}  // namespace

TEST_CASE("endpoint slopes of the catalogue")
{
    CHECK(make_model("boltzmann", 1.0).beta_minus().is_minus_infinity());
    CHECK(make_model("boltzmann", 1.0).beta_plus().value() == doctest::Approx(0.0));
    CHECK(make_model("boltzmann", 2.0).beta_plus().value() == doctest::Approx(std::log(2.0)));
    CHECK(make_model("fermi_dirac", 0.5).beta_plus().value() == doctest::Approx(0.0));
    CHECK(make_model("fermi_dirac", 1.0).beta_plus().is_plus_infinity());
    CHECK(make_model("bose_einstein", 1.0).beta_plus().value() == doctest::Approx(std::log(0.5)));
    const auto ts = make_model("tsallis", 1.0, tsallis(2.0));
    CHECK(ts.beta_minus().is_finite());
    CHECK(ts.beta_minus().value() == 0.0);
    CHECK(ts.beta_plus().value() == doctest::Approx(2.0));
    CHECK(make_model("tsallis", 1.0, tsallis(0.5, 0.4)).beta_minus().is_minus_infinity());
}

TEST_CASE("closed-form occupation maps")
{
    const auto b = make_model("boltzmann", 1.0);
    for (double t : {0.0, 0.3, 1.0, 5.0, 40.0}) CHECK(b.xi(t) == doctest::Approx(std::exp(-t)).epsilon(1e-14));
    CHECK(b.xi(-0.5) == 1.0);  // below -beta_plus = 0: pinned at n_bar

    const auto fd = make_model("fermi_dirac", 1.0);
    for (double t : {-20.0, -1.0, 0.0, 2.0, 30.0})
        CHECK(fd.xi(t) == doctest::Approx(1.0 / (std::exp(t) + 1.0)).epsilon(1e-14));

    const auto be = make_model("bose_einstein", 1.0);
    for (double t : {std::log(2.0) + 1e-3, 1.0, 10.0})
        CHECK(be.xi(t) == doctest::Approx(1.0 / (std::exp(t) - 1.0)).epsilon(1e-13));

    const auto ts = make_model("tsallis", 1.0, tsallis(2.0));
    CHECK(ts.xi(-1.0) == doctest::Approx(0.5));
    CHECK(ts.xi(0.0) == 0.0);
    CHECK(ts.xi(3.0) == 0.0);
    CHECK(ts.xi(-5.0) == 1.0);
}

TEST_CASE("xi inverts beta' on the interior")
{
    std::mt19937_64 rng(7);
    for (const auto& m : catalogue()) {
        for (int i = 0; i < 200; ++i) {
            const double t = sample_t(m, rng);
            const double x = m.xi(t);
            // beta' near a logarithmic cap is ill-conditioned (it sees n_bar - x)
            if (x <= 1e-200 || x >= m.n_bar() * (1.0 - 1e-6)) continue;
            CHECK(m.beta_prime(x) == doctest::Approx(-t).epsilon(1e-9));
        }
    }
}

TEST_CASE("xi is nonincreasing with values in [0, n_bar]")
{
    std::mt19937_64 rng(11);
    for (const auto& m : catalogue()) {
        for (int i = 0; i < 200; ++i) {
            double s = sample_t(m, rng), t = sample_t(m, rng);
            if (s > t) std::swap(s, t);
            CHECK(m.xi(s) >= m.xi(t));
            CHECK(m.xi(s) <= m.n_bar());
            CHECK(m.xi(t) >= 0.0);
        }
    }
}

TEST_CASE("xi' matches a central difference of xi")
{
    std::mt19937_64 rng(13);
    for (const auto& m : catalogue()) {
        for (int i = 0; i < 50; ++i) {
            const double t = sample_t(m, rng);
            const double h = 1e-5 * std::max(1.0, std::abs(t));
            const double fd = (m.xi(t + h) - m.xi(t - h)) / (2.0 * h);
            // differencing noise ~ eps n_bar / h
            CHECK(std::abs(m.xi_prime(t) - fd) <= 1e-5 * std::abs(fd) + 1e-9);
        }
    }
}

TEST_CASE("beta is convex with beta(0) = 0")
{
    for (const auto& m : catalogue()) {
        CHECK(m.beta(0.0) == 0.0);
        for (int i = 1; i < 100; ++i) {
            const double x = m.n_bar() * i / 100.0;
            CHECK(m.beta_second(x) > 0.0);
            // chord above the graph
            const double r = std::min(x, m.n_bar() - x);
            const double a = x - 0.5 * r, b = x + 0.5 * r;
            CHECK(m.beta(x) <= 0.5 * (m.beta(a) + m.beta(b)) + 1e-14);
        }
    }
}

TEST_CASE("fermi_dirac particle-hole symmetry at n_bar = 1")
{
    const auto fd = make_model("fermi_dirac", 1.0);
    for (double t = -8.0; t <= 8.0; t += 0.37) CHECK(fd.xi(t) + fd.xi(-t) == doctest::Approx(1.0));
}

TEST_CASE("growth constant of Boltzmann")
{
    // sup_{x <= 1/2} x^{1-gamma} |log x| = 1/((1-gamma) e), attained at x = exp(-1/(1-gamma))
    const auto b = make_model("boltzmann", 1.0);
    const double exact = 1.0 / (0.1 * std::exp(1.0));
    CHECK(b.growth_constant(0.5) == doctest::Approx(exact).epsilon(1e-8));
    CHECK(b.xi_decay_constant() == doctest::Approx(std::pow(exact, 10.0)).epsilon(1e-6));
}

TEST_CASE("growth validation")
{
    for (const auto& m : catalogue()) {
        const GrowthReport rep = validate_growth(m, 400);
        INFO(m.name(), ": ", rep.diagnostic);
        CHECK(rep.accepted);
    }
    // q below gamma: x^{1-gamma} x^{q-1} blows up at 0
    const auto bad = make_model("tsallis", 1.0, tsallis(0.5));
    const GrowthReport rep = validate_growth(bad, 400);
    CHECK_FALSE(rep.accepted);
    CHECK_FALSE(rep.diagnostic.empty());

    // gamma must exceed d/(d+2)
    ModelParams low;
    low.gamma = 0.3;
    CHECK_FALSE(validate_growth(make_model("boltzmann", 1.0, low), 100, 1).accepted);
    ModelParams mid;
    mid.gamma = 0.6;
    CHECK(validate_growth(make_model("boltzmann", 1.0, mid), 100, 1).accepted);
    CHECK_FALSE(validate_growth(make_model("boltzmann", 1.0, mid), 100, 4).accepted);

    const auto ts = validate_growth(make_model("tsallis", 1.0, tsallis(2.0)), 200);
    REQUIRE(ts.r);
    CHECK(*ts.r == doctest::Approx(1.0));
    CHECK(ts.c_minus == doctest::Approx(2.0));
    CHECK(ts.c_plus == doctest::Approx(2.0));
}

TEST_CASE("custom entropy reproduces Boltzmann")
{
    CustomEntropy c;
    c.beta = [](double x) { return x > 0 ? x * std::log(x) - x : 0.0; };
    c.beta_prime = [](double x) { return std::log(x); };
    c.beta_second = [](double x) { return 1.0 / x; };
    const auto m = make_custom_model(c, 1.0);
    CHECK(m.kind() == EntropyKind::Custom);
    CHECK(m.beta_minus().is_minus_infinity());
    CHECK(m.beta_plus().value() == doctest::Approx(0.0));
    for (double t : {0.1, 1.0, 4.0, 12.0}) CHECK(m.xi(t) == doctest::Approx(std::exp(-t)).epsilon(1e-10));
    CHECK(m.xi_prime(1.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("custom entropy with finite slope at 0 gets a Hoelder exponent")
{
    CustomEntropy c;  // beta = x^3, beta' = 3 x^2
    c.beta = [](double x) { return x * x * x; };
    c.beta_prime = [](double x) { return 3.0 * x * x; };
    c.beta_second = [](double x) { return 6.0 * x; };
    const auto m = make_custom_model(c, 1.0);
    REQUIRE(m.r());
    CHECK(*m.r() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("with_n_bar keeps the density and moves the cap")
{
    const auto m = make_model("boltzmann", 1.0).with_n_bar(3.0);
    CHECK(m.n_bar() == 3.0);
    CHECK(m.beta_plus().value() == doctest::Approx(std::log(3.0)));
    const auto t = make_model("tsallis", 1.0, tsallis(2.0)).with_n_bar(2.0);
    CHECK(t.q() == 2.0);
    CHECK(t.beta_plus().value() == doctest::Approx(4.0));
}

TEST_CASE("xi_T scales the argument")
{
    const auto b = make_model("boltzmann", 1.0);
    CHECK(xi_T(b, 2.0, 3.0) == doctest::Approx(std::exp(-1.5)));
    CHECK_THROWS_AS(xi_T(b, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(xi_T(b, -1.0, 1.0), InvalidArgument);
}

TEST_CASE("bad parameters are rejected")
{
    CHECK_THROWS_AS(make_model("boltzmann", 0.0), InvalidArgument);
    CHECK_THROWS_AS(make_model("boltzmann", -1.0), InvalidArgument);
    CHECK_THROWS_AS(make_model("fermi_dirac", 1.5), InvalidArgument);
    CHECK_THROWS_AS(make_model("tsallis", 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_model("tsallis", 1.0, tsallis(1.0)), InvalidArgument);
    CHECK_THROWS_AS(make_model("tsallis", 1.0, tsallis(-2.0)), InvalidArgument);
    CHECK_THROWS_AS(make_model("gauss", 1.0), InvalidArgument);
    ModelParams g;
    g.gamma = 1.0;
    CHECK_THROWS_AS(make_model("boltzmann", 1.0, g), InvalidArgument);
}

TEST_CASE("names")
{
    CHECK(make_model("boltzmann", 1.0).name() == "boltzmann");
    CHECK(make_model("fermi_dirac", 1.0).name() == "fermi_dirac");
    CHECK(make_model("tsallis", 1.0, tsallis(2.0)).name() == "tsallis(2)");
}
