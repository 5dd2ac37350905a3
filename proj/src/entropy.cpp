#include "gibbs/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "gibbs/errors.hpp"

namespace gibbs {

std::string ExtendedReal::to_string() const
{
    switch (kind_) {
    case Kind::PlusInfinity: return "+inf";
    case Kind::MinusInfinity: return "-inf";
    default: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", value_);
        return buf;
    }
    }
}

std::string_view to_string(EntropyKind kind)
{
    switch (kind) {
    case EntropyKind::Boltzmann: return "boltzmann";
    case EntropyKind::FermiDirac: return "fermi_dirac";
    case EntropyKind::BoseEinstein: return "bose_einstein";
    case EntropyKind::Tsallis: return "tsallis";
    case EntropyKind::Custom: return "custom";
    }
    return "unknown";
}

namespace {

// x log x with the continuous extension 0 at x = 0.
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

std::string EntropyModel::name() const
{
    if (kind_ == EntropyKind::Tsallis) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "tsallis(%g)", q_);
        return buf;
    }
    return std::string(to_string(kind_));
}

double EntropyModel::beta(double x) const
{
    switch (kind_) {
    case EntropyKind::Boltzmann: return xlogx(x) - x;
    case EntropyKind::FermiDirac: return xlogx(x) + xlogx(1.0 - x);
    case EntropyKind::BoseEinstein: return xlogx(x) - xlogx(1.0 + x);
    case EntropyKind::Tsallis: return std::pow(x, q_) / (q_ - 1.0);
    case EntropyKind::Custom: return x == 0.0 ? 0.0 : custom_.beta(x);
    }
    return 0.0;
}

double EntropyModel::beta_prime(double x) const
{
    switch (kind_) {
    case EntropyKind::Boltzmann: return std::log(x);
    case EntropyKind::FermiDirac: return std::log(x) - std::log1p(-x);
    case EntropyKind::BoseEinstein: return std::log(x) - std::log1p(x);
    case EntropyKind::Tsallis: return q_ / (q_ - 1.0) * std::pow(x, q_ - 1.0);
    case EntropyKind::Custom: return custom_.beta_prime(x);
    }
    return 0.0;
}

double EntropyModel::beta_second(double x) const
{
    switch (kind_) {
    case EntropyKind::Boltzmann: return 1.0 / x;
    case EntropyKind::FermiDirac: return 1.0 / (x * (1.0 - x));
    case EntropyKind::BoseEinstein: return 1.0 / (x * (1.0 + x));
    case EntropyKind::Tsallis: return q_ * std::pow(x, q_ - 2.0);
    case EntropyKind::Custom:
        if (custom_.beta_second) return custom_.beta_second(x);
        {
            const double h = 1e-6 * std::max(x, 1e-12);
            return (custom_.beta_prime(x + h) - custom_.beta_prime(x - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

double EntropyModel::xi_interior(double t) const
{
    switch (kind_) {
    case EntropyKind::Boltzmann: return std::exp(-t);
    case EntropyKind::FermiDirac:
        if (t > 0.0) {
            const double e = std::exp(-t);
            return e / (1.0 + e);
        }
        return 1.0 / (std::exp(t) + 1.0);
    case EntropyKind::BoseEinstein: return 1.0 / std::expm1(t);
    case EntropyKind::Tsallis: return std::pow((q_ - 1.0) * (-t) / q_, 1.0 / (q_ - 1.0));
    case EntropyKind::Custom: {
        // beta' is increasing: find x with beta'(x) = -t.
        double lo = 0.0;
        double hi = n_bar_;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (custom_.beta_prime(mid) < -t)
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= 1e-12 * hi) break;
        }
        return 0.5 * (lo + hi);
    }
    }
    return 0.0;
}

double EntropyModel::xi(double t) const
{
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (beta_plus_.is_finite() && t <= -beta_plus_.value()) return n_bar_;
    if (beta_minus_.is_finite() && t >= -beta_minus_.value()) return 0.0;
    return std::clamp(xi_interior(t), 0.0, n_bar_);
}

double EntropyModel::xi_prime(double t) const
{
    if (beta_plus_.is_finite() && t <= -beta_plus_.value()) return 0.0;
    if (beta_minus_.is_finite() && t >= -beta_minus_.value()) return 0.0;
    const double x = xi(t);
    switch (kind_) {
    case EntropyKind::Boltzmann: return -x;
    case EntropyKind::FermiDirac: return -x * (1.0 - x);
    case EntropyKind::BoseEinstein: return -x * (1.0 + x);
    default:
        if (x <= 0.0) return 0.0;
        return -1.0 / beta_second(x);
    }
}

void EntropyModel::classify_endpoints()
{
    const double at_zero = beta_prime(0.0);
    const double at_cap = beta_prime(n_bar_);
    if (std::isnan(at_zero) || std::isnan(at_cap))
        throw InvalidArgument("entropy derivative must have a limit (possibly infinite) at 0 and n_bar");
    beta_minus_ = ExtendedReal::from_double(at_zero);
    beta_plus_ = ExtendedReal::from_double(at_cap);
}

void EntropyModel::init_decay()
{
    if (beta_minus_.is_finite()) return;
    xi_decay_ = std::pow(growth_constant(0.5 * n_bar_), 1.0 / (1.0 - gamma_));
}

EntropyModel EntropyModel::with_n_bar(double n_bar) const
{
    if (kind_ == EntropyKind::Custom) {
        EntropyModel copy = make_custom_model(custom_, n_bar, gamma_);
        return copy;
    }
    ModelParams params;
    params.gamma = gamma_;
    if (kind_ == EntropyKind::Tsallis) params.q = q_;
    return make_model(to_string(kind_), n_bar, params);
}

double EntropyModel::growth_constant(double x_bar) const
{
    const double expo = 1.0 - gamma_;
    auto g = [&](double log_x) {
        const double x = std::exp(log_x);
        return std::exp(expo * log_x) * std::abs(beta_prime(x));
    };
    // log-spaced from x_bar down to ~1e-300
    const double top = std::log(x_bar);
    const double bottom = std::log(1e-300);
    const int samples = 4000;
    std::vector<double> values(samples);
    int best = 0;
    for (int i = 0; i < samples; ++i) {
        const double lx = top + (bottom - top) * i / (samples - 1);
        values[i] = g(lx);
        if (!std::isfinite(values[i])) return HUGE_VAL;
        if (values[i] > values[best]) best = i;
    }
    if (best == samples - 1) return HUGE_VAL;  // still increasing toward 0

    // golden-section refinement of the sampled maximum
    const double step = (bottom - top) / (samples - 1);
    double a = top + step * std::max(best - 1, 0);
    double b = top + step * std::min(best + 1, samples - 1);
    if (a > b) std::swap(a, b);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    for (int it = 0; it < 100; ++it) {
        if (g(c) > g(d))
            b = d;
        else
            a = c;
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    const double refined = std::max(values[best], g(0.5 * (a + b)));
    return refined * (1.0 + 1e-9);
}

EntropyModel make_model(std::string_view name, double n_bar, const ModelParams& params)
{
    if (!(n_bar > 0.0) || !std::isfinite(n_bar))
        throw InvalidArgument("n_bar must be positive and finite");
    EntropyModel m;
    m.n_bar_ = n_bar;
    m.gamma_ = params.gamma.value_or(0.9);
    if (!(m.gamma_ > 0.0 && m.gamma_ < 1.0))
        throw InvalidArgument("gamma must lie in (0, 1)");

    if (name == "boltzmann") {
        m.kind_ = EntropyKind::Boltzmann;
    } else if (name == "fermi_dirac") {
        if (n_bar > 1.0) throw InvalidArgument("fermi_dirac requires n_bar <= 1");
        m.kind_ = EntropyKind::FermiDirac;
    } else if (name == "bose_einstein") {
        m.kind_ = EntropyKind::BoseEinstein;
    } else if (name == "tsallis") {
        if (!params.q) throw InvalidArgument("tsallis requires parameter q");
        const double q = *params.q;
        if (!(q > 0.0) || q == 1.0 || !std::isfinite(q))
            throw InvalidArgument("tsallis q must lie in (0,1) or (1,inf)");
        m.kind_ = EntropyKind::Tsallis;
        m.q_ = q;
        if (q > 1.0) m.r_ = q - 1.0;
    } else {
        throw InvalidArgument("unknown entropy model '" + std::string(name) + "'");
    }
    m.classify_endpoints();
    m.init_decay();
    return m;
}

EntropyModel make_custom_model(CustomEntropy entropy, double n_bar, double gamma)
{
    if (!(n_bar > 0.0) || !std::isfinite(n_bar))
        throw InvalidArgument("n_bar must be positive and finite");
    if (!entropy.beta || !entropy.beta_prime)
        throw InvalidArgument("custom entropy needs beta and beta_prime");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in (0, 1)");
    EntropyModel m;
    m.kind_ = EntropyKind::Custom;
    m.n_bar_ = n_bar;
    m.gamma_ = gamma;
    m.custom_ = std::move(entropy);
    m.classify_endpoints();
    if (m.beta_minus_.is_finite()) {
        if (m.custom_.r) {
            m.r_ = m.custom_.r;
        } else {
            // log-log slope of beta'(x) - beta'(0) near the origin
            const double b0 = m.beta_minus_.value();
            const double x1 = 1e-6 * n_bar, x2 = 1e-5 * n_bar;
            const double y1 = m.custom_.beta_prime(x1) - b0;
            const double y2 = m.custom_.beta_prime(x2) - b0;
            if (y1 > 0.0 && y2 > 0.0) m.r_ = std::log(y2 / y1) / std::log(x2 / x1);
        }
    } else if (m.custom_.r) {
        throw InvalidArgument("Hoelder exponent r requires a finite beta'(0)");
    }
    m.init_decay();
    return m;
}

double xi_T(const EntropyModel& model, double T, double x)
{
    if (!(T > 0.0)) throw InvalidArgument("temperature must be positive");
    return model.xi(x / T);
}

GrowthReport validate_growth(const EntropyModel& model, int sample_count, int dimension)
{
    if (sample_count < 2) throw InvalidArgument("sample_count must be at least 2");
    if (dimension < 1) throw InvalidArgument("dimension must be positive");

    GrowthReport rep;
    rep.gamma = model.gamma();
    const double g_low = static_cast<double>(dimension) / (dimension + 2.0);
    if (!(rep.gamma > g_low && rep.gamma < 1.0)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "gamma = %g outside admissible interval (%g, 1) for d = %d",
                      rep.gamma, g_low, dimension);
        rep.diagnostic = buf;
        return rep;
    }

    rep.x_upper = 0.5 * model.n_bar();
    rep.sup_value = model.growth_constant(rep.x_upper);
    if (!std::isfinite(rep.sup_value)) {
        rep.diagnostic = "sup x^(1-gamma)|beta'(x)| diverges as x -> 0";
        return rep;
    }
    const double p = 1.0 / (1.0 - rep.gamma);
    rep.xi_constant = std::pow(rep.sup_value, p);

    if (model.beta_minus().is_finite()) {
        rep.r = model.r();
        if (!rep.r || !(*rep.r > 0.0)) {
            rep.diagnostic = "finite beta'(0) but no positive Hoelder exponent r";
            return rep;
        }
        rep.x_lower = 0.5 * model.n_bar();
        const double b0 = model.beta_minus().value();
        rep.c_minus = HUGE_VAL;
        rep.c_plus = 0.0;
        const double lo = std::log(rep.x_lower * 1e-8), hi = std::log(rep.x_lower);
        for (int i = 0; i < sample_count; ++i) {
            const double x = std::exp(lo + (hi - lo) * i / (sample_count - 1));
            const double ratio = (model.beta_prime(x) - b0) / std::pow(x, *rep.r);
            rep.c_minus = std::min(rep.c_minus, ratio);
            rep.c_plus = std::max(rep.c_plus, ratio);
        }
        if (!(rep.c_minus > 0.0) || !std::isfinite(rep.c_plus)) {
            rep.diagnostic = "Hoelder bounds c_- x^r <= beta'(x) - beta'(0) <= c_+ x^r fail";
            return rep;
        }
    } else {
        const double t_lo = std::max(-model.beta_prime(rep.x_upper), 1e-3);
        const double t_hi = std::max(1e6, 10.0 * t_lo);
        for (int i = 0; i < sample_count; ++i) {
            const double t = std::exp(std::log(t_lo) + (std::log(t_hi) - std::log(t_lo)) * i / (sample_count - 1));
            const double bound = rep.xi_constant * std::pow(t, -p);
            if (model.xi(t) > bound * (1.0 + 1e-9)) {
                rep.xi_bound_holds = false;
                rep.diagnostic = "xi decay bound violated";
                return rep;
            }
        }
    }
    rep.accepted = true;
    return rep;
}

}  // namespace gibbs
