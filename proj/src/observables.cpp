#include "gibbs/observables.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "gibbs/errors.hpp"
#include "gibbs/format.hpp"

namespace gibbs {

namespace {

using cplx = std::complex<double>;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Difference along one axis: centered inside, one-sided at the two walls.
void axis_derivative(const std::vector<cplx>& f, int N, int dimension, int axis, double h, std::vector<cplx>& out)
{
    const std::size_t stride = (dimension == 2 && axis == 0) ? static_cast<std::size_t>(N) : 1;
    const std::size_t lines = f.size() / N;
    out.resize(f.size());
    for (std::size_t line = 0; line < lines; ++line) {
        // start of the line and step between its points
        const std::size_t base = stride == 1 ? line * N : line;
        auto at = [&](int i) { return base + static_cast<std::size_t>(i) * stride; };
        out[at(0)] = (f[at(1)] - f[at(0)]) / h;
        for (int i = 1; i + 1 < N; ++i) out[at(i)] = (f[at(i + 1)] - f[at(i - 1)]) / (2.0 * h);
        out[at(N - 1)] = (f[at(N - 1)] - f[at(N - 2)]) / h;
    }
}

double potential_at(const GridSpec& grid, const PotentialSpec& V, std::size_t p)
{
    const int N = grid.points;
    if (grid.dimension == 1) return V(grid.coordinate(static_cast<int>(p)));
    const int i = static_cast<int>(p / N), k = static_cast<int>(p % N);
    return V(std::hypot(grid.coordinate(i), grid.coordinate(k)));
}

void integrate(ObservableFields& f)
{
    const double dv = f.cell_volume;
    auto sum = [dv](const std::vector<double>& v, std::size_t from, std::size_t count) {
        double s = 0.0;
        for (std::size_t p = from; p < from + count; ++p) s += v[p];
        return s * dv;
    };
    f.int_n = sum(f.n, 0, f.size);
    f.int_k = sum(f.k, 0, f.size);
    f.int_vn = sum(f.vn, 0, f.size);
    f.int_e = sum(f.e, 0, f.size);
    f.int_u.assign(f.dimension, 0.0);
    for (int c = 0; c < f.dimension; ++c) f.int_u[c] = sum(f.u, c * f.size, f.size);
}

}  // namespace

MixedState mixed_state_from_occupations(const SpectralHamiltonian& H, std::span<const double> occupations)
{
    if (occupations.size() > H.count()) throw InvalidArgument("more occupations than eigenvectors");
    MixedState st;
    for (std::size_t j = 0; j < occupations.size(); ++j) {
        if (occupations[j] == 0.0) continue;
        if (occupations[j] < 0.0) throw InvalidArgument("negative occupation");
        const auto v = H.eigenvector(j);
        st.weights.push_back(occupations[j]);
        st.orbitals.emplace_back(v.begin(), v.end());
    }
    return st;
}

MixedState random_mixed_state(const SpectralHamiltonian& H, std::size_t orbitals, double n_bar, std::uint64_t seed)
{
    if (orbitals == 0) throw InvalidArgument("need at least one orbital");
    if (!(n_bar > 0.0)) throw InvalidArgument("total weight must be positive");
    const std::size_t basis = std::min<std::size_t>(H.count(), 8);
    std::mt19937_64 rng(seed);
    MixedState st;
    double wsum = 0.0;
    for (std::size_t i = 0; i < orbitals; ++i) {
        std::vector<cplx> c(basis);
        double norm = 0.0;
        for (auto& z : c) {
            z = cplx(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
            norm += std::norm(z);
        }
        std::vector<cplx> phi(H.grid_size(), cplx(0.0));
        for (std::size_t j = 0; j < basis; ++j) {
            const auto v = H.eigenvector(j);
            const cplx a = c[j] / std::sqrt(norm);
            for (std::size_t p = 0; p < phi.size(); ++p) phi[p] += a * v[p];
        }
        st.orbitals.push_back(std::move(phi));
        const double w = 0.05 + uniform01(rng);
        st.weights.push_back(w);
        wsum += w;
    }
    for (auto& w : st.weights) w *= n_bar / wsum;
    return st;
}

MixedState gauge_transform(MixedState state, std::span<const double> b)
{
    if (state.gauge.empty()) state.gauge.assign(b.size(), 0.0);
    if (state.gauge.size() != b.size()) throw InvalidArgument("gauge vector has the wrong dimension");
    for (std::size_t c = 0; c < b.size(); ++c) state.gauge[c] += b[c];
    return state;
}

ObservableFields compute_fields(const SpectralHamiltonian& H, const MixedState& state)
{
    if (H.grid_size() == 0) throw InvalidArgument("closed-form spectrum has no grid to evaluate fields on");
    if (state.weights.size() != state.orbitals.size()) throw InvalidArgument("weights and orbitals differ in count");
    const GridSpec& grid = H.grid();
    const int d = grid.dimension;
    if (!state.gauge.empty() && static_cast<int>(state.gauge.size()) != d)
        throw InvalidArgument("gauge vector has the wrong dimension");

    ObservableFields f;
    f.dimension = d;
    f.size = grid.size();
    f.cell_volume = H.cell_volume();
    f.n.assign(f.size, 0.0);
    f.k.assign(f.size, 0.0);
    f.u.assign(d * f.size, 0.0);
    f.half_grad_n.assign(d * f.size, 0.0);

    const double h = grid.spacing();
    std::vector<cplx> grad;
    for (std::size_t i = 0; i < state.orbitals.size(); ++i) {
        const auto& phi = state.orbitals[i];
        const double w = state.weights[i];
        if (phi.size() != f.size) throw InvalidArgument("orbital does not match the grid");
        if (w < 0.0) throw InvalidArgument("negative weight");
        for (std::size_t p = 0; p < f.size; ++p) f.n[p] += w * std::norm(phi[p]);
        for (int c = 0; c < d; ++c) {
            axis_derivative(phi, grid.points, d, c, h, grad);
            const double b = state.gauge.empty() ? 0.0 : state.gauge[c];
            for (std::size_t p = 0; p < f.size; ++p) {
                const cplx g = grad[p] + cplx(0.0, b) * phi[p];
                const cplx m = std::conj(phi[p]) * g;
                f.u[c * f.size + p] += w * m.imag();
                f.half_grad_n[c * f.size + p] += w * m.real();
                f.k[p] += w * std::norm(g);
            }
        }
    }

    f.vn.resize(f.size);
    f.e.resize(f.size);
    f.grad_sqrt_n_sq.assign(f.size, 0.0);
    for (std::size_t p = 0; p < f.size; ++p) {
        f.vn[p] = potential_at(grid, H.potential(), p) * f.n[p];
        f.e[p] = f.k[p] + f.vn[p];
        if (f.n[p] > kDensityFloor) {
            double g2 = 0.0;
            for (int c = 0; c < d; ++c) g2 += std::pow(f.half_grad_n[c * f.size + p], 2);
            f.grad_sqrt_n_sq[p] = g2 / f.n[p];  // |grad n|^2 / (4 n) with grad n = 2 half_grad_n
        }
    }
    integrate(f);
    return f;
}

ObservableFields transformed_fields(const ObservableFields& f, std::span<const double> b)
{
    if (static_cast<int>(b.size()) != f.dimension) throw InvalidArgument("gauge vector has the wrong dimension");
    ObservableFields g = f;
    double b2 = 0.0;
    for (double x : b) b2 += x * x;
    for (std::size_t p = 0; p < f.size; ++p) {
        double bu = 0.0;
        for (int c = 0; c < f.dimension; ++c) {
            bu += b[c] * f.u[c * f.size + p];
            g.u[c * f.size + p] += f.n[p] * b[c];
        }
        g.k[p] += 2.0 * bu + b2 * f.n[p];
        g.e[p] += 2.0 * bu + b2 * f.n[p];
    }
    integrate(g);
    return g;
}

double max_field_deviation(const ObservableFields& a, const ObservableFields& b)
{
    if (a.size != b.size || a.dimension != b.dimension) throw InvalidArgument("fields live on different grids");
    double worst = 0.0;
    auto scan = [&](const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t p = 0; p < x.size(); ++p) worst = std::max(worst, std::abs(x[p] - y[p]) / (1.0 + std::abs(y[p])));
    };
    scan(a.n, b.n);
    scan(a.u, b.u);
    scan(a.k, b.k);
    scan(a.e, b.e);
    return worst;
}

AdmissibilityReport admissibility_check(const ObservableFields& f, double lambda0, double integral_slack)
{
    AdmissibilityReport rep;
    double grad_sqrt = 0.0, u_sq_over_n = 0.0;
    for (std::size_t p = 0; p < f.size; ++p) {
        if (f.n[p] < 0.0) rep.density_nonnegative = false;
        if (!(f.n[p] > kDensityFloor)) continue;
        ++rep.checked_points;
        double u2 = 0.0;
        for (int c = 0; c < f.dimension; ++c) u2 += std::pow(f.u[c * f.size + p], 2);
        const double lhs = f.grad_sqrt_n_sq[p] + u2 / f.n[p];
        const double excess = (lhs - f.k[p]) / (1.0 + f.k[p]);
        rep.worst_pointwise = std::max(rep.worst_pointwise, excess);
        if (excess > 1e-6) ++rep.pointwise_violations;
        grad_sqrt += f.grad_sqrt_n_sq[p];
        u_sq_over_n += u2 / f.n[p];
    }
    grad_sqrt *= f.cell_volume;
    u_sq_over_n *= f.cell_volume;

    rep.minmax_lhs = grad_sqrt + f.int_vn;
    rep.minmax_rhs = lambda0 * f.int_n;
    rep.minmax_holds = rep.minmax_lhs >= rep.minmax_rhs * (1.0 - integral_slack);

    double iu2 = 0.0;
    for (double x : f.int_u) iu2 += x * x;
    rep.current_lhs = f.int_n > 0.0 ? iu2 / f.int_n : 0.0;
    rep.current_rhs = u_sq_over_n;
    rep.current_holds = rep.current_lhs <= rep.current_rhs * (1.0 + 1e-12) + 1e-300;
    return rep;
}

void write_fields_csv(std::ostream& out, const GridSpec& grid, const ObservableFields& f)
{
    if (f.dimension == 1) {
        out << "x,n,u,k,e\n";
        for (std::size_t p = 0; p < f.size; ++p) {
            out << format_number(grid.coordinate(static_cast<int>(p))) << ',' << format_number(f.n[p]) << ','
                << format_number(f.u[p]) << ',' << format_number(f.k[p]) << ',' << format_number(f.e[p]) << '\n';
        }
        return;
    }
    out << "x,y,n,u_x,u_y,k,e\n";
    const int N = grid.points;
    for (std::size_t p = 0; p < f.size; ++p) {
        const int i = static_cast<int>(p / N), k = static_cast<int>(p % N);
        out << format_number(grid.coordinate(i)) << ',' << format_number(grid.coordinate(k)) << ','
            << format_number(f.n[p]) << ',' << format_number(f.u[p]) << ',' << format_number(f.u[f.size + p]) << ','
            << format_number(f.k[p]) << ',' << format_number(f.e[p]) << '\n';
    }
}

}  // namespace gibbs
