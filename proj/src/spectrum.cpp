#include "gibbs/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "gibbs/errors.hpp"
#include "gibbs/format.hpp"

namespace gibbs {

std::size_t GridSpec::size() const
{
    std::size_t n = 1;
    for (int k = 0; k < dimension; ++k) n *= static_cast<std::size_t>(points);
    return n;
}

void GridSpec::validate() const
{
    if (dimension != 1 && dimension != 2) throw InvalidArgument("grid dimension must be 1 or 2");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw InvalidArgument("grid half_width must be positive");
    if (points < 3) throw InvalidArgument("grid needs at least 3 points per axis");
}

double PotentialSpec::operator()(double r) const { return offset + std::pow(std::abs(r), theta); }

void PotentialSpec::validate() const
{
    if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidArgument("potential exponent theta must be positive");
}

double SpectralHamiltonian::weyl_exponent() const
{
    return 0.5 * dimension_ + dimension_ / potential_.theta;
}

std::span<const double> SpectralHamiltonian::eigenvector(std::size_t j) const
{
    if (!has_eigenvectors()) throw InvalidArgument("spectrum was computed without eigenvectors");
    if (j >= count()) throw OutOfRange("eigenvector index out of range");
    return {eigenvectors_.data() + j * grid_size_, grid_size_};
}

double SpectralHamiltonian::cell_volume() const
{
    return std::pow(grid_.spacing(), grid_.dimension);
}

std::vector<double> SpectralHamiltonian::apply(std::span<const double> f) const
{
    if (analytic_) throw InvalidArgument("closed-form spectrum has no grid operator");
    if (f.size() != grid_size_) throw InvalidArgument("grid function has the wrong size");
    const double h = grid_.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const int n = grid_.points;
    std::vector<double> out(f.size());
    if (grid_.dimension == 1) {
        for (int i = 0; i < n; ++i) {
            const double left = i > 0 ? f[i - 1] : 0.0;
            const double right = i + 1 < n ? f[i + 1] : 0.0;
            out[i] = (2.0 * f[i] - left - right) * inv_h2 + potential_(grid_.coordinate(i)) * f[i];
        }
        return out;
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const std::size_t p = static_cast<std::size_t>(i) * n + k;
            double lap = 4.0 * f[p];
            if (i > 0) lap -= f[p - n];
            if (i + 1 < n) lap -= f[p + n];
            if (k > 0) lap -= f[p - 1];
            if (k + 1 < n) lap -= f[p + 1];
            const double x = grid_.coordinate(i), y = grid_.coordinate(k);
            out[p] = lap * inv_h2 + potential_(std::hypot(x, y)) * f[p];
        }
    }
    return out;
}

SpectralHamiltonian SpectralHamiltonian::from_eigenvalues(std::vector<double> eigenvalues, int dimension,
                                                          double theta)
{
    if (eigenvalues.empty()) throw InvalidArgument("empty spectrum");
    if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end()))
        throw InvalidArgument("eigenvalues must be nondecreasing");
    SpectralHamiltonian H;
    H.analytic_ = true;
    H.dimension_ = dimension;
    H.grid_.dimension = dimension;
    H.potential_.theta = theta;
    H.eigenvalues_ = std::move(eigenvalues);
    H.resolution_cap_ = H.eigenvalues_.back();
    return H;
}

namespace {

// Sign convention: the first component of non-negligible magnitude is positive.
void fix_phase(std::span<double> v)
{
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    for (double x : v) {
        if (std::abs(x) > 1e-8 * peak) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            return;
        }
    }
}

}  // namespace

SpectralHamiltonian assemble_and_solve(const GridSpec& grid, const PotentialSpec& potential, std::size_t K,
                                       const SolveOptions& options)
{
    grid.validate();
    potential.validate();
    if (K == 0) throw InvalidArgument("requested eigenvalue count must be positive");
    if (grid.dimension == 2 && K > 2000) throw InvalidArgument("d = 2 supports at most 2000 eigenvalues");
    const std::size_t M = grid.size();
    if (K > M) throw InvalidArgument("requested eigenvalue count exceeds grid size N^d");
    if (grid.dimension == 2 && M > 6400) throw InvalidArgument("d = 2 grids are limited to N^2 <= 6400");

    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);

    SpectralHamiltonian H;
    H.grid_ = grid;
    H.potential_ = potential;
    H.dimension_ = grid.dimension;
    H.grid_size_ = M;
    H.resolution_cap_ = 0.1 * 4.0 * grid.dimension * inv_h2;

    const lapack_int n = static_cast<lapack_int>(M);
    const lapack_int kk = static_cast<lapack_int>(K);
    const char jobz = options.eigenvectors ? 'V' : 'N';
    std::vector<double> w(M);
    std::vector<double> z(options.eigenvectors ? M * K : 1);
    lapack_int found = 0;
    int info = 0;

    if (grid.dimension == 1) {
        std::vector<double> d(M), e(M);
        for (std::size_t i = 0; i < M; ++i) {
            d[i] = 2.0 * inv_h2 + potential(grid.coordinate(static_cast<int>(i)));
            e[i] = -inv_h2;
        }
        std::vector<lapack_int> isuppz(2 * K);
        info = LAPACKE_dstevr(LAPACK_COL_MAJOR, jobz, 'I', n, d.data(), e.data(), 0.0, 0.0, 1, kk, 0.0, &found,
                              w.data(), z.data(), n, isuppz.data());
    } else {
        const int N = grid.points;
        std::vector<double> a(M * M, 0.0);
        for (int i = 0; i < N; ++i) {
            for (int k = 0; k < N; ++k) {
                const std::size_t p = static_cast<std::size_t>(i) * N + k;
                const double r = std::hypot(grid.coordinate(i), grid.coordinate(k));
                a[p * M + p] = 4.0 * inv_h2 + potential(r);
                if (i + 1 < N) a[p * M + p + N] = a[(p + N) * M + p] = -inv_h2;
                if (k + 1 < N) a[p * M + p + 1] = a[(p + 1) * M + p] = -inv_h2;
            }
        }
        std::vector<lapack_int> isuppz(2 * K);
        info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, jobz, 'I', 'U', n, a.data(), n, 0.0, 0.0, 1, kk, 0.0, &found,
                              w.data(), z.data(), n, isuppz.data());
    }
    if (info != 0) throw SolverFailure("symmetric eigensolver failed (LAPACK info = " + std::to_string(info) + ")");

    std::size_t retained = 0;
    while (retained < static_cast<std::size_t>(found) && w[retained] <= H.resolution_cap_) ++retained;
    if (retained < 2) throw OutOfRange("grid resolves fewer than two eigenvalues; refine the grid");

    H.eigenvalues_.assign(w.begin(), w.begin() + retained);
    if (options.eigenvectors) {
        const double scale = 1.0 / std::sqrt(H.cell_volume());
        H.eigenvectors_.assign(z.begin(), z.begin() + retained * M);
        for (double& v : H.eigenvectors_) v *= scale;
        for (std::size_t j = 0; j < retained; ++j)
            fix_phase(std::span<double>(H.eigenvectors_.data() + j * M, M));
    }
    return H;
}

namespace {

void require_trusted(const SpectralHamiltonian& H, double E)
{
    if (E > H.trusted_cap()) {
        throw OutOfRange("energy " + format_number(E) + " exceeds trusted spectrum cap " +
                         format_number(H.trusted_cap()) + "; increase the eigenvalue count");
    }
}

}  // namespace

std::size_t counting_function(const SpectralHamiltonian& H, double E)
{
    require_trusted(H, E);
    const auto ev = H.eigenvalues();
    return static_cast<std::size_t>(std::upper_bound(ev.begin(), ev.end(), E) - ev.begin());
}

double riesz_mean(const SpectralHamiltonian& H, double E, double s)
{
    if (!(s > 0.0)) throw InvalidArgument("Riesz order s must be positive");
    require_trusted(H, E);
    double sum = 0.0;
    for (double l : H.eigenvalues()) {
        if (l >= E) break;
        sum += std::pow(E - l, s);
    }
    return sum;
}

void write_spectrum_csv(std::ostream& out, const SpectralHamiltonian& H)
{
    out << "j,lambda_j\n";
    for (std::size_t j = 0; j < H.count(); ++j) out << j << ',' << format_number(H.eigenvalue(j)) << '\n';
}

}  // namespace gibbs
