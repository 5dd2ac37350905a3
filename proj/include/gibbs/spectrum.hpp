/** \file spectrum.hpp
 *
 *  \brief Finite-difference discretization of H = -Laplacian + V on a Dirichlet box
 *  and its lowest eigenpairs.
 */
#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace gibbs {

/// Box (-L, L)^d with N interior points per axis and Dirichlet walls at +-L.
struct GridSpec {
    int dimension = 1;
    double half_width = 12.0;
    int points = 2400;

    double spacing() const { return 2.0 * half_width / (points + 1); }
    std::size_t size() const;
    /// Coordinate of interior index i along one axis.
    double coordinate(int i) const { return -half_width + (i + 1) * spacing(); }
    void validate() const;
};

/// V(x) = 1 + |x|^theta.
struct PotentialSpec {
    double theta = 2.0;
    double offset = 1.0;

    double operator()(double r) const;
    void validate() const;
};

struct SolveOptions {
    bool eigenvectors = true;
};

class SpectralHamiltonian {
public:
    /// Spectrum given in closed form (e.g. the harmonic oscillator 2j+2).
    /// The trusted cap is the largest supplied eigenvalue; d and theta feed the
    /// Weyl-law quantities.
    static SpectralHamiltonian from_eigenvalues(std::vector<double> eigenvalues, int dimension = 1,
                                                double theta = 2.0);

    const GridSpec& grid() const { return grid_; }
    const PotentialSpec& potential() const { return potential_; }
    int dimension() const { return dimension_; }
    double theta() const { return potential_.theta; }

    std::size_t count() const { return eigenvalues_.size(); }
    std::span<const double> eigenvalues() const { return eigenvalues_; }
    double eigenvalue(std::size_t j) const { return eigenvalues_.at(j); }
    /// Largest retained eigenvalue; spectral queries beyond it are refused.
    double trusted_cap() const { return eigenvalues_.back(); }
    /// 0.1 * (4 d / h^2) for grid spectra; the retention rule.
    double resolution_cap() const { return resolution_cap_; }
    /// Growth exponent of the Weyl counting function, d/2 + d/theta.
    double weyl_exponent() const;

    bool has_eigenvectors() const { return !eigenvectors_.empty(); }
    /// h-orthonormal eigenfunction j sampled on the grid (row-major in d = 2).
    std::span<const double> eigenvector(std::size_t j) const;
    /// Number of grid values per eigenvector.
    std::size_t grid_size() const { return grid_size_; }
    /// Volume element h^d of the discrete inner product.
    double cell_volume() const;

    /// Applies the discrete operator to a grid function.
    std::vector<double> apply(std::span<const double> f) const;

private:
    friend SpectralHamiltonian assemble_and_solve(const GridSpec&, const PotentialSpec&, std::size_t,
                                                  const SolveOptions&);

    GridSpec grid_;
    PotentialSpec potential_;
    int dimension_ = 1;
    bool analytic_ = false;
    double resolution_cap_ = 0.0;
    std::size_t grid_size_ = 0;
    std::vector<double> eigenvalues_;
    std::vector<double> eigenvectors_;  // count() x grid_size_, row per eigenvector
};

/// Lowest K eigenpairs of the discrete operator, restricted to eigenvalues
/// below the resolution cap. d = 1 uses a symmetric tridiagonal solver,
/// d = 2 a dense symmetric solver (N^2 <= 6400).
SpectralHamiltonian assemble_and_solve(const GridSpec& grid, const PotentialSpec& potential, std::size_t K,
                                       const SolveOptions& options = {});

/// #{j : lambda_j <= E}. Throws OutOfRange when E exceeds the trusted cap.
std::size_t counting_function(const SpectralHamiltonian& H, double E);

/// sum_{lambda_j < E} (E - lambda_j)^s. Same range rule as counting_function.
double riesz_mean(const SpectralHamiltonian& H, double E, double s);

/// CSV with columns j,lambda_j.
void write_spectrum_csv(std::ostream& out, const SpectralHamiltonian& H);

}  // namespace gibbs
