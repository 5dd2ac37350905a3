/** \file observables.hpp
 *
 *  \brief Density, current, kinetic and energy fields of a mixed state on the grid,
 *  Galilean gauge transforms and the admissibility inequalities.
 *
 *  A mixed state is sum_i w_i |e^{i b.x} phi_i><e^{i b.x} phi_i|. The phase
 *  e^{i b.x} is kept symbolic: gradients of psi_i are taken as
 *  e^{i b.x} (D phi_i + i b phi_i) with D the grid difference operator
 *  (centered inside, one-sided at the walls).
 */
#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gibbs/spectrum.hpp"

namespace gibbs {

struct MixedState {
    std::vector<double> weights;
    std::vector<std::vector<std::complex<double>>> orbitals;  ///< phi_i, one value per grid point
    std::vector<double> gauge;                                 ///< b; empty means no phase
};

/// sum_j nu_j |phi_j><phi_j| over the eigenvectors of H (zero weights skipped).
MixedState mixed_state_from_occupations(const SpectralHamiltonian& H, std::span<const double> occupations);

/// Random positive combination of complex superpositions of the lowest
/// eigenvectors, with total weight n_bar. Deterministic in seed.
MixedState random_mixed_state(const SpectralHamiltonian& H, std::size_t orbitals, double n_bar, std::uint64_t seed);

/// Multiplies every orbital by e^{i b.x} (composes with an existing gauge).
MixedState gauge_transform(MixedState state, std::span<const double> b);

struct ObservableFields {
    int dimension = 1;
    std::size_t size = 0;
    double cell_volume = 0.0;
    std::vector<double> n;
    std::vector<double> k;
    std::vector<double> vn;                 ///< V n
    std::vector<double> e;                  ///< k + V n
    std::vector<double> u;                  ///< component-major: u[c * size + p]
    std::vector<double> half_grad_n;        ///< Re sum w psi* grad psi, same layout as u
    std::vector<double> grad_sqrt_n_sq;     ///< |grad n|^2 / (4 n); 0 where n <= kDensityFloor

    double int_n = 0.0, int_k = 0.0, int_vn = 0.0, int_e = 0.0;
    std::vector<double> int_u;

    double u_at(int c, std::size_t p) const { return u[c * size + p]; }
};

inline constexpr double kDensityFloor = 1e-12;

ObservableFields compute_fields(const SpectralHamiltonian& H, const MixedState& state);

/// Fields of the transformed state from the untransformed ones:
/// n' = n, u' = u + n b, k' = k + 2 b.u + |b|^2 n, e' = e + 2 b.u + |b|^2 n.
ObservableFields transformed_fields(const ObservableFields& f, std::span<const double> b);

/// max over points and fields (n, u, k, e) of |a - b| / (1 + |b|).
double max_field_deviation(const ObservableFields& a, const ObservableFields& b);

struct AdmissibilityReport {
    std::size_t checked_points = 0;   ///< points with n > kDensityFloor
    std::size_t pointwise_violations = 0;
    double worst_pointwise = 0.0;     ///< max of (lhs - k) / (1 + k)
    bool density_nonnegative = true;

    double minmax_lhs = 0.0;  ///< int |grad sqrt n|^2 + int V n
    double minmax_rhs = 0.0;  ///< lambda_0 int n
    bool minmax_holds = true;

    double current_lhs = 0.0;  ///< |int u|^2 / int n
    double current_rhs = 0.0;  ///< int |u|^2 / n
    bool current_holds = true;

    bool all_pass() const
    {
        return pointwise_violations == 0 && density_nonnegative && minmax_holds && current_holds;
    }
};

/// Pointwise |grad sqrt n|^2 + |u|^2/n <= k (slack 1e-6 (1 + k)) plus the two
/// integrated bounds; integral_slack is relative.
AdmissibilityReport admissibility_check(const ObservableFields& f, double lambda0, double integral_slack = 1e-4);

/// CSV with columns x,n,u,k,e (d = 1) or x,y,n,u_x,u_y,k,e (d = 2).
void write_fields_csv(std::ostream& out, const GridSpec& grid, const ObservableFields& f);

}  // namespace gibbs
