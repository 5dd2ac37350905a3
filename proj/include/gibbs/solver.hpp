/** \file solver.hpp
 *
 *  \brief Generalized Gibbs states xi_T(H + mu) restricted to lambda_j + mu <= -T beta_minus,
 *  chemical-potential solves, temperature sweeps and the global-constraint minimizer.
 *
 *  Occupations live on the eigenbasis of a SpectralHamiltonian; all sums run
 *  over its trusted eigenvalues and every solve certifies the truncated tail.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gibbs/entropy.hpp"
#include "gibbs/extended_real.hpp"
#include "gibbs/spectrum.hpp"

namespace gibbs {

inline constexpr double kTraceTolerance = 1e-9;   ///< |sum nu - n_bar| <= tol * n_bar
inline constexpr double kTailTolerance = 1e-10;   ///< certified truncation <= tol * n_bar
inline constexpr double kOptimalityTolerance = 1e-9;

/// Largest occupied level index, or one of the two conventional extremes.
class CutoffRank {
public:
    enum class Kind { Empty, Finite, Unbounded };

    static CutoffRank empty() { return CutoffRank(Kind::Empty, 0); }
    static CutoffRank finite(std::size_t last) { return CutoffRank(Kind::Finite, last); }
    static CutoffRank unbounded() { return CutoffRank(Kind::Unbounded, 0); }

    Kind kind() const { return kind_; }
    std::size_t last() const { return last_; }
    /// "-1", the index, or "inf".
    std::string to_string() const;

    friend bool operator==(const CutoffRank&, const CutoffRank&) = default;

private:
    CutoffRank(Kind k, std::size_t last) : kind_(k), last_(last) {}
    Kind kind_;
    std::size_t last_;
};

struct GibbsState {
    double T = 0.0;
    double mu = 0.0;
    double n_bar = 0.0;
    std::vector<double> occupations;  ///< nu_j, one per trusted eigenvalue
    CutoffRank cutoff = CutoffRank::empty();
    bool rank_one = false;             ///< below-T_c branch (both beta endpoints finite)
    double tail_bound = 0.0;
};

struct ThermoPoint {
    double T = 0.0;
    double mu = 0.0;
    double energy = 0.0;
    double entropy = 0.0;
    double free_energy = 0.0;
    CutoffRank rank = CutoffRank::empty();
};

/// mu_0(T) = -T beta_plus - lambda_0; -inf when beta_plus is infinite.
ExtendedReal mu_lower_bound(const EntropyModel& model, const SpectralHamiltonian& H, double T);

/// N_T(mu): largest j with lambda_j + mu <= -T beta_minus.
CutoffRank cutoff_rank(const EntropyModel& model, const SpectralHamiltonian& H, double T, double mu);

/// Z_T(mu) over the trusted spectrum.
double partition_function(const EntropyModel& model, const SpectralHamiltonian& H, double T, double mu);

/// Majorant for sum_{j >= K} xi_T(lambda_j + mu) from the xi decay bound and a
/// Weyl-law continuation of the spectrum. Infinite when it cannot be certified.
double truncation_tail_bound(const EntropyModel& model, const SpectralHamiltonian& H, double T, double mu);

/// (lambda_1 - lambda_0) / (beta_plus - beta_minus) if both endpoints are finite, else 0.
double critical_temperature(const EntropyModel& model, const SpectralHamiltonian& H);

/// mu_T with Z_T(mu_T) = n_bar. Below T_c (both endpoints finite) the value is
/// pinned at mu_0(T).
double solve_mu(const EntropyModel& model, const SpectralHamiltonian& H, double T, double n_bar);

GibbsState build_state(const EntropyModel& model, const SpectralHamiltonian& H, double T, double n_bar);

/// sum lambda_j rho_j + T sum beta(rho_j).
double free_energy(const EntropyModel& model, const SpectralHamiltonian& H, double T,
                   std::span<const double> occupations);

ThermoPoint evaluate(const EntropyModel& model, const SpectralHamiltonian& H, const GibbsState& state);

struct FreeEnergyReport {
    double state_free_energy = 0.0;
    double min_gap = 0.0;  ///< min over trials of F(trial) - F(state)
    std::size_t trials = 0;
    bool optimal = true;   ///< every gap >= -kOptimalityTolerance
};

FreeEnergyReport free_energy_check(const EntropyModel& model, const SpectralHamiltonian& H, const GibbsState& state,
                                   const std::vector<std::vector<double>>& trials);

/// Feasible competitors: convex mixtures of the state with random
/// normalized occupations on the first few levels. Deterministic in seed.
std::vector<std::vector<double>> perturbed_trials(const GibbsState& state, std::size_t count, std::uint64_t seed);

struct SweepRow {
    ThermoPoint point;
    bool ok = false;
    std::string error;
};

struct SweepReport {
    std::string model_name;
    double n_bar = 0.0;
    double critical_temperature = 0.0;
    ExtendedReal beta_minus;
    // provenance
    std::string config_hash;  ///< filled in by the report layer
    GridSpec grid;
    std::size_t retained = 0;
    double trusted_cap = 0.0;

    std::vector<SweepRow> rows;  ///< sorted by T

    bool energy_increasing = true;    ///< strict, rows above T_c
    bool entropy_decreasing = true;   ///< strict, rows above T_c
    bool mu_over_T_nondecreasing = true;
    bool energy_above_ground = true;  ///< E >= lambda_0 n_bar on every row
    /// alpha(T) = -T beta_minus - mu_T over the top decade (finite beta_minus only)
    bool alpha_increasing = true;
    bool alpha_over_T_decreasing = true;
    std::vector<double> eqf_residuals;  ///< consecutive rows above T_c, when requested
};

struct SweepOptions {
    bool eqf = false;
};

SweepReport sweep(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar,
                  std::span<const double> T_grid, const SweepOptions& options = {});

struct FreeEnergyIdentity {
    double lhs = 0.0;  ///< F_{T2} - F_{T1}
    double rhs = 0.0;  ///< integral of S over [T1, T2]
    double residual = 0.0;  ///< |lhs - rhs| / max(|lhs|, |rhs|)
    int panels = 0;
};

FreeEnergyIdentity eqf_identity(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar, double T1,
                                double T2);

/// Relative residual of F_{T2} - F_{T1} against integral_{T1}^{T2} S, for T_c < T1 <= T2.
double eqf_check(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar, double T1, double T2);

struct MuDerivativeReport {
    double analytic = 0.0;
    double finite_difference = 0.0;
    double mu_relative_error = 0.0;
    double dE_dT = 0.0;
    double dS_dT = 0.0;
    double entropy_relative_residual = 0.0;  ///< |dS + dE/T| / |dE/T|
};

MuDerivativeReport mu_derivative_check(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar,
                                       double T);

/// T with E(T) = c, for c > lambda_0 n_bar.
double solve_T_for_energy(const EntropyModel& model, const SpectralHamiltonian& H, double n_bar, double c);

struct GlobalMinimizer {
    EntropyModel model;  ///< the entropy on the cap a0
    GibbsState state;    ///< ungauged minimizer of F_T on trace a0
    std::vector<double> gauge;  ///< b = b0 / a0
    double energy_shift = 0.0;  ///< |b0|^2 / a0
};

/// Entropy minimizer under total trace a0, total current b0 and total energy c.
GlobalMinimizer min_entropy_global(const EntropyModel& model, const SpectralHamiltonian& H, double a0,
                                   std::span<const double> b0, double c);

}  // namespace gibbs
