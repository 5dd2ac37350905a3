#include "gibbs/gibbs.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <new>
#include <string>
#include <vector>

#include "gibbs/asymptotics.hpp"
#include "gibbs/entropy.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/observables.hpp"
#include "gibbs/run.hpp"
#include "gibbs/solver.hpp"
#include "gibbs/spectrum.hpp"

struct gibbs_model {
    gibbs::EntropyModel impl;
};

struct gibbs_spectrum {
    gibbs::SpectralHamiltonian impl;
};

struct gibbs_state {
    gibbs::GibbsState impl;
    gibbs::ThermoPoint thermo;
};

namespace {

thread_local std::string last_error;

gibbs_status fail(gibbs_status code, const char* what)
{
    last_error = what;
    return code;
}

// Runs fn and maps library exceptions onto status codes.
template <class Fn>
gibbs_status guarded(Fn&& fn)
{
    try {
        fn();
        return GIBBS_OK;
    } catch (const gibbs::OutOfRange& e) {
        return fail(GIBBS_ERR_OUT_OF_RANGE, e.what());
    } catch (const gibbs::InvalidArgument& e) {
        return fail(GIBBS_ERR_INVALID_ARGUMENT, e.what());
    } catch (const gibbs::SolverFailure& e) {
        return fail(GIBBS_ERR_SOLVER, e.what());
    } catch (const std::bad_alloc&) {
        return fail(GIBBS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GIBBS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(GIBBS_ERR_INTERNAL, "unknown error");
    }
}

void require(const void* p, const char* what)
{
    if (!p) throw gibbs::InvalidArgument(std::string(what) + " must not be NULL");
}

gibbs::ThermoPoint thermo_of(const gibbs::EntropyModel& m, const gibbs::SpectralHamiltonian& H,
                             const gibbs::GibbsState& st)
{
    return gibbs::evaluate(m, H, st);
}

}  // namespace

extern "C" {

const char* gibbs_version(void) { return "1.0.0"; }

const char* gibbs_last_error(void) { return last_error.c_str(); }

gibbs_status gibbs_model_create(const char* name, double n_bar, double q, double gamma, gibbs_model** out)
{
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        gibbs::ModelParams p;
        if (!std::isnan(q)) p.q = q;
        if (!std::isnan(gamma)) p.gamma = gamma;
        *out = new gibbs_model{gibbs::make_model(name, n_bar, p)};
    });
}

void gibbs_model_free(gibbs_model* model) { delete model; }

gibbs_status gibbs_model_with_n_bar(const gibbs_model* model, double n_bar, gibbs_model** out)
{
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = new gibbs_model{model->impl.with_n_bar(n_bar)};
    });
}

gibbs_status gibbs_model_name(const gibbs_model* model, char* buffer, size_t capacity)
{
    return guarded([&] {
        require(model, "model");
        require(buffer, "buffer");
        const std::string name = model->impl.name();
        if (capacity < name.size() + 1) throw gibbs::InvalidArgument("buffer too small for the model name");
        std::memcpy(buffer, name.c_str(), name.size() + 1);
    });
}

gibbs_status gibbs_model_beta(const gibbs_model* model, double x, double* out)
{
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = model->impl.beta(x);
    });
}

gibbs_status gibbs_model_xi(const gibbs_model* model, double t, double* out)
{
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = model->impl.xi(t);
    });
}

gibbs_status gibbs_model_xi_T(const gibbs_model* model, double T, double x, double* out)
{
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = gibbs::xi_T(model->impl, T, x);
    });
}

gibbs_status gibbs_model_endpoints(const gibbs_model* model, double* beta_minus, double* beta_plus)
{
    return guarded([&] {
        require(model, "model");
        if (beta_minus) *beta_minus = model->impl.beta_minus().to_double();
        if (beta_plus) *beta_plus = model->impl.beta_plus().to_double();
    });
}

gibbs_status gibbs_model_validate_growth(const gibbs_model* model, int samples, int dimension, int* accepted)
{
    return guarded([&] {
        require(model, "model");
        require(accepted, "accepted");
        const gibbs::GrowthReport rep = gibbs::validate_growth(model->impl, samples, dimension);
        *accepted = rep.accepted ? 1 : 0;
        if (!rep.accepted) last_error = rep.diagnostic;  // readable even though the call succeeded
    });
}

gibbs_status gibbs_spectrum_solve(int dimension, double half_width, int points, double theta, size_t K,
                                  int eigenvectors, gibbs_spectrum** out)
{
    return guarded([&] {
        require(out, "out");
        gibbs::SolveOptions opt;
        opt.eigenvectors = eigenvectors != 0;
        *out = new gibbs_spectrum{gibbs::assemble_and_solve(gibbs::GridSpec{dimension, half_width, points},
                                                            gibbs::PotentialSpec{theta, 1.0}, K, opt)};
    });
}

gibbs_status gibbs_spectrum_from_eigenvalues(const double* eigenvalues, size_t count, int dimension, double theta,
                                             gibbs_spectrum** out)
{
    return guarded([&] {
        require(eigenvalues, "eigenvalues");
        require(out, "out");
        std::vector<double> ev(eigenvalues, eigenvalues + count);
        *out = new gibbs_spectrum{gibbs::SpectralHamiltonian::from_eigenvalues(std::move(ev), dimension, theta)};
    });
}

void gibbs_spectrum_free(gibbs_spectrum* spectrum) { delete spectrum; }

gibbs_status gibbs_spectrum_count(const gibbs_spectrum* spectrum, size_t* out)
{
    return guarded([&] {
        require(spectrum, "spectrum");
        require(out, "out");
        *out = spectrum->impl.count();
    });
}

gibbs_status gibbs_spectrum_eigenvalues(const gibbs_spectrum* spectrum, double* out, size_t capacity)
{
    return guarded([&] {
        require(spectrum, "spectrum");
        require(out, "out");
        const auto ev = spectrum->impl.eigenvalues();
        const size_t n = std::min(capacity, ev.size());
        std::copy(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(n), out);
    });
}

gibbs_status gibbs_spectrum_trusted_cap(const gibbs_spectrum* spectrum, double* out)
{
    return guarded([&] {
        require(spectrum, "spectrum");
        require(out, "out");
        *out = spectrum->impl.trusted_cap();
    });
}

gibbs_status gibbs_counting_function(const gibbs_spectrum* spectrum, double E, size_t* out)
{
    return guarded([&] {
        require(spectrum, "spectrum");
        require(out, "out");
        *out = gibbs::counting_function(spectrum->impl, E);
    });
}

gibbs_status gibbs_riesz_mean(const gibbs_spectrum* spectrum, double E, double s, double* out)
{
    return guarded([&] {
        require(spectrum, "spectrum");
        require(out, "out");
        *out = gibbs::riesz_mean(spectrum->impl, E, s);
    });
}

gibbs_status gibbs_partition_function(const gibbs_model* model, const gibbs_spectrum* spectrum, double T, double mu,
                                      double* out)
{
    return guarded([&] {
        require(model, "model");
        require(spectrum, "spectrum");
        require(out, "out");
        *out = gibbs::partition_function(model->impl, spectrum->impl, T, mu);
    });
}

gibbs_status gibbs_solve_mu(const gibbs_model* model, const gibbs_spectrum* spectrum, double T, double n_bar,
                            double* out)
{
    return guarded([&] {
        require(model, "model");
        require(spectrum, "spectrum");
        require(out, "out");
        *out = gibbs::solve_mu(model->impl, spectrum->impl, T, n_bar);
    });
}

gibbs_status gibbs_critical_temperature(const gibbs_model* model, const gibbs_spectrum* spectrum, double* out)
{
    return guarded([&] {
        require(model, "model");
        require(spectrum, "spectrum");
        require(out, "out");
        *out = gibbs::critical_temperature(model->impl, spectrum->impl);
    });
}

gibbs_status gibbs_state_build(const gibbs_model* model, const gibbs_spectrum* spectrum, double T, double n_bar,
                               gibbs_state** out)
{
    return guarded([&] {
        require(model, "model");
        require(spectrum, "spectrum");
        require(out, "out");
        gibbs::GibbsState st = gibbs::build_state(model->impl, spectrum->impl, T, n_bar);
        const gibbs::ThermoPoint p = thermo_of(model->impl, spectrum->impl, st);
        *out = new gibbs_state{std::move(st), p};
    });
}

void gibbs_state_free(gibbs_state* state) { delete state; }

gibbs_status gibbs_state_thermo(const gibbs_state* state, gibbs_thermo* out)
{
    return guarded([&] {
        require(state, "state");
        require(out, "out");
        const auto& p = state->thermo;
        out->T = p.T;
        out->mu = p.mu;
        out->energy = p.energy;
        out->entropy = p.entropy;
        out->free_energy = p.free_energy;
        switch (p.rank.kind()) {
        case gibbs::CutoffRank::Kind::Empty: out->rank = GIBBS_RANK_EMPTY; break;
        case gibbs::CutoffRank::Kind::Unbounded: out->rank = GIBBS_RANK_UNBOUNDED; break;
        default: out->rank = static_cast<int64_t>(p.rank.last());
        }
        out->rank_one = state->impl.rank_one ? 1 : 0;
        out->tail_bound = state->impl.tail_bound;
    });
}

gibbs_status gibbs_state_occupations(const gibbs_state* state, double* out, size_t capacity, size_t* count)
{
    return guarded([&] {
        require(state, "state");
        const auto& occ = state->impl.occupations;
        if (count) *count = occ.size();
        if (out) std::copy(occ.begin(), occ.begin() + static_cast<std::ptrdiff_t>(std::min(capacity, occ.size())), out);
    });
}

gibbs_status gibbs_eqf_check(const gibbs_model* model, const gibbs_spectrum* spectrum, double n_bar, double T1,
                             double T2, double* residual)
{
    return guarded([&] {
        require(model, "model");
        require(spectrum, "spectrum");
        require(residual, "residual");
        *residual = gibbs::eqf_check(model->impl, spectrum->impl, n_bar, T1, T2);
    });
}

gibbs_status gibbs_mu_derivative_check(const gibbs_model* model, const gibbs_spectrum* spectrum, double n_bar,
                                       double T, double* mu_relative_error, double* entropy_relative_residual)
{
    return guarded([&] {
        require(model, "model");
        require(spectrum, "spectrum");
        const auto rep = gibbs::mu_derivative_check(model->impl, spectrum->impl, n_bar, T);
        if (mu_relative_error) *mu_relative_error = rep.mu_relative_error;
        if (entropy_relative_residual) *entropy_relative_residual = rep.entropy_relative_residual;
    });
}

gibbs_status gibbs_min_entropy_global(const gibbs_model* model, const gibbs_spectrum* spectrum, double a0,
                                      const double* b0, size_t dimension, double c, gibbs_state** out, double* gauge)
{
    return guarded([&] {
        require(model, "model");
        require(spectrum, "spectrum");
        require(b0, "b0");
        require(out, "out");
        const std::vector<double> b(b0, b0 + dimension);
        gibbs::GlobalMinimizer gm = gibbs::min_entropy_global(model->impl, spectrum->impl, a0, b, c);
        const gibbs::ThermoPoint p = thermo_of(gm.model, spectrum->impl, gm.state);
        if (gauge) std::copy(gm.gauge.begin(), gm.gauge.end(), gauge);
        *out = new gibbs_state{std::move(gm.state), p};
    });
}

gibbs_status gibbs_state_field_integrals(const gibbs_spectrum* spectrum, const gibbs_state* state, const double* b,
                                         size_t dimension, double* int_n, double* int_u, double* int_e,
                                         int* admissible)
{
    return guarded([&] {
        require(spectrum, "spectrum");
        require(state, "state");
        const auto& H = spectrum->impl;
        gibbs::MixedState ms = gibbs::mixed_state_from_occupations(H, state->impl.occupations);
        if (b) ms = gibbs::gauge_transform(std::move(ms), std::vector<double>(b, b + dimension));
        const gibbs::ObservableFields f = gibbs::compute_fields(H, ms);
        if (int_n) *int_n = f.int_n;
        if (int_u) std::copy(f.int_u.begin(), f.int_u.end(), int_u);
        if (int_e) *int_e = f.int_e;
        if (admissible) *admissible = gibbs::admissibility_check(f, H.eigenvalue(0)).all_pass() ? 1 : 0;
    });
}

gibbs_status gibbs_weyl_constant(double s, int dimension, double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = gibbs::weyl_constant(s, dimension);
    });
}

gibbs_status gibbs_phase_space_volume(double E, double s, int dimension, double theta, double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = gibbs::phase_space_volume(E, s, dimension, theta);
    });
}

gibbs_status gibbs_kappa(double s, int dimension, double theta, double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = gibbs::kappa(s, dimension, theta);
    });
}

gibbs_status gibbs_predicted_scaling_exponent(double s, int dimension, double theta, double* out)
{
    return guarded([&] {
        require(out, "out");
        *out = gibbs::predicted_scaling_exponent(s, dimension, theta);
    });
}

gibbs_status gibbs_run_command(const char* command, const char* config_path, const char* out_dir, int* exit_status)
{
    return guarded([&] {
        require(command, "command");
        require(config_path, "config_path");
        require(exit_status, "exit_status");
        *exit_status = gibbs::run_from_file(command, config_path, out_dir ? out_dir : ".", std::cerr);
    });
}

}  // extern "C"
