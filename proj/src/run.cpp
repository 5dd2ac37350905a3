#include "gibbs/run.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <system_error>

#include "CLI11.hpp"
#include "json.hpp"

#include "gibbs/asymptotics.hpp"
#include "gibbs/entropy.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/format.hpp"
#include "gibbs/observables.hpp"
#include "gibbs/solver.hpp"
#include "gibbs/spectrum.hpp"

namespace gibbs {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- parsing

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// CLI11 splits on commas and blanks already; re-split so "1,2" inside one token also works.
std::vector<std::string> tokens(const std::vector<std::string>& inputs)
{
    std::vector<std::string> out;
    for (const auto& in : inputs) {
        std::string cur;
        for (char ch : in) {
            if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_real(const std::string& key, std::string_view s)
{
    s = trim(s);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
        throw InvalidArgument(key + ": not a finite number: '" + std::string(s) + "'");
    return v;
}

long long to_integer(const std::string& key, std::string_view s)
{
    s = trim(s);
    long long v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw InvalidArgument(key + ": not an integer: '" + std::string(s) + "'");
    return v;
}

std::string single(const std::string& key, const std::vector<std::string>& inputs)
{
    const auto t = tokens(inputs);
    if (t.size() != 1) throw InvalidArgument(key + ": expected a single value");
    return t.front();
}

std::vector<double> real_list(const std::string& key, const std::vector<std::string>& inputs)
{
    std::vector<double> out;
    for (const auto& t : tokens(inputs)) out.push_back(to_real(key, t));
    if (out.empty()) throw InvalidArgument(key + ": empty list");
    return out;
}

bool to_bool(const std::string& key, const std::string& s)
{
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw InvalidArgument(key + ": expected true or false");
}

std::string join(const std::vector<double>& xs)
{
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_number(xs[i]);
    return s;
}

std::vector<double> spaced(double lo, double hi, int count, bool log_spacing)
{
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        out.push_back(log_spacing ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
    }
    out.back() = hi;
    return out;
}

void require_increasing(const std::string& key, const std::vector<double>& xs)
{
    if (xs.empty()) throw InvalidArgument(key + ": empty list");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0)) throw InvalidArgument(key + ": values must be positive");
        if (i && !(xs[i] > xs[i - 1])) throw InvalidArgument(key + ": values must increase strictly");
    }
}

// ---------------------------------------------------------------- output

ojson num(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return round_report(v);
}

ojson nums(std::span<const double> xs)
{
    ojson a = ojson::array();
    for (double x : xs) a.push_back(num(x));
    return a;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    return out;
}

void write_summary(const fs::path& dir, std::string_view command, const std::string& hash, std::string_view status,
                   ojson headline)
{
    std::string name(command);
    std::replace(name.begin(), name.end(), '-', '_');
    ojson j;
    j["command"] = std::string(command);
    j["config_hash"] = hash;
    j["status"] = std::string(status);
    j["headline_values"] = std::move(headline);
    auto out = open_output(dir / (name + "_summary.json"));
    out << j.dump(2) << '\n';
}

void write_scan_csv(const fs::path& path, std::string_view xname, const std::vector<ScanRow>& rows)
{
    auto out = open_output(path);
    out << xname << ",value,target,ratio\n";
    for (const auto& r : rows)
        out << format_number(r.x) << ',' << format_number(r.value) << ',' << format_number(r.target) << ','
            << format_number(r.ratio) << '\n';
}

std::string thermo_fields(const ThermoPoint& p)
{
    return format_number(p.T) + ',' + format_number(p.mu) + ',' + format_number(p.energy) + ',' +
           format_number(p.entropy) + ',' + format_number(p.free_energy) + ',' + p.rank.to_string();
}

// ---------------------------------------------------------------- pipeline

struct Context {
    const RunConfig& cfg;
    std::string hash;
    fs::path out;
    std::ostream& log;
    std::optional<EntropyModel> model;
    std::optional<SpectralHamiltonian> H;

    const EntropyModel& m() const { return *model; }
    const SpectralHamiltonian& h() const { return *H; }

    ojson headline() const
    {
        ojson j;
        j["model"] = model->name();
        j["n_bar"] = num(cfg.n_bar);
        j["trusted_cap"] = num(H->trusted_cap());
        j["retained"] = H->count();
        return j;
    }
};

EntropyModel build_model(const RunConfig& cfg)
{
    ModelParams p;
    p.q = cfg.q;
    p.gamma = cfg.gamma;
    EntropyModel m = make_model(cfg.model, cfg.n_bar, p);
    const GrowthReport g = validate_growth(m, 200, cfg.dimension);
    if (!g.accepted) throw InvalidArgument("entropy rejected by the growth validation: " + g.diagnostic);
    return m;
}

SpectralHamiltonian build_spectrum(const RunConfig& cfg, bool vectors)
{
    if (cfg.source == "harmonic_oscillator") {
        std::vector<double> ev(cfg.eigenvalues);
        for (std::size_t j = 0; j < ev.size(); ++j) ev[j] = 2.0 * static_cast<double>(j) + 2.0;
        return SpectralHamiltonian::from_eigenvalues(std::move(ev), 1, 2.0);
    }
    GridSpec grid{cfg.dimension, cfg.half_width, cfg.points};
    PotentialSpec pot{cfg.theta, 1.0};
    SolveOptions opt;
    opt.eigenvectors = vectors;
    return assemble_and_solve(grid, pot, cfg.eigenvalues, opt);
}

ojson grid_block(const RunConfig& cfg)
{
    ojson g;
    g["source"] = cfg.source;
    g["dimension"] = cfg.dimension;
    if (cfg.source == "finite_difference") {
        g["half_width"] = num(cfg.half_width);
        g["points"] = cfg.points;
    }
    g["theta"] = num(cfg.theta);
    return g;
}

int cmd_spectrum(Context& c)
{
    const auto& H = c.h();
    auto out = open_output(c.out / "spectrum.csv");
    write_spectrum_csv(out, H);
    ojson j = c.headline();
    j["lambda_0"] = num(H.eigenvalue(0));
    j["lambda_1"] = num(H.eigenvalue(1));
    j["lambda_max"] = num(H.trusted_cap());
    j["resolution_cap"] = num(H.resolution_cap());
    j["grid"] = grid_block(c.cfg);
    write_summary(c.out, "spectrum", c.hash, "ok", j);
    return kExitOk;
}

int cmd_solve(Context& c)
{
    auto out = open_output(c.out / "solve.csv");
    out << "T,mu_T,E,S,F,rank\n";
    std::vector<double> T, mu, E, S, F;
    ojson ranks = ojson::array();
    for (double t : c.cfg.solve_T) {
        const ThermoPoint p = evaluate(c.m(), c.h(), build_state(c.m(), c.h(), t, c.cfg.n_bar));
        out << thermo_fields(p) << '\n';
        T.push_back(p.T);
        mu.push_back(p.mu);
        E.push_back(p.energy);
        S.push_back(p.entropy);
        F.push_back(p.free_energy);
        ranks.push_back(p.rank.to_string());
    }
    ojson j = c.headline();
    j["critical_temperature"] = num(critical_temperature(c.m(), c.h()));
    j["T"] = nums(T);
    j["mu_T"] = nums(mu);
    j["E"] = nums(E);
    j["S"] = nums(S);
    j["F"] = nums(F);
    j["rank"] = ranks;
    write_summary(c.out, "solve", c.hash, "ok", j);
    return kExitOk;
}

ojson sweep_headline(const Context& c, const SweepReport& rep)
{
    ojson j = c.headline();
    j["critical_temperature"] = num(rep.critical_temperature);
    j["beta_minus"] = rep.beta_minus.to_string();
    j["energy_increasing"] = rep.energy_increasing;
    j["entropy_decreasing"] = rep.entropy_decreasing;
    j["mu_over_T_nondecreasing"] = rep.mu_over_T_nondecreasing;
    j["energy_above_ground"] = rep.energy_above_ground;
    if (rep.beta_minus.is_finite()) {
        j["alpha_increasing"] = rep.alpha_increasing;
        j["alpha_over_T_decreasing"] = rep.alpha_over_T_decreasing;
    }
    return j;
}

std::size_t write_sweep_csv(const fs::path& path, const SweepReport& rep, std::ostream& log)
{
    auto out = open_output(path);
    out << "T,mu_T,E,S,F,rank,status\n";
    std::size_t failed = 0;
    for (const auto& r : rep.rows) {
        if (r.ok) {
            out << thermo_fields(r.point) << ",ok\n";
        } else {
            out << format_number(r.point.T) << ",,,,,,failed\n";
            log << "sweep: T = " << format_number(r.point.T) << ": " << r.error << '\n';
            ++failed;
        }
    }
    return failed;
}

int cmd_sweep(Context& c)
{
    SweepOptions opt;
    opt.eqf = c.cfg.sweep_eqf;
    SweepReport rep = sweep(c.m(), c.h(), c.cfg.n_bar, c.cfg.sweep_T, opt);
    rep.config_hash = c.hash;
    const std::size_t failed = write_sweep_csv(c.out / "sweep.csv", rep, c.log);

    ojson j = sweep_headline(c, rep);
    if (opt.eqf) {
        j["eqf_residuals"] = nums(rep.eqf_residuals);
        double worst = 0.0;
        for (double r : rep.eqf_residuals) worst = std::max(worst, r);
        j["max_eqf_residual"] = num(worst);
    }
    j["failed_rows"] = failed;
    ojson prov;
    prov["config_hash"] = rep.config_hash;
    prov["grid"] = grid_block(c.cfg);
    prov["retained"] = rep.retained;
    prov["trusted_cap"] = num(rep.trusted_cap);
    j["provenance"] = prov;
    write_summary(c.out, "sweep", c.hash, failed ? "solver_failure" : "ok", j);
    return failed ? kExitSolver : kExitOk;
}

constexpr double kEqfTolerance = 1e-5;

int cmd_eqf(Context& c)
{
    const FreeEnergyIdentity id = eqf_identity(c.m(), c.h(), c.cfg.n_bar, c.cfg.eqf_T1, c.cfg.eqf_T2);
    auto out = open_output(c.out / "eqf.csv");
    out << "T1,T2,lhs,rhs,residual\n";
    out << format_number(c.cfg.eqf_T1) << ',' << format_number(c.cfg.eqf_T2) << ',' << format_number(id.lhs) << ','
        << format_number(id.rhs) << ',' << format_number(id.residual) << '\n';
    ojson j = c.headline();
    j["T1"] = num(c.cfg.eqf_T1);
    j["T2"] = num(c.cfg.eqf_T2);
    j["free_energy_difference"] = num(id.lhs);
    j["entropy_integral"] = num(id.rhs);
    j["residual"] = num(id.residual);
    j["tolerance"] = num(kEqfTolerance);
    j["within_tolerance"] = id.residual < kEqfTolerance;
    write_summary(c.out, "eqf", c.hash, "ok", j);
    return kExitOk;
}

int cmd_global_min(Context& c)
{
    const auto& H = c.h();
    const GlobalMinimizer gm = min_entropy_global(c.m(), H, c.cfg.a0, c.cfg.b0, c.cfg.c);
    const ThermoPoint p = evaluate(gm.model, H, gm.state);
    const MixedState base = mixed_state_from_occupations(H, gm.state.occupations);
    const ObservableFields plain = compute_fields(H, base);
    const ObservableFields gauged = compute_fields(H, gauge_transform(base, gm.gauge));
    const double deviation = max_field_deviation(gauged, transformed_fields(plain, gm.gauge));
    const AdmissibilityReport adm = admissibility_check(gauged, H.eigenvalue(0));

    const int d = H.dimension();
    auto out = open_output(c.out / "global_min.csv");
    if (d == 1)
        out << "T,b,int_n,int_u,int_e\n";
    else
        out << "T,b_x,b_y,int_n,int_u_x,int_u_y,int_e\n";
    out << format_number(gm.state.T);
    for (double b : gm.gauge) out << ',' << format_number(b);
    out << ',' << format_number(gauged.int_n);
    for (double u : gauged.int_u) out << ',' << format_number(u);
    out << ',' << format_number(gauged.int_e) << '\n';
    auto fields = open_output(c.out / "fields.csv");
    write_fields_csv(fields, H.grid(), gauged);

    ojson j = c.headline();
    j["a0"] = num(c.cfg.a0);
    j["b0"] = nums(c.cfg.b0);
    j["c"] = num(c.cfg.c);
    j["T"] = num(gm.state.T);
    j["mu_T"] = num(gm.state.mu);
    j["b"] = nums(gm.gauge);
    j["spectral_energy"] = num(p.energy + gm.energy_shift);
    j["int_n"] = num(gauged.int_n);
    j["int_u"] = nums(gauged.int_u);
    j["int_e"] = num(gauged.int_e);
    j["gauge_identity_deviation"] = num(deviation);
    j["admissible"] = adm.all_pass();
    write_summary(c.out, "global-min", c.hash, "ok", j);
    return kExitOk;
}

int cmd_weyl(Context& c)
{
    const auto& H = c.h();
    const double s = c.cfg.weyl_s;
    const auto ratio = weyl_ratio_scan(H, s, c.cfg.weyl_E);
    const auto kap = kappa_ratio_scan(H, s, c.cfg.weyl_E);
    write_scan_csv(c.out / "weyl.csv", "E", ratio);
    write_scan_csv(c.out / "kappa.csv", "E", kap);
    ojson j = c.headline();
    j["s"] = num(s);
    j["weyl_constant"] = num(weyl_constant(s, H.dimension()));
    j["kappa"] = num(kappa(s, H.dimension(), H.theta()));
    j["E_max"] = num(ratio.back().x);
    j["levels_below_E_max"] = counting_function(H, ratio.back().x);
    j["weyl_ratio"] = num(ratio.back().ratio);
    j["kappa_ratio"] = num(kap.back().ratio);
    write_summary(c.out, "weyl", c.hash, "ok", j);
    return kExitOk;
}

int cmd_fit(Context& c)
{
    const auto& H = c.h();
    if (!c.m().beta_minus().is_finite())
        throw InvalidArgument("fit: the scaling exponent applies to entropies with finite beta'(0) only");
    double s = 0.0;
    if (c.cfg.fit_s) {
        s = *c.cfg.fit_s;
    } else {
        if (!c.m().r()) throw InvalidArgument("fit: set [fit] s, the entropy has no Hoelder exponent");
        s = 1.0 / *c.m().r();
    }
    const auto T = spaced(c.cfg.fit_T_min, c.cfg.fit_T_max, c.cfg.fit_count, true);
    SweepReport rep = sweep(c.m(), H, c.cfg.n_bar, T);
    rep.config_hash = c.hash;
    for (const auto& r : rep.rows)
        if (!r.ok) throw SolverFailure("fit: sweep failed at T = " + format_number(r.point.T) + ": " + r.error);
    const ScalingFit fit = fit_scaling_exponent(rep, s, H.dimension(), H.theta());

    std::vector<ScanRow> rows;
    for (const auto& r : rep.rows) {
        if (r.point.T < fit.T_low) continue;
        ScanRow row;
        row.x = r.point.T;
        row.value = r.point.energy;
        row.target = std::exp(fit.intercept + fit.slope * std::log(r.point.T));
        row.ratio = row.value / row.target;
        rows.push_back(row);
    }
    write_scan_csv(c.out / "fit.csv", "T", rows);

    ojson j = sweep_headline(c, rep);
    j["s"] = num(s);
    j["slope"] = num(fit.slope);
    j["intercept"] = num(fit.intercept);
    j["predicted"] = num(fit.predicted);
    j["points"] = fit.points;
    j["T_low"] = num(fit.T_low);
    j["T_high"] = num(fit.T_high);
    write_summary(c.out, "fit", c.hash, "ok", j);
    return kExitOk;
}

// ---------------------------------------------------------------- check

struct CheckRow {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass() const { return value <= threshold; }  // false for NaN
};

std::string at_T(std::string_view name, double T) { return std::string(name) + "@T=" + format_number(T); }

void entropy_checks(const Context& c, std::vector<CheckRow>& rows)
{
    const auto& m = c.m();
    const GrowthReport g = validate_growth(m, 200, c.cfg.dimension);
    rows.push_back({"entropy.growth_rejected", g.accepted ? 0.0 : 1.0, 0.0});

    const double nb = m.n_bar();
    double worst = 0.0;
    for (int i = 1; i < 200; ++i) {
        const double x = nb * i / 200.0;
        if (x >= nb * (1.0 - 1e-6)) continue;
        worst = std::max(worst, std::abs(m.xi(-m.beta_prime(x)) - x) / nb);
    }
    rows.push_back({"entropy.xi_roundtrip", worst, 1e-8});

    const double lo = -m.beta_prime(nb * (1.0 - 1e-3)) - 1.0;
    const double hi = -m.beta_prime(nb * 1e-3) + 1.0;
    double bad = 0.0;
    double prev = m.xi(lo);
    for (int i = 1; i <= 400; ++i) {
        const double v = m.xi(lo + (hi - lo) * i / 400.0);
        if (v > prev + 1e-15 * nb) bad += 1.0;
        prev = v;
    }
    rows.push_back({"entropy.xi_increases", bad, 0.0});
}

void spectrum_checks(const Context& c, std::vector<CheckRow>& rows)
{
    const auto& H = c.h();
    double order = 0.0;
    for (std::size_t j = 1; j < H.count(); ++j)
        if (!(H.eigenvalue(j) >= H.eigenvalue(j - 1))) order += 1.0;
    rows.push_back({"spectrum.ordering_violations", order, 0.0});
    if (!H.has_eigenvectors()) return;

    const double dv = H.cell_volume();
    double residual = 0.0;
    for (std::size_t j = 0; j < H.count(); ++j) {
        const auto v = H.eigenvector(j);
        const auto Hv = H.apply(v);
        double r2 = 0.0;
        for (std::size_t p = 0; p < v.size(); ++p) r2 += std::pow(Hv[p] - H.eigenvalue(j) * v[p], 2);
        residual = std::max(residual, std::sqrt(r2 * dv) / H.eigenvalue(j));
    }
    rows.push_back({"spectrum.eigen_residual", residual, 1e-8});

    const std::size_t n = std::min<std::size_t>(H.count(), 20);
    double ortho = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = H.eigenvector(i);
        for (std::size_t k = i; k < n; ++k) {
            const auto b = H.eigenvector(k);
            double dot = 0.0;
            for (std::size_t p = 0; p < a.size(); ++p) dot += a[p] * b[p];
            ortho = std::max(ortho, std::abs(dot * dv - (i == k ? 1.0 : 0.0)));
        }
    }
    rows.push_back({"spectrum.orthonormality", ortho, 1e-8});
}

void gibbs_checks(const Context& c, std::vector<CheckRow>& rows)
{
    const auto& m = c.m();
    const auto& H = c.h();
    const double nb = c.cfg.n_bar;
    const double Tc = critical_temperature(m, H);
    const double ground = H.eigenvalue(0) * nb;

    for (std::size_t i = 0; i < c.cfg.check_T.size(); ++i) {
        const double T = c.cfg.check_T[i];
        const GibbsState st = build_state(m, H, T, nb);
        const ThermoPoint p = evaluate(m, H, st);

        double trace = 0.0;
        for (double v : st.occupations) trace += v;
        rows.push_back({at_T("gibbs.trace_residual", T), std::abs(trace - nb) / nb, kTraceTolerance});
        rows.push_back({at_T("gibbs.tail_bound", T), st.tail_bound / nb, kTailTolerance});
        double order = 0.0;
        for (std::size_t j = 1; j < st.occupations.size(); ++j)
            if (st.occupations[j] > st.occupations[j - 1]) order += 1.0;
        rows.push_back({at_T("gibbs.occupation_order_violations", T), order, 0.0});
        rows.push_back({at_T("gibbs.energy_below_ground", T), std::max(0.0, ground - p.energy) / ground, 1e-12});

        const auto trials = perturbed_trials(st, static_cast<std::size_t>(c.cfg.trials), c.cfg.seed + i);
        const FreeEnergyReport fe = free_energy_check(m, H, st, trials);
        rows.push_back({at_T("gibbs.optimality_deficit", T), std::max(0.0, -fe.min_gap), kOptimalityTolerance});

        if (T * (1.0 - 1e-4) > Tc) {
            const MuDerivativeReport d = mu_derivative_check(m, H, nb, T);
            rows.push_back({at_T("gibbs.dmu_relative_error", T), d.mu_relative_error, 1e-3});
            rows.push_back({at_T("gibbs.entropy_derivative_residual", T), d.entropy_relative_residual, 1e-3});
        }
    }

    const SweepReport rep = sweep(m, H, nb, c.cfg.check_T);
    double failed = 0.0;
    for (const auto& r : rep.rows) failed += r.ok ? 0.0 : 1.0;
    rows.push_back({"sweep.failed_rows", failed, 0.0});
    rows.push_back({"sweep.energy_not_increasing", rep.energy_increasing ? 0.0 : 1.0, 0.0});
    rows.push_back({"sweep.entropy_not_decreasing", rep.entropy_decreasing ? 0.0 : 1.0, 0.0});
    rows.push_back({"sweep.mu_over_T_decreasing", rep.mu_over_T_nondecreasing ? 0.0 : 1.0, 0.0});
    rows.push_back({"sweep.energy_below_ground", rep.energy_above_ground ? 0.0 : 1.0, 0.0});

    const auto& Ts = c.cfg.check_T;
    for (std::size_t i = 0; i + 1 < Ts.size(); ++i) {
        if (!(Ts[i] > Tc)) continue;
        rows.push_back({"eqf.residual@T=" + format_number(Ts[i]) + ".." + format_number(Ts[i + 1]),
                        eqf_check(m, H, nb, Ts[i], Ts[i + 1]), kEqfTolerance});
    }
}

void field_checks(const Context& c, std::vector<CheckRow>& rows)
{
    const auto& m = c.m();
    const auto& H = c.h();
    if (!H.has_eigenvectors()) return;
    const double nb = c.cfg.n_bar;
    const double lambda0 = H.eigenvalue(0);

    auto violations = [](const AdmissibilityReport& a) {
        return static_cast<double>(a.pointwise_violations) + (a.density_nonnegative ? 0.0 : 1.0) +
               (a.minmax_holds ? 0.0 : 1.0) + (a.current_holds ? 0.0 : 1.0);
    };

    for (double T : c.cfg.check_T) {
        const GibbsState st = build_state(m, H, T, nb);
        const ThermoPoint p = evaluate(m, H, st);
        const ObservableFields f = compute_fields(H, mixed_state_from_occupations(H, st.occupations));
        rows.push_back({at_T("fields.admissibility_violations", T), violations(admissibility_check(f, lambda0)), 0.0});
        rows.push_back({at_T("fields.energy_mismatch", T), std::abs(f.int_e - p.energy) / p.energy, 1e-4});
    }

    const GibbsState st = build_state(m, H, c.cfg.check_T.front(), nb);
    const MixedState base = mixed_state_from_occupations(H, st.occupations);
    std::vector<double> b(c.cfg.b0.begin(), c.cfg.b0.end());
    const ObservableFields direct = compute_fields(H, gauge_transform(base, b));
    const ObservableFields closed = transformed_fields(compute_fields(H, base), b);
    rows.push_back({"fields.gauge_identity_deviation", max_field_deviation(direct, closed), 1e-8});

    double failures = 0.0;
    for (int i = 0; i < c.cfg.mixed_states; ++i) {
        const MixedState ms = random_mixed_state(H, 3, nb, c.cfg.seed + 1000 + static_cast<std::uint64_t>(i));
        if (!admissibility_check(compute_fields(H, ms), lambda0).all_pass()) failures += 1.0;
    }
    rows.push_back({"fields.random_state_failures", failures, 0.0});
}

void asymptotic_checks(const Context& c, std::vector<CheckRow>& rows)
{
    const auto& H = c.h();
    const double E = c.cfg.check_weyl_E;
    const double s = c.cfg.weyl_s;
    const int d = H.dimension();
    const double closed = phase_space_volume(E, s, d, H.theta());
    const double quad = phase_space_volume_quadrature(E, s, d, H.theta());
    rows.push_back({"weyl.phase_space_quadrature", std::abs(closed - quad) / closed, 1e-8});
    const double direct = riesz_mean(H, E, s);
    rows.push_back({"weyl.riesz_from_counting", std::abs(riesz_mean_from_counting(H, E, s) - direct) / direct, 1e-8});
    const std::vector<double> Es{E};
    rows.push_back({"weyl.ratio_deviation", std::abs(weyl_ratio_scan(H, s, Es).front().ratio - 1.0), 0.05});
    rows.push_back({"weyl.kappa_ratio_deviation", std::abs(kappa_ratio_scan(H, s, Es).front().ratio - 1.0), 0.05});

    const double gamma = c.m().gamma();
    const double p = gamma / (1.0 - gamma);
    if (gamma > d / (d + 2.0) && p > H.weyl_exponent()) {
        const PowerSumReport ps = lt_sum_check(H, gamma, d, H.theta());
        rows.push_back({"power_sum.relative_tail", ps.tail_bound / ps.limit, 1e-9});
    }
}

int cmd_check(Context& c)
{
    std::vector<CheckRow> rows;
    entropy_checks(c, rows);
    spectrum_checks(c, rows);
    gibbs_checks(c, rows);
    field_checks(c, rows);
    asymptotic_checks(c, rows);

    auto out = open_output(c.out / "check.csv");
    out << "name,value,threshold,pass\n";
    ojson failed = ojson::array();
    for (const auto& r : rows) {
        out << r.name << ',' << format_number(r.value) << ',' << format_number(r.threshold) << ','
            << (r.pass() ? 1 : 0) << '\n';
        if (!r.pass()) {
            failed.push_back(r.name);
            c.log << "check failed: " << r.name << " = " << format_number(r.value) << " (threshold "
                  << format_number(r.threshold) << ")\n";
        }
    }
    ojson j = c.headline();
    j["checks"] = rows.size();
    j["failures"] = failed.size();
    j["failed"] = failed;
    write_summary(c.out, "check", c.hash, failed.empty() ? "ok" : "violations", j);
    return failed.empty() ? kExitOk : kExitViolations;
}

using Command = int (*)(Context&);

struct CommandInfo {
    Command run;
    bool vectors;
};

const std::map<std::string, CommandInfo, std::less<>>& commands()
{
    static const std::map<std::string, CommandInfo, std::less<>> table{
        {"spectrum", {cmd_spectrum, false}}, {"solve", {cmd_solve, false}},
        {"sweep", {cmd_sweep, false}},       {"eqf", {cmd_eqf, false}},
        {"global-min", {cmd_global_min, true}}, {"weyl", {cmd_weyl, false}},
        {"fit", {cmd_fit, false}},           {"check", {cmd_check, true}},
    };
    return table;
}

}  // namespace

// ---------------------------------------------------------------- config

void RunConfig::validate() const
{
    static const std::vector<std::string> names{"boltzmann", "fermi_dirac", "bose_einstein", "tsallis"};
    if (std::find(names.begin(), names.end(), model) == names.end())
        throw InvalidArgument("model.name: unknown entropy '" + model + "'");
    if (!(n_bar > 0.0)) throw InvalidArgument("model.n_bar must be positive");
    if (source != "finite_difference" && source != "harmonic_oscillator")
        throw InvalidArgument("grid.source must be finite_difference or harmonic_oscillator");
    if (dimension != 1 && dimension != 2) throw InvalidArgument("grid.dim must be 1 or 2");
    if (source == "harmonic_oscillator" && (dimension != 1 || theta != 2.0))
        throw InvalidArgument("grid.source = harmonic_oscillator needs dim = 1 and theta = 2");
    if (!(half_width > 0.0)) throw InvalidArgument("grid.half_width must be positive");
    if (points < 3) throw InvalidArgument("grid.points must be at least 3");
    if (eigenvalues < 2) throw InvalidArgument("grid.eigenvalues must be at least 2");
    if (!(theta > 0.0)) throw InvalidArgument("grid.theta must be positive");

    for (double T : solve_T)
        if (!(T > 0.0)) throw InvalidArgument("solve.T: temperatures must be positive");
    if (solve_T.empty()) throw InvalidArgument("solve.T: empty list");
    require_increasing("sweep.T", sweep_T);
    if (!(eqf_T1 > 0.0) || !(eqf_T2 >= eqf_T1)) throw InvalidArgument("eqf: need 0 < T1 <= T2");

    if (!(a0 > 0.0)) throw InvalidArgument("global-min.a0 must be positive");
    if (static_cast<int>(b0.size()) != dimension) throw InvalidArgument("global-min.b0 needs one value per dimension");

    if (!(weyl_s > 0.0)) throw InvalidArgument("weyl.s must be positive");
    require_increasing("weyl.E", weyl_E);
    if (!(weyl_E.front() > 1.0)) throw InvalidArgument("weyl.E: energies must exceed min V = 1");

    if (fit_s && !(*fit_s > 0.0)) throw InvalidArgument("fit.s must be positive");
    if (!(fit_T_min > 0.0) || !(fit_T_max > fit_T_min)) throw InvalidArgument("fit: need 0 < T_min < T_max");
    if (fit_count < 2) throw InvalidArgument("fit.count must be at least 2");

    if (trials < 1) throw InvalidArgument("check.trials must be at least 1");
    if (mixed_states < 0) throw InvalidArgument("check.mixed_states must be non-negative");
    require_increasing("check.T", check_T);
    if (!(check_weyl_E > 1.0)) throw InvalidArgument("check.weyl_E must exceed min V = 1");
}

RunConfig parse_config(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }

    RunConfig cfg;
    std::optional<double> sweep_min, sweep_max;
    std::optional<int> sweep_count;
    std::string sweep_spacing = "log";
    bool sweep_list = false;

    using Setter = std::function<void(const std::string&, const std::vector<std::string>&)>;
    auto real = [](double& dst) {
        return Setter([&dst](const std::string& k, const std::vector<std::string>& v) { dst = to_real(k, single(k, v)); });
    };
    auto opt_real = [](std::optional<double>& dst) {
        return Setter([&dst](const std::string& k, const std::vector<std::string>& v) { dst = to_real(k, single(k, v)); });
    };
    auto integer = [](int& dst) {
        return Setter([&dst](const std::string& k, const std::vector<std::string>& v) {
            const long long x = to_integer(k, single(k, v));
            if (x < -1'000'000'000LL || x > 1'000'000'000LL) throw InvalidArgument(k + ": out of range");
            dst = static_cast<int>(x);
        });
    };
    auto list = [](std::vector<double>& dst) {
        return Setter([&dst](const std::string& k, const std::vector<std::string>& v) { dst = real_list(k, v); });
    };
    auto text_value = [](std::string& dst) {
        return Setter([&dst](const std::string& k, const std::vector<std::string>& v) { dst = single(k, v); });
    };

    const std::map<std::string, Setter> setters{
        {"model.name", text_value(cfg.model)},
        {"model.n_bar", real(cfg.n_bar)},
        {"model.q", opt_real(cfg.q)},
        {"model.gamma", opt_real(cfg.gamma)},
        {"grid.source", text_value(cfg.source)},
        {"grid.dim", integer(cfg.dimension)},
        {"grid.half_width", real(cfg.half_width)},
        {"grid.points", integer(cfg.points)},
        {"grid.eigenvalues",
         [&cfg](const std::string& k, const std::vector<std::string>& v) {
             const long long x = to_integer(k, single(k, v));
             if (x < 2 || x > 100'000'000LL) throw InvalidArgument(k + ": out of range");
             cfg.eigenvalues = static_cast<std::size_t>(x);
         }},
        {"grid.theta", real(cfg.theta)},
        {"solve.T", list(cfg.solve_T)},
        {"sweep.T",
         [&](const std::string& k, const std::vector<std::string>& v) {
             cfg.sweep_T = real_list(k, v);
             sweep_list = true;
         }},
        {"sweep.T_min", opt_real(sweep_min)},
        {"sweep.T_max", opt_real(sweep_max)},
        {"sweep.count",
         [&](const std::string& k, const std::vector<std::string>& v) {
             const long long x = to_integer(k, single(k, v));
             if (x < 2 || x > 100000) throw InvalidArgument(k + ": must lie in [2, 100000]");
             sweep_count = static_cast<int>(x);
         }},
        {"sweep.spacing", text_value(sweep_spacing)},
        {"sweep.eqf",
         [&cfg](const std::string& k, const std::vector<std::string>& v) { cfg.sweep_eqf = to_bool(k, single(k, v)); }},
        {"eqf.T1", real(cfg.eqf_T1)},
        {"eqf.T2", real(cfg.eqf_T2)},
        {"global-min.a0", real(cfg.a0)},
        {"global-min.b0", list(cfg.b0)},
        {"global-min.c", real(cfg.c)},
        {"weyl.s", real(cfg.weyl_s)},
        {"weyl.E", list(cfg.weyl_E)},
        {"fit.s", opt_real(cfg.fit_s)},
        {"fit.T_min", real(cfg.fit_T_min)},
        {"fit.T_max", real(cfg.fit_T_max)},
        {"fit.count", integer(cfg.fit_count)},
        {"check.seed",
         [&cfg](const std::string& k, const std::vector<std::string>& v) {
             const long long x = to_integer(k, single(k, v));
             if (x < 0) throw InvalidArgument(k + ": must be non-negative");
             cfg.seed = static_cast<std::uint64_t>(x);
         }},
        {"check.trials", integer(cfg.trials)},
        {"check.T", list(cfg.check_T)},
        {"check.mixed_states", integer(cfg.mixed_states)},
        {"check.weyl_E", real(cfg.check_weyl_E)},
    };

    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        const std::string key = item.fullname();
        if (item.parents.empty()) throw InvalidArgument("config: key '" + key + "' outside a section");
        const auto it = setters.find(key);
        if (it == setters.end()) throw InvalidArgument("config: unknown key '" + key + "'");
        it->second(key, item.inputs);
    }

    if (sweep_min || sweep_max || sweep_count) {
        if (sweep_list) throw InvalidArgument("sweep: give either T or T_min/T_max/count, not both");
        if (!sweep_min || !sweep_max || !sweep_count) throw InvalidArgument("sweep: T_min, T_max and count go together");
        if (!(*sweep_min > 0.0) || !(*sweep_max > *sweep_min)) throw InvalidArgument("sweep: need 0 < T_min < T_max");
        if (sweep_spacing != "log" && sweep_spacing != "linear")
            throw InvalidArgument("sweep.spacing must be log or linear");
        cfg.sweep_T = spaced(*sweep_min, *sweep_max, *sweep_count, sweep_spacing == "log");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_config(const RunConfig& c)
{
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("default"); };
    std::map<std::string, std::string> kv{
        {"model.name", c.model},
        {"model.n_bar", format_number(c.n_bar)},
        {"model.q", opt(c.q)},
        {"model.gamma", opt(c.gamma)},
        {"grid.source", c.source},
        {"grid.dim", std::to_string(c.dimension)},
        {"grid.half_width", format_number(c.half_width)},
        {"grid.points", std::to_string(c.points)},
        {"grid.eigenvalues", std::to_string(c.eigenvalues)},
        {"grid.theta", format_number(c.theta)},
        {"solve.T", join(c.solve_T)},
        {"sweep.T", join(c.sweep_T)},
        {"sweep.eqf", c.sweep_eqf ? "true" : "false"},
        {"eqf.T1", format_number(c.eqf_T1)},
        {"eqf.T2", format_number(c.eqf_T2)},
        {"global-min.a0", format_number(c.a0)},
        {"global-min.b0", join(c.b0)},
        {"global-min.c", format_number(c.c)},
        {"weyl.s", format_number(c.weyl_s)},
        {"weyl.E", join(c.weyl_E)},
        {"fit.s", opt(c.fit_s)},
        {"fit.T_min", format_number(c.fit_T_min)},
        {"fit.T_max", format_number(c.fit_T_max)},
        {"fit.count", std::to_string(c.fit_count)},
        {"check.seed", std::to_string(c.seed)},
        {"check.trials", std::to_string(c.trials)},
        {"check.T", join(c.check_T)},
        {"check.mixed_states", std::to_string(c.mixed_states)},
        {"check.weyl_E", format_number(c.check_weyl_E)},
    };
    std::string s;
    for (const auto& [k, v] : kv) s += k + '=' + v + '\n';
    return s;
}

std::string config_hash(const RunConfig& config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------- entry points

int run_command(std::string_view command, const RunConfig& config, const fs::path& out_dir, std::ostream& log)
{
    const auto it = commands().find(command);
    if (it == commands().end()) {
        log << "error: unknown command '" << command << "'\n";
        return kExitConfig;
    }
    Context ctx{config, config_hash(config), out_dir, log, std::nullopt, std::nullopt};
    try {
        config.validate();
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw InvalidArgument("cannot create output directory " + out_dir.string() + ": " + ec.message());
        ctx.model = build_model(config);
        ctx.H = build_spectrum(config, it->second.vectors);
        return it->second.run(ctx);
    } catch (const InvalidArgument& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverFailure& e) {
        log << "solver failure: " << e.what() << '\n';
        ojson j;
        j["diagnostic"] = e.what();
        if (ctx.H) j["trusted_cap"] = num(ctx.H->trusted_cap());
        try {
            write_summary(out_dir, command, ctx.hash, "solver_failure", j);
        } catch (const std::exception&) {
        }
        return kExitSolver;
    } catch (const std::exception& e) {
        log << "internal error: " << e.what() << '\n';
        return kExitSolver;
    }
}

int run_from_file(std::string_view command, const fs::path& config_path, const fs::path& out_dir, std::ostream& log)
{
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const InvalidArgument& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return run_command(command, cfg, out_dir, log);
}

}  // namespace gibbs
