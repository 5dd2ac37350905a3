#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gibbs/errors.hpp"
#include "gibbs/run.hpp"

using namespace gibbs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("gibbs_test_run_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json summary(const fs::path& dir, const std::string& name)
{
    return nlohmann::json::parse(slurp(dir / (name + "_summary.json")));
}

std::string first_line(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::string line;
    std::getline(in, line);
    return line;
}

// Closed-form oscillator spectrum keeps these runs fast.
const char* kOscillator = R"(
[model]
name = boltzmann
n_bar = 1
[grid]
source = harmonic_oscillator
eigenvalues = 2000
[solve]
T = 1, 2
)";

// Small grid with eigenvectors, for the field-based commands.
const char* kSmallGrid = R"(
[model]
name = boltzmann
n_bar = 1
[grid]
dim = 1
half_width = 12
points = 1200
eigenvalues = 60
[check]
trials = 20
mixed_states = 5
T = 0.5, 1
weyl_E = 40
)";

}  // namespace

TEST_CASE("config defaults and values")
{
    const RunConfig d = parse_config("");
    CHECK(d.model == "boltzmann");
    CHECK(d.points == 9999);
    CHECK(d.eigenvalues == 150);

    const RunConfig c = parse_config(R"(
# comment
[model]
name = tsallis
n_bar = 0.5
q = 2
[grid]
dim = 2
points = 60
half_width = 6
eigenvalues = 40
theta = 4
[solve]
T = 0.5, 1 2
[sweep]
T_min = 1
T_max = 100
count = 3
[global-min]
b0 = 0.5, -0.25
[sweep]
eqf = false
)");
    CHECK(c.model == "tsallis");
    CHECK(c.n_bar == 0.5);
    REQUIRE(c.q.has_value());
    CHECK(*c.q == 2.0);
    CHECK_FALSE(c.gamma.has_value());
    CHECK(c.dimension == 2);
    CHECK(c.theta == 4.0);
    CHECK(c.solve_T == std::vector<double>{0.5, 1.0, 2.0});
    REQUIRE(c.sweep_T.size() == 3);
    CHECK(c.sweep_T[1] == doctest::Approx(10.0));
    CHECK(c.sweep_T[2] == 100.0);
    CHECK_FALSE(c.sweep_eqf);
    CHECK(c.b0 == std::vector<double>{0.5, -0.25});

    const RunConfig lin = parse_config("[sweep]\nT_min = 1\nT_max = 3\ncount = 5\nspacing = linear\n");
    CHECK(lin.sweep_T == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
}

TEST_CASE("config errors")
{
    CHECK_THROWS_AS(parse_config("[model]\nnmae = boltzmann\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[models]\nname = boltzmann\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("name = boltzmann\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[model]\nname = gaussian\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[model]\nn_bar = one\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[model]\nn_bar = 1, 2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[model]\nn_bar = -1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[grid]\npoints = 2.5\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[grid]\nsource = harmonic_oscillator\ndim = 2\n[global-min]\nb0 = 0, 0\n"),
                    InvalidArgument);
    CHECK_THROWS_AS(parse_config("[sweep]\nT = 1, 0.5\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[sweep]\nT = 1\nT_min = 1\nT_max = 2\ncount = 3\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[sweep]\nT_min = 1\ncount = 3\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[eqf]\nT1 = 2\nT2 = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[grid]\ndim = 2\n"), InvalidArgument);  // b0 still has one component
    CHECK_THROWS_AS(parse_config("[weyl]\nE = 0.5, 2\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[check]\nseed = -3\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[sweep]\neqf = maybe\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[eqf]\nT1 = 1\nT1 = 2\n"), InvalidArgument);  // repeated key
    CHECK_THROWS_AS(load_config("/nonexistent/gibbs.ini"), InvalidArgument);
}

TEST_CASE("config hash follows the effective settings")
{
    const RunConfig a = parse_config("[model]\nname = boltzmann\nn_bar = 1\n[solve]\nT = 1, 2\n");
    const RunConfig b = parse_config("[solve]\nT = 1.0,2.0\n[model]\nn_bar = 1.000\n");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    const RunConfig c = parse_config("[solve]\nT = 1, 2.5\n");
    CHECK(config_hash(a) != config_hash(c));

    // FNV-1a 64 reference values
    const std::string canon = canonical_config(a);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canon) h = (h ^ ch) * 0x100000001b3ULL;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    CHECK(config_hash(a) == buf);
    CHECK(canon.find("model.name=boltzmann\n") != std::string::npos);
}

TEST_CASE("solve reports the oscillator chemical potential")
{
    const fs::path out = scratch("solve");
    std::ostringstream log;
    const RunConfig cfg = parse_config(kOscillator);
    REQUIRE(run_command("solve", cfg, out, log) == kExitOk);
    const auto j = summary(out, "solve");
    CHECK(j.size() == 4);
    CHECK(j["command"] == "solve");
    CHECK(j["status"] == "ok");
    CHECK(j["config_hash"] == config_hash(cfg));
    const double mu = j["headline_values"]["mu_T"][0].get<double>();
    CHECK(mu == doctest::Approx(-2.0 - std::log1p(-std::exp(-2.0))).epsilon(1e-9));
    CHECK(mu == doctest::Approx(-1.854587).epsilon(1e-6));
    CHECK(j["headline_values"]["trusted_cap"].get<double>() == 4000.0);

    CHECK(first_line(out / "solve.csv") == "T,mu_T,E,S,F,rank");
    const std::string csv = slurp(out / "solve.csv");
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("table schemas")
{
    const fs::path out = scratch("schemas");
    std::ostringstream log;
    const RunConfig osc = parse_config(kOscillator);
    REQUIRE(run_command("spectrum", osc, out, log) == kExitOk);
    REQUIRE(run_command("sweep", osc, out, log) == kExitOk);
    REQUIRE(run_command("eqf", osc, out, log) == kExitOk);
    REQUIRE(run_command("weyl", osc, out, log) == kExitOk);
    CHECK(first_line(out / "spectrum.csv") == "j,lambda_j");
    CHECK(first_line(out / "sweep.csv") == "T,mu_T,E,S,F,rank,status");
    CHECK(first_line(out / "eqf.csv") == "T1,T2,lhs,rhs,residual");
    CHECK(first_line(out / "weyl.csv") == "E,value,target,ratio");
    CHECK(first_line(out / "kappa.csv") == "E,value,target,ratio");

    const auto sw = summary(out, "sweep")["headline_values"];
    CHECK(sw["energy_increasing"] == true);
    CHECK(sw["entropy_decreasing"] == true);
    CHECK(sw["provenance"]["config_hash"] == config_hash(osc));
    CHECK(sw["max_eqf_residual"].get<double>() < 1e-9);
    CHECK(summary(out, "eqf")["headline_values"]["within_tolerance"] == true);

    const RunConfig grid = parse_config(kSmallGrid);
    REQUIRE(run_command("global-min", grid, out, log) == kExitOk);
    CHECK(first_line(out / "global_min.csv") == "T,b,int_n,int_u,int_e");
    CHECK(first_line(out / "fields.csv") == "x,n,u,k,e");
    const auto gm = summary(out, "global_min")["headline_values"];
    CHECK(gm["int_u"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(gm["admissible"] == true);
}

TEST_CASE("tsallis fit on the oscillator")
{
    const fs::path out = scratch("fit");
    std::ostringstream log;
    const RunConfig cfg = parse_config(R"(
[model]
name = tsallis
q = 2
[grid]
source = harmonic_oscillator
eigenvalues = 1000
[fit]
T_min = 50
T_max = 500
count = 10
)");
    REQUIRE(run_command("fit", cfg, out, log) == kExitOk);
    const auto j = summary(out, "fit")["headline_values"];
    CHECK(j["predicted"].get<double>() == doctest::Approx(0.5));
    CHECK(j["slope"].get<double>() > 0.45);
    CHECK(j["slope"].get<double>() < 0.55);
    CHECK(first_line(out / "fit.csv") == "T,value,target,ratio");
}

TEST_CASE("exit statuses")
{
    const fs::path out = scratch("exit");
    std::ostringstream log;
    const RunConfig osc = parse_config(kOscillator);
    CHECK(run_command("bogus", osc, out, log) == kExitConfig);

    // infeasible energy target
    const RunConfig bad_c = parse_config(std::string(kSmallGrid) + "[global-min]\nc = 2.1\n");
    std::ostringstream gm_log;
    CHECK(run_command("global-min", bad_c, out, gm_log) == kExitConfig);
    CHECK(gm_log.str().find("infeasible") != std::string::npos);

    // energy scan past the trusted spectrum
    CHECK(run_command("weyl", parse_config(std::string(kOscillator) + "[weyl]\nE = 10, 5000\n"), out, log) ==
          kExitConfig);
    // fit refuses an entropy with infinite beta'(0)
    CHECK(run_command("fit", osc, out, log) == kExitConfig);

    // too few levels to certify the tail at high T
    const RunConfig short_spec = parse_config(R"(
[grid]
source = harmonic_oscillator
eigenvalues = 20
[solve]
T = 40
)");
    std::ostringstream solver_log;
    CHECK(run_command("solve", short_spec, out, solver_log) == kExitSolver);
    CHECK(solver_log.str().find("solver failure") != std::string::npos);
    const auto j = summary(out, "solve");
    CHECK(j["status"] == "solver_failure");
    CHECK(j["headline_values"].contains("trusted_cap"));

    // a genuine violation: the kappa ratio is far from its limit just above lambda_0
    std::ostringstream check_log;
    std::string near_ground = kSmallGrid;
    near_ground.replace(near_ground.find("weyl_E = 40"), 11, "weyl_E = 3");
    CHECK(run_command("check", parse_config(near_ground), out, check_log) == kExitViolations);
    CHECK(summary(out, "check")["status"] == "violations");
    CHECK(check_log.str().find("weyl.kappa_ratio_deviation") != std::string::npos);

    std::ostringstream file_log;
    CHECK(run_from_file("check", "/nonexistent/gibbs.ini", out, file_log) == kExitConfig);
}

TEST_CASE("check passes and is byte-for-byte reproducible")
{
    const RunConfig cfg = parse_config(kSmallGrid);
    const fs::path a = scratch("check_a"), b = scratch("check_b");
    std::ostringstream log;
    REQUIRE(run_command("check", cfg, a, log) == kExitOk);
    REQUIRE(run_command("check", cfg, b, log) == kExitOk);
    CHECK(log.str().empty());
    CHECK(first_line(a / "check.csv") == "name,value,threshold,pass");
    for (const auto& name : {"check.csv", "check_summary.json"}) {
        INFO(name);
        CHECK(slurp(a / name) == slurp(b / name));
    }
    const std::string csv = slurp(a / "check.csv");
    CHECK(csv.find(",0\n") == std::string::npos);
    CHECK(csv.find("fields.gauge_identity_deviation") != std::string::npos);
    CHECK(csv.find("gibbs.optimality_deficit@T=1,") != std::string::npos);
}
