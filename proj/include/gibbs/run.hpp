/** \file run.hpp
 *
 *  \brief Batch front-end: INI configuration, the report commands and their
 *  CSV / JSON outputs.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gibbs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

struct RunConfig {
    // [model]
    std::string model = "boltzmann";
    double n_bar = 1.0;
    std::optional<double> q;
    std::optional<double> gamma;

    // [grid]
    std::string source = "finite_difference";  ///< or harmonic_oscillator (lambda_j = 2j + 2)
    int dimension = 1;
    double half_width = 25.0;
    int points = 9999;
    std::size_t eigenvalues = 150;
    double theta = 2.0;

    // [solve]
    std::vector<double> solve_T{1.0};

    // [sweep]: explicit T list, or T_min/T_max/count with log or linear spacing
    std::vector<double> sweep_T{0.5, 1.0, 2.0, 4.0};
    bool sweep_eqf = true;

    // [eqf]
    double eqf_T1 = 1.0;
    double eqf_T2 = 2.0;

    // [global-min]
    double a0 = 1.0;
    std::vector<double> b0{0.5};
    double c = 3.413953;

    // [weyl]
    double weyl_s = 1.0;
    std::vector<double> weyl_E{15.0, 30.0, 60.0};

    // [fit]; s defaults to 1/r of the entropy
    std::optional<double> fit_s;
    double fit_T_min = 50.0;
    double fit_T_max = 500.0;
    int fit_count = 10;

    // [check]
    std::uint64_t seed = 20240611;
    int trials = 100;
    std::vector<double> check_T{0.5, 1.0, 2.0};
    int mixed_states = 20;
    double check_weyl_E = 60.0;

    /// Structural checks that need no numerics (ranges, list shapes, known names).
    void validate() const;
};

/// Parses INI text. Unknown sections or keys and malformed values throw InvalidArgument.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// One "section.key=value" line per effective setting, sorted.
std::string canonical_config(const RunConfig& config);
/// 16 hex digits of FNV-1a 64 over canonical_config().
std::string config_hash(const RunConfig& config);

/// Runs one command and writes its CSV tables and `<command>_summary.json`
/// into out_dir. Diagnostics go to log. Returns the exit status.
int run_command(std::string_view command, const RunConfig& config, const std::filesystem::path& out_dir,
                std::ostream& log);

/// load_config + run_command with exceptions mapped to exit statuses.
int run_from_file(std::string_view command, const std::filesystem::path& config_path,
                  const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace gibbs
