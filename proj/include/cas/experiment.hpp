#pragma once

// Config-driven experiment runner behind the cas_cli executable.

#include "cas/discrete_limits.hpp"
#include "cas/gaussian_cas.hpp"
#include "cas/waveform_opt.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cas::experiment {

enum class Mode
{
    DiscreteCapacity,
    DiscreteRd,
    DiscreteTradeoff,
    TrmOptimize,
    TrmSw,
    SnrSweep,
    Simulate
};

const std::vector<std::string>& mode_names();
std::string mode_name(Mode m);
Mode parse_mode(const std::string& name);  // throws ConfigError

enum class SimWaveform
{
    Isotropic,  // Q = (T P_T / N) I
    Isac,       // optimize_isac
    Sw          // sensing Gram of the best SW split
};

struct ExperimentConfig
{
    Mode mode = Mode::DiscreteCapacity;
    std::uint64_t seed = 1;

    // Exactly one model source applies per mode family.
    std::optional<discrete::FiniteCasModel> finite;
    std::optional<gaussian::TrmModel> trm;
    std::optional<gaussian::RandomModelSpec> generator;  // seed taken from `seed`

    discrete::SolverOptions solver;
    waveform::IsacOptions isac;
    int split_grid = 201;
    double d_s_step = 1e-3;

    // discrete-capacity / discrete-tradeoff
    std::optional<double> d_s;
    std::optional<double> d_c;
    std::optional<double> budget;
    // discrete-rd on an explicit source
    discrete::Vector source;
    discrete::Matrix distortion;
    std::vector<double> d_c_values;

    // trm-optimize / trm-sw use snr_db.front() when given
    std::vector<double> snr_db;
    std::vector<waveform::Scheme> schemes{waveform::Scheme::Isac, waveform::Scheme::Sw};

    // simulate
    std::size_t trials = 100000;
    unsigned workers = 1;
    bool dump_trials = false;
    SimWaveform waveform = SimWaveform::Isotropic;
    std::optional<double> rate_budget;  // default: MI the waveform supports

    std::filesystem::path out_dir = ".";
    bool bits = false;
};

// Parses and validates a JSON config; model paths resolve relative to the
// config file. Throws ConfigError with file and line.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source_name,
                              const std::filesystem::path& base_dir = ".");

struct Overrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::size_t> trials;
    std::optional<int> grid;
    bool bits = false;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

struct RunOutput
{
    std::vector<std::filesystem::path> files;
    std::vector<std::pair<std::string, std::string>> summary;
    bool solver_failure = false;  // some sweep point failed; artifacts still written
};

// Runs the experiment and writes its artifacts; errors propagate.
RunOutput run(const ExperimentConfig& cfg);

// Exit status for an exception: 2 config, 3 solver, 4 I/O, 1 otherwise.
int exit_code_for(const std::exception& e);

// Loads, runs, prints the summary table to `out` and errors to `err`.
// Returns the process exit status.
int run_file(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err);

void print_summary(const RunOutput& r, std::ostream& out);

} // namespace cas::experiment
