// SPDX-License-Identifier: Apache-2.0
//
// nfbpd: near-field wideband channel estimation for extremely large arrays
// Copyright (C) 2026 The nfbpd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// nfbpd command line.
//
//   nfbpd simulate --preset fig5 --trials 50 --seed 42 --out results.csv --format csv
//   nfbpd pattern dump --out xi.csv --gamma-out gamma.csv --lambda-out lambda.csv
//   nfbpd dictionary export --out polar.pdic
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include "nfbpd/dictionary_io.hpp"
#include "nfbpd/harness.hpp"
#include "nfbpd/pattern_io.hpp"
#include "nfbpd/results_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace
{

using namespace nfbpd;

constexpr int exit_config_error = 2;
constexpr int exit_numerical_error = 3;

// Geometry flags shared by every subcommand.
struct GeometryOptions
{
    bool paper_scale = false;
    std::optional<int> antennas, subcarriers, angles, rings;
    std::optional<double> carrier, bandwidth, beta;

    void add_to(CLI::App &cmd)
    {
        cmd.add_flag("--paper-scale", paper_scale, "Use the full-size configuration (N = 256, M = 256, ...)");
        cmd.add_option("--antennas", antennas, "Number of antennas N");
        cmd.add_option("--subcarriers", subcarriers, "Number of subcarriers M");
        cmd.add_option("--angles", angles, "Angle samples N_a");
        cmd.add_option("--rings", rings, "Distance rings N_d");
        cmd.add_option("--carrier", carrier, "Carrier frequency [Hz]");
        cmd.add_option("--bandwidth", bandwidth, "Bandwidth [Hz]");
        cmd.add_option("--beta", beta, "Polar grid parameter beta");
    }

    harness::ExperimentConfig base() const
    {
        return paper_scale ? harness::ExperimentConfig::paper_scale() : harness::ExperimentConfig::desk_scale();
    }

    void apply(harness::ExperimentConfig &cfg) const
    {
        if (antennas)
            cfg.num_antennas = *antennas;
        if (subcarriers)
            cfg.num_subcarriers = *subcarriers;
        if (angles)
            cfg.num_angles = *angles;
        if (rings)
            cfg.num_rings = *rings;
        if (carrier)
            cfg.carrier_freq = *carrier;
        if (bandwidth)
            cfg.bandwidth = *bandwidth;
        if (beta)
            cfg.beta = *beta;
    }
};

struct SimulateOptions
{
    GeometryOptions geometry;
    std::string preset;
    std::string axis;
    std::vector<double> values;
    std::optional<int> trials, threads, pilots, rf_chains, paths, detect;
    std::optional<std::uint64_t> seed;
    std::optional<double> snr, r_min, r_max;
    std::string estimators;
    std::string out = "results.csv";
    std::string format = "csv";
    std::string combiner = "rademacher";
    std::string snr_reference = "whitened";
    bool per_trial = false;
    bool no_timing = false;
    bool per_subcarrier_gains = false;
    bool quiet = false;
};

harness::ExperimentConfig build_config(const SimulateOptions &opt)
{
    auto cfg = opt.geometry.base();
    opt.geometry.apply(cfg);
    if (!opt.preset.empty())
        harness::apply_preset(cfg, harness::parse_preset(opt.preset));
    // Explicit flags win over the preset.
    if (opt.geometry.bandwidth)
        cfg.bandwidth = *opt.geometry.bandwidth;
    if (!opt.axis.empty())
        cfg.axis = harness::parse_axis(opt.axis);
    if (!opt.values.empty())
        cfg.axis_values = opt.values;
    if (opt.trials)
        cfg.trials = *opt.trials;
    if (opt.threads)
        cfg.threads = *opt.threads;
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.pilots)
        cfg.pilot_slots = *opt.pilots;
    if (opt.rf_chains)
        cfg.rf_chains = *opt.rf_chains;
    if (opt.paths)
        cfg.num_paths = *opt.paths;
    if (opt.detect)
        cfg.paths_to_detect = *opt.detect;
    if (opt.snr)
        cfg.snr_db = *opt.snr;
    if (opt.r_min)
        cfg.r_min = *opt.r_min;
    if (opt.r_max)
        cfg.r_max = *opt.r_max;
    if (!opt.estimators.empty())
        cfg.estimators = harness::parse_estimator_list(opt.estimators);
    if (opt.combiner == "qpsk")
        cfg.combiner = CombinerKind::qpsk;
    else if (opt.combiner != "rademacher")
        throw ConfigError("unknown combiner '" + opt.combiner + "'");
    if (opt.snr_reference == "antenna")
        cfg.snr_reference = SnrReference::antenna;
    else if (opt.snr_reference != "whitened")
        throw ConfigError("unknown SNR reference '" + opt.snr_reference + "'");
    cfg.per_subcarrier_gains = opt.per_subcarrier_gains;
    cfg.record_walltime = !opt.no_timing;
    if (cfg.axis_values.empty())
        throw ConfigError("no sweep values: pass --preset or --axis with --values");
    cfg.validate();
    return cfg;
}

int run_simulate(const SimulateOptions &opt)
{
    const auto cfg = build_config(opt);
    const auto format = io::parse_format(opt.format);
    const auto result = harness::run_sweep(cfg, [&](int done, int total) {
        if (!opt.quiet)
            std::cerr << "point " << done << "/" << total << " done\n";
    });
    io::emit_results(result.rows, format, opt.out);
    if (opt.per_trial)
        io::emit_per_trial(result.per_trial, opt.out + ".trials.csv");
    if (!opt.quiet)
        io::write_csv(std::cerr, result.rows);
    return 0;
}

struct PatternOptions
{
    GeometryOptions geometry;
    std::string out = "xi.csv";
    std::string gamma_out, lambda_out;
    double gamma_max = 4, gamma_step = 0.1;
    double zeta_max = 8, zeta_step = 0.2;
};

int run_pattern_dump(const PatternOptions &opt)
{
    auto cfg = opt.geometry.base();
    opt.geometry.apply(cfg);
    // Only the geometry matters here; system() and build_grid() validate it.
    const auto sys = cfg.system();
    const auto grid = build_grid(sys, cfg.num_angles, cfg.num_rings, cfg.beta);
    const auto tables = build_pattern_tables(sys, grid);

    const auto write = [](const std::string &path, auto &&body) {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        body(out);
        if (!out)
            throw std::runtime_error("failed to write '" + path + "'");
    };
    write(opt.out, [&](std::ostream &os) {
        io::write_xi_csv(os, io::linear_range(-opt.gamma_max, opt.gamma_max, opt.gamma_step),
                         io::linear_range(-opt.zeta_max, opt.zeta_max, opt.zeta_step));
    });
    if (!opt.gamma_out.empty())
        write(opt.gamma_out, [&](std::ostream &os) { io::write_table_csv(os, tables.angle_map); });
    if (!opt.lambda_out.empty())
        write(opt.lambda_out, [&](std::ostream &os) { io::write_table_csv(os, tables.ring_map); });
    return 0;
}

struct DictionaryOptions
{
    GeometryOptions geometry;
    std::string out = "polar.pdic";
    std::string kind = "polar";
};

int run_dictionary_export(const DictionaryOptions &opt)
{
    auto cfg = opt.geometry.base();
    opt.geometry.apply(cfg);
    // Only the geometry matters here; system() and build_grid() validate it.
    const auto sys = cfg.system();
    const auto grid = build_grid(sys, cfg.num_angles, cfg.num_rings, cfg.beta);
    if (opt.kind == "polar")
        io::write_pdic(opt.out, build_dictionary(sys, grid).atoms);
    else if (opt.kind == "far")
        io::write_pdic(opt.out, far_field_dictionary(sys, grid));
    else
        throw ConfigError("unknown dictionary kind '" + opt.kind + "'");
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Near-field wideband channel estimation simulator"};
    app.set_config("--config", "", "Read options from an INI/TOML file; command-line flags take precedence");
    app.require_subcommand(1);

    SimulateOptions sim;
    auto *simulate = app.add_subcommand("simulate", "Run a Monte Carlo NMSE sweep");
    sim.geometry.add_to(*simulate);
    simulate->add_option("--preset", sim.preset, "fig4 | fig5 | fig6 | fig7")
        ->check(CLI::IsMember({"fig4", "fig5", "fig6", "fig7"}));
    simulate->add_option("--axis", sim.axis, "distance | bandwidth | snr | pilots")
        ->check(CLI::IsMember({"distance", "bandwidth", "snr", "pilots"}));
    simulate->add_option("--values", sim.values, "Sweep values (m, Hz, dB or slots)")->delimiter(',');
    simulate->add_option("--trials", sim.trials, "Monte Carlo trials per point");
    simulate->add_option("--seed", sim.seed, "Base RNG seed");
    simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
    simulate->add_option("--out", sim.out, "Output path");
    simulate->add_option("--format", sim.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--estimators", sim.estimators,
                         "Comma list of ls,angle_omp,angle_somp,bspd,polar_omp,polar_somp,bpd");
    simulate->add_option("--snr", sim.snr, "SNR [dB]");
    simulate->add_option("--pilots", sim.pilots, "Pilot slots P");
    simulate->add_option("--rf-chains", sim.rf_chains, "RF chains N_RF");
    simulate->add_option("--paths", sim.paths, "Channel paths L");
    simulate->add_option("--detect", sim.detect, "Paths to detect L_hat");
    simulate->add_option("--r-min", sim.r_min, "Minimum scatterer distance [m]");
    simulate->add_option("--r-max", sim.r_max, "Maximum scatterer distance [m]");
    simulate->add_option("--combiner", sim.combiner, "rademacher | qpsk");
    simulate->add_option("--snr-reference", sim.snr_reference, "whitened | antenna");
    simulate->add_flag("--per-trial", sim.per_trial, "Also write per-trial records to <out>.trials.csv");
    simulate->add_flag("--no-timing", sim.no_timing, "Write zero wall times so output is byte-reproducible");
    simulate->add_flag("--per-subcarrier-gains", sim.per_subcarrier_gains,
                       "Redraw path gains independently on every subcarrier");
    simulate->add_flag("--quiet", sim.quiet, "Suppress progress output");

    PatternOptions pat;
    auto *pattern = app.add_subcommand("pattern", "Beam split pattern utilities");
    pattern->require_subcommand(1);
    auto *dump = pattern->add_subcommand("dump", "Write the coherence heatmap and drift tables as CSV");
    pat.geometry.add_to(*dump);
    dump->add_option("--out", pat.out, "Coherence heatmap CSV (gamma,zeta,value)");
    dump->add_option("--gamma-out", pat.gamma_out, "Angle drift table CSV");
    dump->add_option("--lambda-out", pat.lambda_out, "Ring drift table CSV");
    dump->add_option("--gamma-max", pat.gamma_max, "Heatmap gamma range [-max, max]");
    dump->add_option("--gamma-step", pat.gamma_step, "Heatmap gamma step");
    dump->add_option("--zeta-max", pat.zeta_max, "Heatmap zeta range [-max, max]");
    dump->add_option("--zeta-step", pat.zeta_step, "Heatmap zeta step");

    DictionaryOptions dic;
    auto *dictionary = app.add_subcommand("dictionary", "Dictionary utilities");
    dictionary->require_subcommand(1);
    auto *exporter = dictionary->add_subcommand("export", "Write a dictionary in PDIC binary format");
    dic.geometry.add_to(*exporter);
    exporter->add_option("--out", dic.out, "Output path");
    exporter->add_option("--kind", dic.kind, "polar | far")->check(CLI::IsMember({"polar", "far"}));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config_error;
    }

    try
    {
        if (*simulate)
            return run_simulate(sim);
        if (*dump)
            return run_pattern_dump(pat);
        if (*exporter)
            return run_dictionary_export(dic);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config_error;
    }
    catch (const NumericalError &e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical_error;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_config_error;
}
