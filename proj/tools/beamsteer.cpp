// SPDX-License-Identifier: Apache-2.0
//
// beamsteer: beam-steering MIMO WiFi backscatter simulator
// Copyright (C) 2026 The beamsteer authors
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

// beamsteer command-line experiment runner.

#include "CLI11.hpp"

#include "beamsteer/calibration.hpp"
#include "beamsteer/config.hpp"
#include "beamsteer/errors.hpp"
#include "beamsteer/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace beamsteer;

namespace {

constexpr const char* kConfigDirEnv = "BEAMSTEER_CONFIG_DIR";

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

class CheckList {
  public:
    void add(std::string name, bool pass, std::string detail) {
        checks_.push_back({std::move(name), pass, std::move(detail)});
    }

    // Prints every check; returns the process exit code.
    int report() const {
        int failed = 0;
        for (const auto& c : checks_) {
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
            failed += !c.pass;
        }
        return failed == 0 ? 0 : 1;
    }

  private:
    std::vector<Check> checks_;
};

ExperimentConfig resolve_config(const CommonArgs& args) {
    ExperimentConfig cfg = default_config();
    if (!args.config_path.empty()) {
        cfg = load_config(args.config_path);
    } else if (const char* dir = std::getenv(kConfigDirEnv); dir != nullptr && *dir != '\0') {
        const fs::path candidate = fs::path(dir) / "default.ini";
        if (fs::exists(candidate)) {
            cfg = load_config(candidate);
        }
    }
    if (args.seed) {
        cfg.seed = *args.seed;
    }
    if (!args.out_dir.empty()) {
        cfg.out_dir = args.out_dir;
    }
    return cfg;
}

std::vector<std::string> metadata(const ExperimentConfig& cfg, const std::string& command) {
    std::vector<std::string> lines{
        std::string("tool=beamsteer ") + BEAMSTEER_VERSION,
        "command=" + command,
        "seed=" + std::to_string(cfg.seed),
        "config_hash=" + config_hash(cfg),
    };
    for (const auto& l : resolved_config_lines(cfg)) {
        lines.push_back("config " + l);
    }
    return lines;
}

std::ofstream open_output(const ExperimentConfig& cfg, const std::string& name) {
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir.string() +
                                 "': " + ec.message());
    }
    const fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    std::cout << "wrote " << path.string() << '\n';
    return out;
}

void finish(std::ofstream& out, const std::string& name) {
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for '" + name + "'");
    }
}

std::string num(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

int cmd_beampattern(const ExperimentConfig& cfg) {
    const auto& bp = cfg.beampattern;
    const double delta = deg_to_rad(bp.delta_deg);
    const double theta_in = deg_to_rad(bp.theta_in_deg);
    TagConfig tag = cfg.tag;
    tag.phase_step = delta;
    const BeamPattern pattern = beam_pattern(tag, theta_in, bp.num_points);

    auto out = open_output(cfg, "beampattern.csv");
    for (const auto& line : metadata(cfg, "beampattern")) {
        out << "# " << line << '\n';
    }
    out << "theta_deg,power_db\n";
    out.precision(10);
    for (const auto& s : pattern.samples) {
        out << rad_to_deg(s.theta) << ',' << s.power_db << '\n';
    }
    finish(out, "beampattern.csv");

    const SteeringRow row = steering_sweep({delta}, cfg.tag, theta_in, bp.num_points).front();
    std::cout << "peak_deg=";
    for (std::size_t i = 0; i < row.peaks_deg.size(); ++i) {
        std::cout << (i ? ";" : "") << row.peaks_deg[i];
    }
    std::cout << " expected_deg=" << row.expected_deg << " beamwidth_3db_deg=" << row.beamwidth_deg
              << '\n';

    const double grid = 180.0 / (bp.num_points - 1);
    CheckList checks;
    checks.add("beampattern.rows", pattern.samples.size() == static_cast<std::size_t>(bp.num_points),
               std::to_string(pattern.samples.size()) + " rows");
    checks.add("beampattern.peak", row.error_deg <= grid + 1e-9,
               "nearest peak " + num(row.error_deg) + " deg from expected, grid " + num(grid));
    return checks.report();
}

int cmd_estimate_cdf(const ExperimentConfig& cfg) {
    const auto& e = cfg.estimation;
    TrialOptions opt;
    opt.num_trials = e.num_trials;
    opt.seed = cfg.seed;
    opt.accuracy_threshold = deg_to_rad(e.accuracy_threshold_deg);
    opt.noise_enabled = e.noise_enabled;

    std::vector<double> angles;
    for (const double a : e.rx_angles_deg) {
        angles.push_back(deg_to_rad(a));
    }
    std::vector<double> distances = e.rx_distances_m;
    std::sort(distances.begin(), distances.end());
    const auto cdfs = estimation_sweep(e.tx_distance_m, deg_to_rad(e.tx_angle_deg), angles,
                                       distances, cfg.tag, cfg.radio, opt);

    auto out = open_output(cfg, "cdf.csv");
    write_cdf_csv(out, cdfs, metadata(cfg, "estimate-cdf"));
    finish(out, "cdf.csv");

    CheckList checks;
    for (std::size_t a = 0; a < angles.size(); ++a) {
        const std::vector<ErrorCdf> row(cdfs.begin() + static_cast<long>(a * distances.size()),
                                        cdfs.begin() + static_cast<long>((a + 1) * distances.size()));
        for (const auto& c : row) {
            std::cout << "theta_deg=" << e.rx_angles_deg[a] << " r_m=" << c.geometry.rx_distance_m
                      << " accurate=" << c.accurate_fraction << " median_rad=" << c.quantile(0.5)
                      << " p90_rad=" << c.quantile(0.9) << " low_snr=" << c.low_snr_trials << '\n';
        }
        const std::string tag = "estimate.theta" + num(e.rx_angles_deg[a]);
        if (e.noise_enabled) {
            checks.add(tag + ".tightening", cdfs_tighten(row),
                       "quantiles non-increasing as distance shrinks");
        } else {
            double worst = 0.0;
            for (const auto& c : row) {
                worst = std::max(worst, c.sorted_errors.empty() ? 0.0 : c.sorted_errors.back());
            }
            checks.add(tag + ".noiseless", worst < 1e-6, "max error " + num(worst) + " rad");
        }
    }
    for (std::size_t i = 0; i < cdfs.size(); ++i) {
        const auto& g = cdfs[i].geometry;
        if (std::abs(g.rx_distance_m - e.check_distance_m) < 1e-9 &&
            std::abs(rad_to_deg(g.rx_angle) - e.check_angle_deg) < 1e-9) {
            checks.add("estimate.accuracy", cdfs[i].accurate_fraction >= e.min_accurate_fraction,
                       num(cdfs[i].accurate_fraction) + " accurate at r=" + num(g.rx_distance_m) +
                           " m, need " + num(e.min_accurate_fraction));
        }
    }
    return checks.report();
}

int cmd_range_map(const ExperimentConfig& cfg) {
    const auto& r = cfg.range;
    const LinkBudgetCalibration cal = cfg.link_budget();
    const RangeExperiment ex = range_experiment(cal, cfg.tag.num_antennas, r.d_max_m, r.grid_step_m);
    const auto meta = metadata(cfg, "range-map");
    for (const auto& v : ex.variants) {
        const std::string name = "region_" + v.variant.name() + ".csv";
        auto out = open_output(cfg, name);
        write_region_csv(out, v.region, meta);
        finish(out, name);
    }

    const double expected[] = {r.expected_single_m, r.expected_retro_m, r.expected_beam_m};
    CheckList checks;
    for (std::size_t i = 0; i < ex.variants.size(); ++i) {
        const double got = ex.variants[i].region.max_symmetric_range_m;
        checks.add("range." + ex.variants[i].variant.name(),
                   std::abs(got - expected[i]) <= r.tolerance_m + 1e-9,
                   "max symmetric range " + num(got) + " m, expected " + num(expected[i]) +
                       " +- " + num(r.tolerance_m));
    }
    checks.add("range.nesting", ex.nested, "single-antenna region inside beam-steering region");
    checks.add("range.symmetry", ex.symmetric, "feasible(d1, d2) == feasible(d2, d1)");
    checks.add("range.monotone", ex.monotone, "shorter hops stay feasible");
    checks.add("range.retro_diagonal", ex.retro_diagonal_only,
               "retro-reflective links only with co-located Tx and Rx");
    return checks.report();
}

int cmd_protocol_sim(const ExperimentConfig& cfg) {
    const auto& p = cfg.protocol;
    SessionOptions session;
    session.timing = {p.slot_s, p.response_window_slots};
    session.loss_probability = p.loss_probability;
    session.data_packets = p.data_packets;
    session.seed = cfg.seed;
    session.policy = p.policy == "exhaustive" ? SelectionPolicy::Exhaustive : SelectionPolicy::Ratio;

    std::vector<AccessPoint> aps;
    for (std::size_t i = 0; i < p.mesh_aps.size(); ++i) {
        aps.push_back({static_cast<int>(i), p.mesh_aps[i]});
    }
    const auto meta = metadata(cfg, "protocol-sim");
    CheckList checks;
    try {
        const MeshRun mesh = mesh_run(aps, 1, cfg.tag, cfg.radio, session);
        auto t = open_output(cfg, "transcript.csv");
        for (const auto& line : meta) {
            t << "# " << line << '\n';
        }
        write_transcript(t, mesh.transcript);
        finish(t, "transcript.csv");
        auto l = open_output(cfg, "lut.csv");
        write_lut_csv(l, mesh.tag, meta);
        finish(l, "lut.csv");
        checks.add("protocol.mesh", mesh.tag.lut.size() == aps.size() * (aps.size() - 1),
                   std::to_string(mesh.tag.lut.size()) + " LUT entries for " +
                       std::to_string(aps.size()) + " APs");
    } catch (const TimeoutError& e) {
        checks.add("protocol.mesh", false, std::string("session timed out: ") + e.what());
    }

    ProtocolBatchOptions batch;
    batch.num_sessions = p.num_sessions;
    batch.seed = cfg.seed;
    batch.min_angle = deg_to_rad(p.min_angle_deg);
    batch.max_angle = deg_to_rad(p.max_angle_deg);
    batch.min_distance_m = p.min_distance_m;
    batch.max_distance_m = p.max_distance_m;
    batch.session = session;
    batch.determinism_sessions = std::min(p.num_sessions, 100);
    const ProtocolBatchStats s = protocol_batch(cfg.tag, cfg.radio, batch);

    const int k = cfg.tag.quantization_levels;
    std::cout << "sessions=" << s.sessions << " unique_optimum=" << s.unique_optimum
              << " ratio_vs_exhaustive_agreement="
              << (s.sessions ? double(s.ratio_agrees_with_exhaustive) / s.sessions : 0.0)
              << " ratio_max_commands=" << s.max_ratio_commands
              << " exhaustive_commands=" << s.max_exhaustive_commands
              << " noisy_timeouts=" << s.timeouts << " noisy_low_snr=" << s.low_snr_aborts << '\n';

    if (p.policy != "ratio") {
        checks.add("protocol.exhaustive_lut", s.exhaustive_matches == s.unique_optimum,
                   std::to_string(s.exhaustive_matches) + "/" + std::to_string(s.unique_optimum) +
                       " match the brute-force tap");
        checks.add("protocol.exhaustive_commands",
                   s.min_exhaustive_commands == k + 1 && s.max_exhaustive_commands == k + 1,
                   std::to_string(s.max_exhaustive_commands) + " downlink commands, expected " +
                       std::to_string(k + 1));
    }
    if (p.policy != "exhaustive") {
        checks.add("protocol.ratio_lut", s.ratio_matches == s.unique_optimum,
                   std::to_string(s.ratio_matches) + "/" + std::to_string(s.unique_optimum) +
                       " match the brute-force tap");
        checks.add("protocol.ratio_commands", s.max_ratio_commands <= 5,
                   "at most " + std::to_string(s.max_ratio_commands) + " downlink commands");
    }
    checks.add("protocol.determinism", s.determinism_mismatches == 0,
               std::to_string(s.determinism_checked - s.determinism_mismatches) + "/" +
                   std::to_string(s.determinism_checked) + " repeated sessions identical");
    return checks.report();
}

int cmd_coverage(const ExperimentConfig& cfg) {
    const auto& c = cfg.coverage;
    const LinkBudgetCalibration cal = cfg.link_budget();
    const TagVariant variant = cal.variant(parse_tag_kind(c.variant), cfg.tag.num_antennas);
    const CoverageExperiment ex = coverage_experiment(c.floor_width_m, c.floor_height_m, c.aps,
                                                      variant, cal.radio, c.cell_m);
    auto out = open_output(cfg, "coverage.csv");
    write_coverage_csv(out, ex.full, metadata(cfg, "coverage"));
    finish(out, "coverage.csv");

    std::cout << "covered_fraction=" << ex.full.covered_fraction << " cells=" << ex.full.cells.size()
              << '\n';
    for (std::size_t i = 0; i < ex.drop_one_fractions.size(); ++i) {
        std::cout << "without_ap_" << i << "=" << ex.drop_one_fractions[i] << '\n';
    }
    CheckList checks;
    checks.add("coverage.full", ex.full.covered_fraction == 1.0,
               "covered fraction " + num(ex.full.covered_fraction));
    return checks.report();
}

int cmd_calibrate(const ExperimentConfig& cfg, int trials, std::uint64_t seed, double target) {
    const LinkBudgetCalibration cal = calibrated_link_budget();
    std::cout << "path_loss_exponent=" << cal.radio.path_loss_exponent << '\n'
              << "sensitivity_dbm=" << cal.radio.sensitivity_dbm << '\n'
              << "retro_self_interference_db=" << cal.retro_self_interference_db << '\n';
    const double floor = fit_csi_noise_floor(reference_estimation_geometry(), cfg.tag, cal.radio,
                                             target, trials, seed);
    std::cout << "csi_noise_floor_dbm=" << floor << " (shipped " << kCalibratedCsiNoiseFloorDbm
              << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Beam-steering backscatter tag simulator"};
    app.set_version_flag("--version", std::string(BEAMSTEER_VERSION));
    bool dump_defaults = false;
    app.add_flag("--dump-defaults", dump_defaults, "Print the default configuration and exit");
    app.require_subcommand(0, 1);

    CommonArgs common;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "INI configuration file")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Base seed (overrides run.seed)");
        sub->add_option("--out", common.out_dir, "Output directory (overrides run.out_dir)");
    };

    auto* beampattern = app.add_subcommand("beampattern", "Sampled reflection pattern");
    add_common(beampattern);
    std::optional<double> delta_deg;
    std::optional<double> theta_in_deg;
    beampattern->add_option("--delta-deg", delta_deg, "Progressive phase step in degrees");
    beampattern->add_option("--theta-in-deg", theta_in_deg, "Incidence angle in degrees");

    auto* estimate = app.add_subcommand("estimate-cdf", "Monte-Carlo phase estimation error CDFs");
    add_common(estimate);
    std::optional<int> trials;
    estimate->add_option("--trials", trials, "Trials per geometry")->check(CLI::PositiveNumber);

    auto* range = app.add_subcommand("range-map", "Feasible (d1, d2) regions per tag variant");
    add_common(range);
    auto* protocol = app.add_subcommand("protocol-sim", "Discrete-event session simulation");
    add_common(protocol);
    auto* coverage = app.add_subcommand("coverage", "AP placement coverage raster");
    add_common(coverage);

    auto* calibrate = app.add_subcommand("calibrate", "Recompute the shipped calibration");
    add_common(calibrate);
    int fit_trials = 4000;
    std::uint64_t fit_seed = 2024;
    double fit_target = 0.82;
    calibrate->add_option("--trials", fit_trials, "Trials per bisection step");
    calibrate->add_option("--fit-seed", fit_seed, "Seed for the noise-floor fit");
    calibrate->add_option("--target", fit_target, "Target accurate fraction at the reference");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dump_defaults) {
            std::cout << dump_config(default_config());
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 2;
        }
        ExperimentConfig cfg = resolve_config(common);
        if (delta_deg) {
            cfg.beampattern.delta_deg = *delta_deg;
        }
        if (theta_in_deg) {
            cfg.beampattern.theta_in_deg = *theta_in_deg;
        }
        if (trials) {
            cfg.estimation.num_trials = *trials;
        }

        if (*beampattern) {
            return cmd_beampattern(cfg);
        }
        if (*estimate) {
            return cmd_estimate_cdf(cfg);
        }
        if (*range) {
            return cmd_range_map(cfg);
        }
        if (*protocol) {
            return cmd_protocol_sim(cfg);
        }
        if (*coverage) {
            return cmd_coverage(cfg);
        }
        return cmd_calibrate(cfg, fit_trials, fit_seed, fit_target);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
