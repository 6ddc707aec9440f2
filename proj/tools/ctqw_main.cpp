// Command-line front end for the waveguide-array walk toolkit. Five
// file-based stages: simulate, synth, calibrate, reconstruct, fidelity.
// Each stage reads the previous stage's files and writes its own, so a
// campaign is reproducible and diffable artifact by artifact.
//
// Exit codes: 0 success, 2 flag/config errors, 1 runtime errors.

#include "ctqw/calibration.hpp"
#include "ctqw/evolution.hpp"
#include "ctqw/experiment.hpp"
#include "ctqw/io.hpp"
#include "ctqw/lattice.hpp"
#include "ctqw/reconstruction.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using namespace ctqw;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::string format = "both";
};

void add_common(CLI::App* cmd, CommonOptions& common, bool with_format = true) {
    cmd->add_option("--config", common.config_path, "Device description JSON");
    cmd->add_option("--out", common.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--seed", common.seed, "Master random seed")->capture_default_str();
    if (with_format)
        cmd->add_option("--format", common.format, "Map export format")
            ->check(CLI::IsMember({"csv", "pgm", "both"}))
            ->capture_default_str();
}

Device resolve_device(const CommonOptions& common) {
    if (!common.config_path.empty()) return load_device(common.config_path);
    Device device;
    device.validate();
    return device;
}

void export_map(const EvolutionMap& map, const fs::path& out_dir, const std::string& stem,
                const std::string& format) {
    if (format == "csv" || format == "both") {
        write_map_csv(out_dir / (stem + ".csv"), map);
        std::cout << "wrote " << (out_dir / (stem + ".csv")).string() << "\n";
    }
    if (format == "pgm" || format == "both") {
        write_map_pgm(out_dir / (stem + ".pgm"), map);
        std::cout << "wrote " << (out_dir / (stem + ".pgm")).string() << "\n";
    }
}

bool file_has_header(const fs::path& path, const std::string& prefix) {
    std::ifstream in(path);
    std::string line;
    if (!in || !std::getline(in, line)) return false;
    return line.rfind(prefix, 0) == 0;
}

struct SimulateArgs {
    CommonOptions common;
    int n_guides = 0;  // 0: from device
    double gamma = 0.0;  // rad/mm; 0: from device at (strain, wavelength)
    double z_mm = -1.0;  // <0: chip length
    int steps = 200;
    int input_index = -1;  // <0: center
    double strain = 0.0;
    double wavelength_nm = 532.0;
};

int run_simulate(const SimulateArgs& args) {
    const Device device = resolve_device(args.common);
    const int n = args.n_guides > 0 ? args.n_guides : device.geometry.n_guides;
    const double gamma = args.gamma > 0.0 ? args.gamma : device.gamma(args.strain, args.wavelength_nm);
    const double z_max = args.z_mm >= 0.0 ? args.z_mm : device.geometry.chip_length_mm;
    const int input = args.input_index >= 0 ? args.input_index : (n - 1) / 2;
    if (args.steps < 1) throw std::invalid_argument("simulate: --steps must be >= 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("simulate: gamma must be > 0");

    Eigen::VectorXd xi_grid(args.steps);
    for (int i = 0; i < args.steps; ++i) {
        const double z = args.steps == 1 ? z_max : z_max * i / (args.steps - 1);
        xi_grid(i) = normalized_length(gamma, z);
    }
    if (args.steps > 1 && !(xi_grid(args.steps - 1) > xi_grid(0)))
        throw std::invalid_argument("simulate: --z must be > 0 when --steps > 1");

    const EvolutionMap map = evolution_map(uniform_coupling(n, gamma), xi_grid, input);
    export_map(map, args.common.out_dir, "map", args.common.format);
    std::cout << "simulate: n=" << n << " gamma=" << format_number(gamma) << " rad/mm"
              << " input=" << input << " xi range [" << format_number(xi_grid(0)) << ", "
              << format_number(xi_grid(args.steps - 1)) << "] over " << args.steps << " steps\n";
    return kExitOk;
}

struct SynthArgs {
    CommonOptions common;
    double wavelength_nm = 532.0;
    double strain_max = 0.10;
    int n_strains = 50;
    int input_index = -1;
    NoiseModel noise;
    bool no_noise = false;
};

int run_synth(const SynthArgs& args) {
    const Device device = resolve_device(args.common);
    if (args.n_strains < 1) throw std::invalid_argument("synth: --strains must be >= 1");

    SweepPlan plan;
    plan.wavelength_nm = args.wavelength_nm;
    plan.input_index = args.input_index >= 0 ? args.input_index : device.geometry.center_index();
    plan.strains.resize(args.n_strains);
    for (int i = 0; i < args.n_strains; ++i)
        plan.strains(i) = args.n_strains == 1 ? 0.0 : args.strain_max * i / (args.n_strains - 1);

    NoiseModel noise = args.no_noise ? NoiseModel::off() : args.noise;
    if (args.no_noise) noise.loss_db_per_mm = args.noise.loss_db_per_mm;
    noise.seed = args.common.seed;

    const std::vector<Snapshot> snapshots = synth_sweep(device, plan, noise);
    const fs::path out_dir(args.common.out_dir);
    write_snapshots_csv(out_dir / "snapshots.csv", snapshots);
    write_manifest_json(out_dir / "manifest.json", device, plan, noise);
    std::cout << "wrote " << (out_dir / "snapshots.csv").string() << "\n";
    std::cout << "wrote " << (out_dir / "manifest.json").string() << "\n";
    std::cout << "synth: " << snapshots.size() << " snapshots at " << args.wavelength_nm
              << " nm, strains [0, " << format_number(plan.strains(plan.strains.size() - 1))
              << "], true xi range ["
              << format_number(device.xi(plan.strains(plan.strains.size() - 1), args.wavelength_nm))
              << ", " << format_number(device.xi(0.0, args.wavelength_nm)) << "]\n";
    return kExitOk;
}

struct CalibrateArgs {
    CommonOptions common;
    std::string in_path;
    std::string direction = "decreasing";
    double monotone_tol = 0.1;
    double max_xi = 6.0;
};

int run_calibrate(const CalibrateArgs& args) {
    std::vector<double> strains;
    std::vector<ReferenceReading> readings;
    if (file_has_header(args.in_path, "strain,wavelength_nm,")) {
        for (const Snapshot& s : read_snapshots_csv(args.in_path)) {
            strains.push_back(s.strain);
            readings.push_back(s.reference);
        }
    } else {
        for (const ReadingRow& row : read_readings_csv(args.in_path)) {
            strains.push_back(row.strain);
            readings.push_back(row.reading);
        }
    }

    CalibrateOptions options;
    options.direction =
        args.direction == "decreasing" ? SweepDirection::decreasing : SweepDirection::increasing;
    options.monotone_tol = args.monotone_tol;
    options.max_xi = args.max_xi;
    const std::vector<CalibratedXi> calibrated = calibrate_sweep(readings, options);

    const fs::path out_path = fs::path(args.common.out_dir) / "calibration.csv";
    write_calibration_csv(out_path, strains, calibrated);
    std::cout << "wrote " << out_path.string() << "\n";

    int max_branch = 0;
    for (const CalibratedXi& c : calibrated) max_branch = std::max(max_branch, c.branch);
    std::cout << "calibrate: " << calibrated.size() << " readings, xi ["
              << format_number(std::min(calibrated.front().xi, calibrated.back().xi)) << ", "
              << format_number(std::max(calibrated.front().xi, calibrated.back().xi))
              << "], highest branch " << max_branch << "\n";
    return kExitOk;
}

struct ReconstructArgs {
    CommonOptions common;
    std::string snapshots_path;
    std::string calibration_path;
    int grid_steps = 0;  // 0: keep the observed xi values
};

int run_reconstruct(const ReconstructArgs& args) {
    const std::vector<Snapshot> snapshots = read_snapshots_csv(args.snapshots_path);
    const std::vector<CalibratedXi> calibration = read_calibration_csv(args.calibration_path);
    if (snapshots.size() != calibration.size())
        throw std::runtime_error("reconstruct: snapshot and calibration files disagree on row count");

    std::optional<Eigen::VectorXd> grid;
    if (args.grid_steps > 0) {
        double lo = calibration.front().xi, hi = calibration.front().xi;
        for (const CalibratedXi& c : calibration) {
            lo = std::min(lo, c.xi);
            hi = std::max(hi, c.xi);
        }
        Eigen::VectorXd g(args.grid_steps);
        for (int i = 0; i < args.grid_steps; ++i)
            g(i) = args.grid_steps == 1 ? lo : lo + (hi - lo) * i / (args.grid_steps - 1);
        grid = std::move(g);
    }

    const EvolutionMap map = reconstruct(snapshots, calibration, grid);
    export_map(map, args.common.out_dir, "reconstructed", args.common.format);
    std::cout << "reconstruct: " << map.rows() << " rows x " << map.n_guides() << " guides, xi ["
              << format_number(map.xi_grid(0)) << ", " << format_number(map.xi_grid(map.rows() - 1))
              << "]\n";
    return kExitOk;
}

struct FidelityArgs {
    CommonOptions common;
    std::string expt_path;
    std::string theory_path;
    bool simulate_theory = false;
    int input_index = -1;
};

int run_fidelity(const FidelityArgs& args) {
    const EvolutionMap expt = read_map_csv(args.expt_path);
    EvolutionMap theory;
    if (args.simulate_theory) {
        const int input = args.input_index >= 0 ? args.input_index : (expt.n_guides() - 1) / 2;
        theory = uniform_evolution_map(expt.n_guides(), expt.xi_grid, input);
    } else {
        theory = read_map_csv(args.theory_path);
    }
    const FidelityCurve curve = fidelity_curve(expt, theory);

    const fs::path out_path = fs::path(args.common.out_dir) / "fidelity.csv";
    write_fidelity_csv(out_path, curve);
    std::cout << "wrote " << out_path.string() << "\n";
    std::cout << "fidelity: min " << format_number(curve.values.minCoeff()) << ", mean "
              << format_number(curve.values.mean()) << " over " << curve.values.size() << " rows\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled-waveguide quantum walk simulator and reconstruction pipeline"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Simulate a walk and export the evolution map");
    add_common(simulate, sim.common);
    simulate->add_option("--n", sim.n_guides, "Number of guides (default: device)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--gamma", sim.gamma, "Coupling coefficient in rad/mm (default: device)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--z", sim.z_mm, "Maximum propagation distance in mm (default: chip length)")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--steps", sim.steps, "Number of grid points")->capture_default_str();
    simulate->add_option("--input", sim.input_index, "Injected guide (default: center)");
    simulate->add_option("--strain", sim.strain, "Strain used with --config")->capture_default_str();
    simulate->add_option("--wavelength", sim.wavelength_nm, "Wavelength in nm used with --config")
        ->capture_default_str();

    SynthArgs synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Synthesize a noisy strain-sweep campaign");
    add_common(synth_cmd, synth.common, false);
    synth_cmd->add_option("--wavelength", synth.wavelength_nm, "Wavelength in nm")->capture_default_str();
    synth_cmd->add_option("--strain-max", synth.strain_max, "Largest strain in the sweep")
        ->capture_default_str();
    synth_cmd->add_option("--strains", synth.n_strains, "Number of sweep points")->capture_default_str();
    synth_cmd->add_option("--input", synth.input_index, "Injected guide (default: center)");
    synth_cmd->add_option("--photon-budget", synth.noise.photon_budget, "Expected photons per frame")
        ->capture_default_str();
    synth_cmd->add_option("--scatter", synth.noise.scatter_fraction, "Stray-light fraction")
        ->capture_default_str();
    synth_cmd->add_option("--scatter-sites", synth.noise.scatter_sites,
                          "Stray-light sites as offsets from the central guide")
        ->capture_default_str();
    synth_cmd->add_option("--readout-sigma", synth.noise.readout_sigma, "Additive readout noise scale")
        ->capture_default_str();
    synth_cmd->add_option("--loss-db-per-mm", synth.noise.loss_db_per_mm, "Propagation loss")
        ->capture_default_str();
    synth_cmd->add_flag("--no-noise", synth.no_noise, "Disable counting, scatter and readout noise");

    CalibrateArgs cal;
    CLI::App* calibrate = app.add_subcommand("calibrate", "Recover xi from reference-pair readings");
    add_common(calibrate, cal.common, false);
    calibrate->add_option("--in", cal.in_path, "snapshots.csv or readings CSV (strain,p_bar,p_cross)")
        ->required();
    calibrate->add_option("--direction", cal.direction, "Expected xi trend along the sweep")
        ->check(CLI::IsMember({"decreasing", "increasing"}))
        ->capture_default_str();
    calibrate->add_option("--monotone-tol", cal.monotone_tol, "Allowed slack against the trend")
        ->capture_default_str();
    calibrate->add_option("--max-xi", cal.max_xi, "Largest xi considered when unfolding")
        ->capture_default_str();

    ReconstructArgs rec;
    CLI::App* reconstruct_cmd = app.add_subcommand("reconstruct", "Stack snapshots into an evolution map");
    add_common(reconstruct_cmd, rec.common);
    reconstruct_cmd->add_option("--snapshots", rec.snapshots_path, "snapshots.csv")->required();
    reconstruct_cmd->add_option("--calibration", rec.calibration_path, "calibration.csv")->required();
    reconstruct_cmd->add_option("--grid-steps", rec.grid_steps,
                                "Resample onto a uniform xi grid of this many points");

    FidelityArgs fid;
    CLI::App* fidelity_cmd = app.add_subcommand("fidelity", "Score a map against theory");
    add_common(fidelity_cmd, fid.common, false);
    fidelity_cmd->add_option("--expt", fid.expt_path, "Reconstructed map CSV")->required();
    CLI::Option* theory_opt = fidelity_cmd->add_option("--theory", fid.theory_path, "Theory map CSV");
    fidelity_cmd
        ->add_flag("--simulate-theory", fid.simulate_theory,
                   "Simulate theory on the experimental grid instead of reading a file")
        ->excludes(theory_opt);
    fidelity_cmd->add_option("--input", fid.input_index, "Injected guide for --simulate-theory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim);
        if (synth_cmd->parsed()) return run_synth(synth);
        if (calibrate->parsed()) return run_calibrate(cal);
        if (reconstruct_cmd->parsed()) return run_reconstruct(rec);
        if (fidelity_cmd->parsed()) {
            if (!fid.simulate_theory && fid.theory_path.empty())
                throw std::invalid_argument("fidelity: provide --theory or --simulate-theory");
            return run_fidelity(fid);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
