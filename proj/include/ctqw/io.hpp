// File formats shared by the pipeline stages: CSV for all numeric data
// (15 significant digits, byte-stable round trips), 8-bit binary PGM for
// heatmaps, JSON for the sweep manifest. All writers go through a
// temp-file-and-rename so partially written artifacts never appear.
#pragma once

#include "ctqw/calibration.hpp"
#include "ctqw/evolution.hpp"
#include "ctqw/experiment.hpp"
#include "ctqw/reconstruction.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ctqw {

std::string format_number(double value);  // %.15g

void atomic_write_text(const std::filesystem::path& path, const std::string& content);
void atomic_write_binary(const std::filesystem::path& path, const std::string& content);

// Evolution map: header "xi,0,1,...,n-1", one row per grid point.
void write_map_csv(const std::filesystem::path& path, const EvolutionMap& map);
EvolutionMap read_map_csv(const std::filesystem::path& path);

// Heatmap: binary PGM, one raster row per xi step, brightness scaled to
// the map-wide maximum intensity.
void write_map_pgm(const std::filesystem::path& path, const EvolutionMap& map);

// Snapshots: header "strain,wavelength_nm,p_bar,p_cross,0,...,n-1".
void write_snapshots_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snapshots);
std::vector<Snapshot> read_snapshots_csv(const std::filesystem::path& path);

// Calibration results: header "strain,xi,branch,residual".
void write_calibration_csv(const std::filesystem::path& path, const std::vector<double>& strains,
                           const std::vector<CalibratedXi>& calibrated);
std::vector<CalibratedXi> read_calibration_csv(const std::filesystem::path& path);

// Bare reference readings: header "strain,p_bar,p_cross".
struct ReadingRow {
    double strain = 0.0;
    ReferenceReading reading;
};
std::vector<ReadingRow> read_readings_csv(const std::filesystem::path& path);

// Fidelity curve: header "xi,fidelity".
void write_fidelity_csv(const std::filesystem::path& path, const FidelityCurve& curve);
FidelityCurve read_fidelity_csv(const std::filesystem::path& path);

// Sweep manifest: device, plan and noise settings plus the master seed.
void write_manifest_json(const std::filesystem::path& path, const Device& device, const SweepPlan& plan,
                         const NoiseModel& noise);

}  // namespace ctqw
