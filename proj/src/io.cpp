#include "ctqw/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ctqw {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void parse_fail(const fs::path& path, std::size_t row, const std::string& what) {
    std::ostringstream msg;
    msg << path.string() << " row " << row << ": " << what;
    throw std::runtime_error(msg.str());
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_number(const fs::path& path, std::size_t row, const std::string& cell) {
    try {
        std::size_t used = 0;
        const double value = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return value;
    } catch (const std::exception&) {
        parse_fail(path, row, "cannot parse '" + cell + "' as a number");
    }
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw std::runtime_error(path.string() + ": file is empty");
    return lines;
}

void expect_header(const fs::path& path, const std::string& got, const std::string& want) {
    if (got != want)
        parse_fail(path, 1, "unexpected header '" + got + "', expected '" + want + "'");
}

std::string map_header(Eigen::Index n_guides) {
    std::string header = "xi";
    for (Eigen::Index k = 0; k < n_guides; ++k) header += "," + std::to_string(k);
    return header;
}

std::string snapshot_header(Eigen::Index n_guides) {
    std::string header = "strain,wavelength_nm,p_bar,p_cross";
    for (Eigen::Index k = 0; k < n_guides; ++k) header += "," + std::to_string(k);
    return header;
}

}  // namespace

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.15g", value);
    return buffer;
}

namespace {

void atomic_write(const fs::path& path, const std::string& content, std::ios::openmode mode) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, mode | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + temp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + temp.string());
    }
    fs::rename(temp, path);
}

}  // namespace

void atomic_write_text(const fs::path& path, const std::string& content) {
    atomic_write(path, content, std::ios::out);
}

void atomic_write_binary(const fs::path& path, const std::string& content) {
    atomic_write(path, content, std::ios::out | std::ios::binary);
}

void write_map_csv(const fs::path& path, const EvolutionMap& map) {
    std::string out = map_header(map.n_guides()) + "\n";
    for (int i = 0; i < map.rows(); ++i) {
        out += format_number(map.xi_grid(i));
        for (int k = 0; k < map.n_guides(); ++k) out += "," + format_number(map.frames(i, k));
        out += "\n";
    }
    atomic_write_text(path, out);
}

EvolutionMap read_map_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    const auto header = split_row(lines[0]);
    if (header.size() < 2 || header[0] != "xi")
        parse_fail(path, 1, "expected header 'xi,0,1,...'");
    const Eigen::Index n_guides = static_cast<Eigen::Index>(header.size()) - 1;
    expect_header(path, lines[0], map_header(n_guides));
    if (lines.size() < 2) parse_fail(path, 2, "no data rows");

    EvolutionMap map;
    map.xi_grid.resize(static_cast<Eigen::Index>(lines.size()) - 1);
    map.frames.resize(static_cast<Eigen::Index>(lines.size()) - 1, n_guides);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_row(lines[i]);
        if (static_cast<Eigen::Index>(cells.size()) != n_guides + 1)
            parse_fail(path, i + 1, "expected " + std::to_string(n_guides + 1) + " cells, got " +
                                        std::to_string(cells.size()));
        const Eigen::Index r = static_cast<Eigen::Index>(i) - 1;
        map.xi_grid(r) = parse_number(path, i + 1, cells[0]);
        if (r > 0 && !(map.xi_grid(r) > map.xi_grid(r - 1)))
            parse_fail(path, i + 1, "xi values must be strictly increasing");
        for (Eigen::Index k = 0; k < n_guides; ++k) {
            map.frames(r, k) = parse_number(path, i + 1, cells[static_cast<std::size_t>(k) + 1]);
            if (map.frames(r, k) < 0.0) parse_fail(path, i + 1, "negative intensity");
        }
    }
    return map;
}

void write_map_pgm(const fs::path& path, const EvolutionMap& map) {
    const double peak = map.frames.maxCoeff();
    if (!(peak > 0.0)) throw std::runtime_error("write_map_pgm: map has no positive intensity");
    std::string out = "P5\n" + std::to_string(map.n_guides()) + " " + std::to_string(map.rows()) + "\n255\n";
    out.reserve(out.size() + static_cast<std::size_t>(map.rows()) * map.n_guides());
    for (int i = 0; i < map.rows(); ++i)
        for (int k = 0; k < map.n_guides(); ++k)
            out.push_back(static_cast<char>(
                static_cast<unsigned char>(std::lround(255.0 * map.frames(i, k) / peak))));
    atomic_write_binary(path, out);
}

void write_snapshots_csv(const fs::path& path, const std::vector<Snapshot>& snapshots) {
    if (snapshots.empty()) throw std::invalid_argument("write_snapshots_csv: no snapshots");
    const Eigen::Index n = snapshots.front().raw_intensities.size();
    std::string out = snapshot_header(n) + "\n";
    for (const Snapshot& s : snapshots) {
        if (s.raw_intensities.size() != n)
            throw std::invalid_argument("write_snapshots_csv: snapshots disagree on guide count");
        out += format_number(s.strain);
        out += "," + format_number(s.wavelength_nm);
        out += "," + format_number(s.reference.p_bar);
        out += "," + format_number(s.reference.p_cross);
        for (Eigen::Index k = 0; k < n; ++k) out += "," + format_number(s.raw_intensities(k));
        out += "\n";
    }
    atomic_write_text(path, out);
}

std::vector<Snapshot> read_snapshots_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    const auto header = split_row(lines[0]);
    if (header.size() < 5 || header[0] != "strain")
        parse_fail(path, 1, "expected header 'strain,wavelength_nm,p_bar,p_cross,0,...'");
    const Eigen::Index n_guides = static_cast<Eigen::Index>(header.size()) - 4;
    expect_header(path, lines[0], snapshot_header(n_guides));
    if (lines.size() < 2) parse_fail(path, 2, "no data rows");

    std::vector<Snapshot> snapshots;
    snapshots.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_row(lines[i]);
        if (static_cast<Eigen::Index>(cells.size()) != n_guides + 4)
            parse_fail(path, i + 1, "expected " + std::to_string(n_guides + 4) + " cells, got " +
                                        std::to_string(cells.size()));
        Snapshot s;
        s.strain = parse_number(path, i + 1, cells[0]);
        s.wavelength_nm = parse_number(path, i + 1, cells[1]);
        s.reference.p_bar = parse_number(path, i + 1, cells[2]);
        s.reference.p_cross = parse_number(path, i + 1, cells[3]);
        s.raw_intensities.resize(n_guides);
        for (Eigen::Index k = 0; k < n_guides; ++k)
            s.raw_intensities(k) = parse_number(path, i + 1, cells[static_cast<std::size_t>(k) + 4]);
        snapshots.push_back(std::move(s));
    }
    return snapshots;
}

void write_calibration_csv(const fs::path& path, const std::vector<double>& strains,
                           const std::vector<CalibratedXi>& calibrated) {
    if (strains.size() != calibrated.size())
        throw std::invalid_argument("write_calibration_csv: strain/xi length mismatch");
    std::string out = "strain,xi,branch,residual\n";
    for (std::size_t i = 0; i < calibrated.size(); ++i) {
        out += format_number(strains[i]);
        out += "," + format_number(calibrated[i].xi);
        out += "," + std::to_string(calibrated[i].branch);
        out += "," + format_number(calibrated[i].residual);
        out += "\n";
    }
    atomic_write_text(path, out);
}

std::vector<CalibratedXi> read_calibration_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    expect_header(path, lines[0], "strain,xi,branch,residual");
    std::vector<CalibratedXi> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_row(lines[i]);
        if (cells.size() != 4) parse_fail(path, i + 1, "expected 4 cells");
        CalibratedXi c;
        c.xi = parse_number(path, i + 1, cells[1]);
        c.branch = static_cast<int>(parse_number(path, i + 1, cells[2]));
        c.residual = parse_number(path, i + 1, cells[3]);
        out.push_back(c);
    }
    if (out.empty()) parse_fail(path, 2, "no data rows");
    return out;
}

std::vector<ReadingRow> read_readings_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    expect_header(path, lines[0], "strain,p_bar,p_cross");
    std::vector<ReadingRow> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_row(lines[i]);
        if (cells.size() != 3) parse_fail(path, i + 1, "expected 3 cells");
        ReadingRow row;
        row.strain = parse_number(path, i + 1, cells[0]);
        row.reading.p_bar = parse_number(path, i + 1, cells[1]);
        row.reading.p_cross = parse_number(path, i + 1, cells[2]);
        out.push_back(row);
    }
    if (out.empty()) parse_fail(path, 2, "no data rows");
    return out;
}

void write_fidelity_csv(const fs::path& path, const FidelityCurve& curve) {
    std::string out = "xi,fidelity\n";
    for (Eigen::Index i = 0; i < curve.xi_grid.size(); ++i)
        out += format_number(curve.xi_grid(i)) + "," + format_number(curve.values(i)) + "\n";
    atomic_write_text(path, out);
}

FidelityCurve read_fidelity_csv(const fs::path& path) {
    const auto lines = read_lines(path);
    expect_header(path, lines[0], "xi,fidelity");
    FidelityCurve curve;
    curve.xi_grid.resize(static_cast<Eigen::Index>(lines.size()) - 1);
    curve.values.resize(curve.xi_grid.size());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_row(lines[i]);
        if (cells.size() != 2) parse_fail(path, i + 1, "expected 2 cells");
        curve.xi_grid(static_cast<Eigen::Index>(i) - 1) = parse_number(path, i + 1, cells[0]);
        curve.values(static_cast<Eigen::Index>(i) - 1) = parse_number(path, i + 1, cells[1]);
    }
    return curve;
}

void write_manifest_json(const fs::path& path, const Device& device, const SweepPlan& plan,
                         const NoiseModel& noise) {
    nlohmann::json doc;
    doc["device"] = nlohmann::json::parse(device_to_json_text(device));
    doc["plan"]["strains"] = std::vector<double>(plan.strains.data(), plan.strains.data() + plan.strains.size());
    doc["plan"]["wavelength_nm"] = plan.wavelength_nm;
    doc["plan"]["input_index"] = plan.input_index;
    doc["noise"]["photon_budget"] =
        noise.counting_enabled() ? nlohmann::json(noise.photon_budget) : nlohmann::json("off");
    doc["noise"]["scatter_fraction"] = noise.scatter_fraction;
    doc["noise"]["scatter_sites"] = noise.scatter_sites;
    doc["noise"]["readout_sigma"] = noise.readout_sigma;
    doc["noise"]["loss_db_per_mm"] = noise.loss_db_per_mm;
    doc["noise"]["seed"] = noise.seed;
    atomic_write_text(path, doc.dump(2) + "\n");
}

}  // namespace ctqw
