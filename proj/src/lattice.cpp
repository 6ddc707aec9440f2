#include "ctqw/lattice.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace ctqw {

WavelengthCouplingModel::WavelengthCouplingModel(std::vector<Entry> table) : table_(std::move(table)) {
    if (table_.empty()) throw std::invalid_argument("WavelengthCouplingModel: table must not be empty");
    std::sort(table_.begin(), table_.end());
    for (std::size_t i = 0; i < table_.size(); ++i) {
        if (!(table_[i].first > 0.0)) throw std::invalid_argument("WavelengthCouplingModel: wavelengths must be > 0");
        if (!(table_[i].second > 0.0)) throw std::invalid_argument("WavelengthCouplingModel: scale factors must be > 0");
        if (i > 0) {
            if (table_[i].first == table_[i - 1].first)
                throw std::invalid_argument("WavelengthCouplingModel: duplicate wavelength entry");
            if (!(table_[i].second > table_[i - 1].second))
                throw std::invalid_argument(
                    "WavelengthCouplingModel: scale factors must increase with wavelength");
        }
    }
}

WavelengthCouplingModel WavelengthCouplingModel::default_table() {
    return WavelengthCouplingModel({{450.0, 0.6578947368421053},
                                    {532.0, 1.0},
                                    {630.0, 2.1052631578947367}});
}

double WavelengthCouplingModel::scale_at(double wavelength_nm) const {
    if (wavelength_nm < table_.front().first || wavelength_nm > table_.back().first) {
        std::ostringstream msg;
        msg << "WavelengthCouplingModel: wavelength " << wavelength_nm << " nm outside table range ["
            << table_.front().first << ", " << table_.back().first << "]";
        throw std::invalid_argument(msg.str());
    }
    auto hi = std::lower_bound(table_.begin(), table_.end(), wavelength_nm,
                               [](const Entry& e, double wl) { return e.first < wl; });
    if (hi->first == wavelength_nm) return hi->second;
    auto lo = hi - 1;
    const double t = (wavelength_nm - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

CouplingMatrix CouplingMatrix::uniform(int n, double gamma_per_mm) {
    if (n < 2) throw std::invalid_argument("uniform_coupling: n must be >= 2");
    if (gamma_per_mm < 0.0) throw std::invalid_argument("uniform_coupling: gamma must be >= 0");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        m(k, k + 1) = gamma_per_mm;
        m(k + 1, k) = gamma_per_mm;
    }
    return CouplingMatrix(std::move(m), gamma_per_mm);
}

CouplingMatrix CouplingMatrix::from_matrix(Eigen::MatrixXd entries) {
    if (entries.rows() != entries.cols() || entries.rows() < 2)
        throw std::invalid_argument("CouplingMatrix: entries must be square with dim >= 2");
    double gamma_ref = 0.0;
    for (Eigen::Index k = 0; k < entries.rows(); ++k) {
        if (entries(k, k) != 0.0) throw std::invalid_argument("CouplingMatrix: diagonal must be zero");
        for (Eigen::Index l = 0; l < k; ++l) {
            if (entries(k, l) != entries(l, k))
                throw std::invalid_argument("CouplingMatrix: entries must be exactly symmetric");
            if (entries(k, l) < 0.0) throw std::invalid_argument("CouplingMatrix: entries must be nonnegative");
            gamma_ref = std::max(gamma_ref, entries(k, l));
        }
    }
    return CouplingMatrix(std::move(entries), gamma_ref);
}

CouplingMatrix uniform_coupling(int n, double gamma_per_mm) {
    return CouplingMatrix::uniform(n, gamma_per_mm);
}

double gamma_from_strain(const StrainCouplingModel& model, double strain) {
    model.validate();
    if (strain < 0.0) throw std::invalid_argument("gamma_from_strain: strain must be >= 0");
    return model.gamma0_per_mm * std::exp(-model.kappa_per_um * model.base_pitch_um * strain);
}

double gamma_at(const ArrayGeometry& geometry, const StrainCouplingModel& strain_model,
                const WavelengthCouplingModel& wl_model, double strain, double wavelength_nm) {
    geometry.validate();
    return gamma_from_strain(strain_model, strain) * wl_model.scale_at(wavelength_nm);
}

double normalized_length(double gamma_per_mm, double z_mm) {
    if (gamma_per_mm < 0.0) throw std::invalid_argument("normalized_length: gamma must be >= 0");
    if (z_mm < 0.0) throw std::invalid_argument("normalized_length: z must be >= 0");
    return 2.0 * gamma_per_mm * z_mm / std::numbers::pi;
}

double z_for_xi(double gamma_per_mm, double xi) {
    if (!(gamma_per_mm > 0.0)) throw std::invalid_argument("z_for_xi: gamma must be > 0");
    if (xi < 0.0) throw std::invalid_argument("z_for_xi: xi must be >= 0");
    return xi * std::numbers::pi / (2.0 * gamma_per_mm);
}

void Device::validate() const {
    geometry.validate();
    strain_model.validate();
    if (!(reference_gamma_scale > 0.0))
        throw std::invalid_argument("Device: reference_gamma_scale must be > 0");
}

namespace {

using nlohmann::json;

double require_number(const json& doc, const std::string& key, const std::string& origin) {
    if (!doc.contains(key)) throw std::invalid_argument(origin + ": missing key '" + key + "'");
    if (!doc[key].is_number()) throw std::invalid_argument(origin + ": key '" + key + "' must be a number");
    return doc[key].get<double>();
}

}  // namespace

Device device_from_json_text(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(origin + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument(origin + ": document must be a JSON object");

    static const std::vector<std::string> known = {
        "n_guides", "pitch_um", "chip_length_mm", "gamma0_per_mm", "kappa_per_um",
        "wavelength_table", "reference_pitch_um", "beta_per_um", "reference_gamma_scale"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument(origin + ": unknown key '" + key + "'");
    }

    Device device;
    if (!doc.contains("n_guides") || !doc["n_guides"].is_number_integer())
        throw std::invalid_argument(origin + ": key 'n_guides' must be an integer");
    device.geometry.n_guides = doc["n_guides"].get<int>();
    device.geometry.pitch_um = require_number(doc, "pitch_um", origin);
    device.geometry.chip_length_mm = require_number(doc, "chip_length_mm", origin);
    device.geometry.reference_pitch_um =
        doc.contains("reference_pitch_um") ? require_number(doc, "reference_pitch_um", origin)
                                           : device.geometry.pitch_um;
    if (doc.contains("beta_per_um")) device.geometry.beta_per_um = require_number(doc, "beta_per_um", origin);

    device.strain_model.gamma0_per_mm = require_number(doc, "gamma0_per_mm", origin);
    device.strain_model.kappa_per_um = require_number(doc, "kappa_per_um", origin);
    device.strain_model.base_pitch_um = device.geometry.pitch_um;

    if (!doc.contains("wavelength_table") || !doc["wavelength_table"].is_array())
        throw std::invalid_argument(origin + ": key 'wavelength_table' must be an array of [nm, scale] pairs");
    std::vector<WavelengthCouplingModel::Entry> table;
    for (const auto& row : doc["wavelength_table"]) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
            throw std::invalid_argument(origin + ": wavelength_table entries must be [nm, scale] pairs");
        table.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    device.wavelength_model = WavelengthCouplingModel(std::move(table));

    if (doc.contains("reference_gamma_scale"))
        device.reference_gamma_scale = require_number(doc, "reference_gamma_scale", origin);

    device.validate();
    return device;
}

Device load_device(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("load_device: cannot open " + json_path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return device_from_json_text(buffer.str(), json_path.string());
}

std::string device_to_json_text(const Device& device) {
    json doc;
    doc["n_guides"] = device.geometry.n_guides;
    doc["pitch_um"] = device.geometry.pitch_um;
    doc["chip_length_mm"] = device.geometry.chip_length_mm;
    doc["reference_pitch_um"] = device.geometry.reference_pitch_um;
    doc["beta_per_um"] = device.geometry.beta_per_um;
    doc["gamma0_per_mm"] = device.strain_model.gamma0_per_mm;
    doc["kappa_per_um"] = device.strain_model.kappa_per_um;
    json table = json::array();
    for (const auto& [nm, scale] : device.wavelength_model.table()) table.push_back({nm, scale});
    doc["wavelength_table"] = std::move(table);
    doc["reference_gamma_scale"] = device.reference_gamma_scale;
    return doc.dump(2) + "\n";
}

}  // namespace ctqw
