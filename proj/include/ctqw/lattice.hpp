// Device geometry and physical coupling models for a 1D coupled-waveguide
// array: maps (geometry, strain, wavelength) to a nearest-neighbour coupling
// matrix and to the normalized propagation coordinate xi = 2*gamma*z/pi.
#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ctqw {

/// Static geometry of the waveguide array chip. The flanking reference
/// pairs are isolated from the main array and share its pitch unless
/// stated otherwise. beta (rad/um) is the common propagation constant of
/// the identical guides; it contributes only a global phase and is kept
/// for documentation and amplitude-level output.
struct ArrayGeometry {
    int n_guides = 51;
    double pitch_um = 17.5;
    double chip_length_mm = 7.0;
    double reference_pitch_um = 17.5;
    double beta_per_um = 16.653;

    void validate() const {
        if (n_guides < 2) throw std::invalid_argument("ArrayGeometry: n_guides must be >= 2");
        if (!(pitch_um > 0.0)) throw std::invalid_argument("ArrayGeometry: pitch_um must be > 0");
        if (!(chip_length_mm > 0.0)) throw std::invalid_argument("ArrayGeometry: chip_length_mm must be > 0");
        if (!(reference_pitch_um > 0.0)) throw std::invalid_argument("ArrayGeometry: reference_pitch_um must be > 0");
    }

    int center_index() const { return (n_guides - 1) / 2; }
};

/// Evanescent coupling vs transverse strain. Stretching the chip scales the
/// pitch uniformly, and the mode-tail overlap decays exponentially with
/// separation, so
///     gamma(strain) = gamma0 * exp(-kappa * base_pitch * strain).
/// Strictly decreasing in strain, gamma0 at zero strain.
struct StrainCouplingModel {
    double gamma0_per_mm = 0.0852718005974372;  // rad/mm at zero strain
    double kappa_per_um = 0.6129353155799137;   // 1/um decay constant
    double base_pitch_um = 17.5;

    void validate() const {
        if (!(gamma0_per_mm > 0.0)) throw std::invalid_argument("StrainCouplingModel: gamma0 must be > 0");
        if (!(kappa_per_um > 0.0)) throw std::invalid_argument("StrainCouplingModel: kappa must be > 0");
        if (!(base_pitch_um > 0.0)) throw std::invalid_argument("StrainCouplingModel: base_pitch must be > 0");
    }
};

/// Wavelength dependence of the coupling coefficient as a lookup table of
/// (wavelength_nm -> dimensionless scale factor) with linear interpolation.
/// Scale factors must be strictly positive and strictly increasing with
/// wavelength (longer wavelengths couple more strongly). Queries outside
/// the table range are an error; no extrapolation.
class WavelengthCouplingModel {
public:
    using Entry = std::pair<double, double>;  // (wavelength_nm, scale)

    explicit WavelengthCouplingModel(std::vector<Entry> table);

    /// Table calibrated against the bundled default device so 450/532/630 nm
    /// probe progressively larger xi ranges; 532 nm is the unit reference.
    /// The 450 and 630 nm factors are fits to observed ranges, not
    /// first-principles values.
    static WavelengthCouplingModel default_table();

    double scale_at(double wavelength_nm) const;

    double min_wavelength_nm() const { return table_.front().first; }
    double max_wavelength_nm() const { return table_.back().first; }
    const std::vector<Entry>& table() const { return table_; }

private:
    std::vector<Entry> table_;  // sorted by wavelength
};

/// Real symmetric nonnegative matrix of jumping rates with zero diagonal
/// (the common propagation constant is factored into a global phase).
/// gamma_ref is the nearest-neighbour rate used to convert z to xi; for the
/// uniform constructor it is the off-diagonal value, for a general matrix
/// the largest entry.
class CouplingMatrix {
public:
    static CouplingMatrix uniform(int n, double gamma_per_mm);
    static CouplingMatrix from_matrix(Eigen::MatrixXd entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    double gamma_ref() const { return gamma_ref_; }
    const Eigen::MatrixXd& matrix() const { return entries_; }

private:
    CouplingMatrix(Eigen::MatrixXd entries, double gamma_ref)
        : entries_(std::move(entries)), gamma_ref_(gamma_ref) {}

    Eigen::MatrixXd entries_;
    double gamma_ref_ = 0.0;
};

/// Tridiagonal coupling matrix of a uniform nearest-neighbour array.
CouplingMatrix uniform_coupling(int n, double gamma_per_mm);

/// gamma0 * exp(-kappa * base_pitch * strain). Rejects negative strain
/// (the device is stretched, never compressed).
double gamma_from_strain(const StrainCouplingModel& model, double strain);

/// Coupling coefficient at a given strain and wavelength: the strain model
/// scaled by the wavelength factor.
double gamma_at(const ArrayGeometry& geometry, const StrainCouplingModel& strain_model,
                const WavelengthCouplingModel& wl_model, double strain, double wavelength_nm);

/// Propagation distance in units of the coupling length L_c = pi/(2*gamma):
/// xi = 2*gamma*z/pi. Dynamics depend on gamma and z only through xi.
double normalized_length(double gamma_per_mm, double z_mm);

/// Inverse of normalized_length at fixed gamma: the z realizing a given xi.
double z_for_xi(double gamma_per_mm, double xi);

/// Full device description: geometry plus both coupling models and the
/// scale relating the reference-pair coupling to the array coupling
/// (1 when the reference pitch equals the array pitch).
struct Device {
    ArrayGeometry geometry;
    StrainCouplingModel strain_model;
    WavelengthCouplingModel wavelength_model = WavelengthCouplingModel::default_table();
    double reference_gamma_scale = 1.0;

    void validate() const;

    double gamma(double strain, double wavelength_nm) const {
        return gamma_at(geometry, strain_model, wavelength_model, strain, wavelength_nm);
    }
    double xi(double strain, double wavelength_nm) const {
        return normalized_length(gamma(strain, wavelength_nm), geometry.chip_length_mm);
    }
};

/// Loads a device from a JSON document with keys n_guides, pitch_um,
/// chip_length_mm, gamma0_per_mm, kappa_per_um, wavelength_table
/// ([[nm, scale], ...]) and optional reference_pitch_um, beta_per_um,
/// reference_gamma_scale. Unknown keys are rejected.
Device load_device(const std::filesystem::path& json_path);
Device device_from_json_text(const std::string& text, const std::string& origin = "<string>");
std::string device_to_json_text(const Device& device);

}  // namespace ctqw
