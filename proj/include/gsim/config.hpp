#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsim {

enum class Scenario { Hbt, Ghost, CheckLens, IdealCurve, Selftest };

std::string scenario_name(Scenario s);
std::optional<Scenario> scenario_from_name(const std::string& name);

// Parse error with file position. what() carries "line N: ...".
struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Parsed run configuration. All quantities in SI units. Optional fields
// are required only by the scenarios that use them.
struct RunConfig {
    std::optional<Scenario> scenario;
    std::uint64_t seed = 1;
    int threads = 1;

    // [grid]
    int grid_points = 4096;
    double grid_pitch = 5e-6;

    // [source]
    std::optional<double> source_diameter;
    std::optional<double> wavelength;
    std::optional<double> coherence_time;
    std::optional<double> mean_rate;

    // [detector1] / [detector2]
    double det1_center = 0.0, det2_center = 0.0;
    double det1_aperture = 2e-3, det2_aperture = 2e-3;
    double det1_efficiency = 1.0, det2_efficiency = 1.0;
    double det1_jitter_fwhm = 0.92e-9, det2_jitter_fwhm = 0.92e-9;

    // [tac]
    double tac_min = -10e-9;
    double tac_max = 10e-9;
    double tac_bin = 0.05e-9;

    // [hbt]
    std::optional<double> hbt_duration;
    double peak_halfwidth = 0.25e-9;
    double baseline_exclusion = 5e-9;

    // [geometry]
    std::optional<double> z1, z2, z3, f;

    // [mask]
    int mask_features = 2;
    std::optional<double> mask_separation;
    std::optional<double> mask_hole_diameter;

    // [reference]
    double reference_aperture = 2e-3;
    double reference_efficiency = 1.0;

    // [scan]
    std::optional<double> scan_start, scan_stop, scan_step;
    int scan_frames = 2000;
    std::optional<double> temporal_modes;  // unset = auto (suggested-M helper)

    // [ideal]
    std::optional<double> coherence_width;  // unset = van Cittert-Zernike at z1

    bool operator==(const RunConfig&) const = default;

    std::vector<double> scan_position_list() const;
};

// Parses the sectioned "key = value unit" format. If expected_scenario is
// given (the CLI subcommand), the file's scenario key must agree and the
// scenario's required keys are enforced.
RunConfig parse_config(const std::string& text,
                       std::optional<Scenario> expected_scenario = std::nullopt);

// Canonical serialization (SI units); parse_config(serialize_config(c))
// reproduces c field-wise.
std::string serialize_config(const RunConfig& cfg);

}  // namespace gsim
