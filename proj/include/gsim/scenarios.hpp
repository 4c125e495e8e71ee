#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsim/correlation.hpp"
#include "gsim/detection.hpp"
#include "gsim/field.hpp"
#include "gsim/optics.hpp"

namespace gsim {

// HBT intensity-interferometry run (shared thermal beam, two detectors,
// TAC + MCA).
struct HbtConfig {
    SourceSpec source;
    DetectorSpec detector1;
    DetectorSpec detector2;
    double tac_min = -10e-9;     // s
    double tac_max = 10e-9;      // s
    double tac_bin = 0.05e-9;    // s
    double integration_time = 0.0;  // s, must be >= 1e4 * coherence_time
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct HbtResult {
    CoincidenceHistogram histogram;
    GaussianFit fit;
    G2Estimate g2_zero;
    double coherence_time_estimate = 0.0;  // s
    long long n_start_counts = 0;
    long long n_stop_counts = 0;
};

struct GhostConfig {
    SourceSpec source;
    BenchGeometry geometry;
    MaskSpec mask;
    DetectorSpec reference;           // scanned detector; center is overridden per position
    std::vector<double> scan_positions;  // m, strictly increasing
    int frames_per_position = 0;         // >= 100
    double temporal_modes = 1.0;         // M >= 1
    std::uint64_t master_seed = 0;
    Grid1D grid{4096, 5e-6, 0.0};
    double bucket_efficiency = 1.0;

    void validate() const;
};

struct GhostScan {
    std::vector<double> positions;     // m
    std::vector<G2Estimate> g2;        // diluted: 1 + (raw - 1)/M
    std::vector<G2Estimate> g2_raw;
    double visibility = 0.0;           // of the diluted curve
    std::vector<double> peak_positions;  // m, parabolic-refined local maxima
    std::string lens_check_warning;    // nonempty if the lens equation missed 1%
};

// Defaults: peak window 0.25 ns, baseline beyond 5 ns.
struct HbtAnalysisWindows {
    double peak_halfwidth = 0.25e-9;
    double baseline_exclusion = 5e-9;
};

HbtResult run_hbt(const HbtConfig& cfg, const HbtAnalysisWindows& win = {});

// Per frame: source frame -> beamsplit; arm A propagates z2, lens, z3,
// mask, bucket; arm B propagates z1 and is sampled at each scan position.
// g2 over the ensemble per position, then the excess is diluted by the
// temporal mode count M.
GhostScan run_ghost(const GhostConfig& cfg, int threads = 1);

// N + |T(z3/(z1-z2) x2)|^2 on the given positions, convolved with the
// detector aperture (top-hat of its diameter) and the coherence profile
// (Gaussian of the given FWHM, both in the detector plane). Values on the
// N..N+1 scale.
std::vector<std::pair<double, double>> ideal_ghost_curve(const BenchGeometry& geometry,
                                                         const MaskSpec& mask, int n_features,
                                                         const DetectorSpec& detector,
                                                         double coherence_width_fwhm,
                                                         const std::vector<double>& positions);

// (z1 - z2)/z3: detector-plane distance per object-plane distance.
double predicted_magnification(const BenchGeometry& geometry);

// Documentation helper for the temporal-mode dilution knob:
// M = (2*peak_halfwidth + combined_jitter_fwhm) / coherence_time.
double suggested_temporal_modes(double peak_halfwidth, double combined_jitter_fwhm,
                                double coherence_time);

// |mu|^2 >= 1/2 full width of the far-field coherence function of an
// incoherent slit source of the given size (van Cittert-Zernike):
// 0.8859 * wavelength * distance / diameter.
double transverse_coherence_width(double source_diameter, double wavelength, double distance);

}  // namespace gsim
