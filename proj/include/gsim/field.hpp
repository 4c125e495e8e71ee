#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace gsim {

// Uniform 1D transverse grid. Sample i sits at center + (i - n/2)*pitch.
struct Grid1D {
    int n_points = 0;
    double pitch = 0.0;   // m
    double center = 0.0;  // m

    double coord(int i) const { return center + (i - n_points / 2) * pitch; }
    double span() const { return n_points * pitch; }
    double min_coord() const { return coord(0); }
    double max_coord() const { return coord(n_points - 1); }

    bool operator==(const Grid1D&) const = default;
};

// n_points must be even and >= 2; pitch > 0. Throws std::invalid_argument.
Grid1D make_grid(int n_points, double pitch, double center);

// One spatial speckle realization: complex scalar amplitude on a grid.
struct SampledField {
    Grid1D grid;
    std::vector<std::complex<double>> amplitude;
    double wavelength = 0.0;  // m

    // Sum |E|^2 * pitch
    double energy() const;
};

// Quasi-monochromatic incoherent disk source.
struct SourceSpec {
    double diameter = 0.0;        // m
    double wavelength = 0.0;      // m
    double coherence_time = 0.0;  // s
    double mean_rate = 0.0;       // detected counts/s

    void validate() const;  // throws std::invalid_argument
};

struct EnsembleSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t frame_index = 0;
};

// One spatial coherence snapshot (one temporal mode): i.i.d. complex
// circular Gaussian amplitude with <|E|^2> = 1 inside the source disk,
// exactly zero outside. Pure function of (spec, grid, seed).
SampledField generate_source_frame(const SourceSpec& spec, const Grid1D& grid, EnsembleSeed seed);

// Frames for frame_index 0..count-1, statistically independent.
std::vector<SampledField> frame_ensemble(const SourceSpec& spec, const Grid1D& grid,
                                         std::uint64_t master_seed, int count);

}  // namespace gsim
