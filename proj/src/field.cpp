#include "gsim/field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gsim/errors.hpp"
#include "gsim/rng.hpp"

namespace gsim {

Grid1D make_grid(int n_points, double pitch, double center) {
    if (n_points < 2 || n_points % 2 != 0) {
        throw std::invalid_argument("make_grid: n_points must be even and >= 2, got " +
                                    std::to_string(n_points));
    }
    if (!(pitch > 0.0)) {
        throw std::invalid_argument("make_grid: pitch must be positive");
    }
    return Grid1D{n_points, pitch, center};
}

double SampledField::energy() const {
    double e = 0.0;
    for (const auto& a : amplitude) e += std::norm(a);
    return e * grid.pitch;
}

void SourceSpec::validate() const {
    if (!(diameter > 0.0)) throw std::invalid_argument("SourceSpec: diameter must be positive");
    if (!(wavelength > 0.0)) throw std::invalid_argument("SourceSpec: wavelength must be positive");
    if (!(coherence_time > 0.0))
        throw std::invalid_argument("SourceSpec: coherence_time must be positive");
    if (!(mean_rate > 0.0)) throw std::invalid_argument("SourceSpec: mean_rate must be positive");
}

SampledField generate_source_frame(const SourceSpec& spec, const Grid1D& grid, EnsembleSeed seed) {
    spec.validate();
    const double half = spec.diameter / 2.0;
    if (half >= grid.center - grid.min_coord() || half >= grid.max_coord() - grid.center) {
        throw GeometryError("generate_source_frame: source disk exceeds grid span");
    }

    SampledField f;
    f.grid = grid;
    f.wavelength = spec.wavelength;
    f.amplitude.assign(grid.n_points, {0.0, 0.0});
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.coord(i) - grid.center;
        if (std::abs(x) <= half) {
            f.amplitude[i] = rng::circular_gaussian_at(seed.master_seed, seed.frame_index,
                                                       static_cast<std::uint64_t>(i));
        }
    }
    return f;
}

std::vector<SampledField> frame_ensemble(const SourceSpec& spec, const Grid1D& grid,
                                         std::uint64_t master_seed, int count) {
    if (count < 1) throw std::invalid_argument("frame_ensemble: count must be >= 1");
    std::vector<SampledField> frames;
    frames.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        frames.push_back(
            generate_source_frame(spec, grid, {master_seed, static_cast<std::uint64_t>(k)}));
    }
    return frames;
}

}  // namespace gsim
