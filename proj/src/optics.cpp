#include "gsim/optics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"
#include "gsim/errors.hpp"

namespace gsim {

namespace {

void require_field(const SampledField& field) {
    if (field.amplitude.size() != static_cast<std::size_t>(field.grid.n_points)) {
        throw std::invalid_argument("SampledField: amplitude length does not match grid");
    }
    if (!(field.wavelength > 0.0)) {
        throw std::invalid_argument("SampledField: wavelength must be positive");
    }
}

}  // namespace

void BenchGeometry::validate() const {
    if (!(z1 > 0.0) || !(z2 > 0.0) || !(z3 > 0.0) || !(f > 0.0)) {
        throw std::invalid_argument("BenchGeometry: z1, z2, z3, f must all be positive");
    }
}

double propagation_min_distance(const Grid1D& grid, double wavelength) {
    return grid.span() * grid.pitch / (2.0 * wavelength);
}

SampledField propagate(const SampledField& field, double distance) {
    require_field(field);
    if (distance < 0.0) throw std::invalid_argument("propagate: distance must be >= 0");
    if (distance == 0.0) return field;

    const Grid1D& g = field.grid;
    const double z_min = propagation_min_distance(g, field.wavelength);
    if (distance < z_min) {
        throw AliasingError(
            "propagate: distance " + std::to_string(distance) +
            " m violates the sampling bound; the grid (span " + std::to_string(g.span()) +
            " m, pitch " + std::to_string(g.pitch) + " m) supports distances >= " +
            std::to_string(z_min) + " m at this wavelength");
    }

    // Zero-padding guard band x2, cropped after the transform.
    const int n = g.n_points;
    const int m = 2 * n;
    std::vector<std::complex<double>> work(static_cast<std::size_t>(m), {0.0, 0.0});
    for (int i = 0; i < n; ++i) work[static_cast<std::size_t>(i + n / 2)] = field.amplitude[i];

    detail::fft_inplace(work, -1);

    const double df = 1.0 / (m * g.pitch);
    const double phase_scale = -std::numbers::pi * field.wavelength * distance * df * df;
    for (int k = 0; k < m; ++k) {
        const int kk = (k <= m / 2) ? k : k - m;  // signed spatial frequency index
        const double phase = phase_scale * static_cast<double>(kk) * static_cast<double>(kk);
        work[static_cast<std::size_t>(k)] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }

    detail::fft_inplace(work, +1);

    SampledField out;
    out.grid = g;
    out.wavelength = field.wavelength;
    out.amplitude.resize(static_cast<std::size_t>(n));
    const double norm = 1.0 / static_cast<double>(m);
    for (int i = 0; i < n; ++i) out.amplitude[i] = work[static_cast<std::size_t>(i + n / 2)] * norm;
    return out;
}

double window_safe_bandwidth(const Grid1D& grid, double wavelength, double distance) {
    if (!(wavelength > 0.0) || !(distance > 0.0))
        throw std::invalid_argument("window_safe_bandwidth: need positive wavelength and distance");
    return grid.span() / (2.0 * wavelength * distance);
}

SampledField band_limit(const SampledField& field, double max_frequency) {
    require_field(field);
    if (!(max_frequency > 0.0))
        throw std::invalid_argument("band_limit: max_frequency must be positive");

    const int n = field.grid.n_points;
    std::vector<std::complex<double>> work(field.amplitude.begin(), field.amplitude.end());
    detail::fft_inplace(work, -1);
    const double df = 1.0 / (n * field.grid.pitch);
    for (int k = 0; k < n; ++k) {
        const int kk = (k <= n / 2) ? k : k - n;
        if (std::abs(kk) * df > max_frequency) work[static_cast<std::size_t>(k)] = {0.0, 0.0};
    }
    detail::fft_inplace(work, +1);

    SampledField out;
    out.grid = field.grid;
    out.wavelength = field.wavelength;
    out.amplitude.resize(static_cast<std::size_t>(n));
    const double norm = 1.0 / static_cast<double>(n);
    for (int i = 0; i < n; ++i) out.amplitude[i] = work[static_cast<std::size_t>(i)] * norm;
    return out;
}

SampledField apply_lens(const SampledField& field, double f) {
    require_field(field);
    if (f == 0.0) throw std::invalid_argument("apply_lens: focal length must be nonzero");

    SampledField out = field;
    const double scale = -std::numbers::pi / (field.wavelength * f);
    for (int i = 0; i < field.grid.n_points; ++i) {
        const double x = field.grid.coord(i);
        const double phase = scale * x * x;
        out.amplitude[i] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return out;
}

SampledField apply_mask(const SampledField& field, const MaskSpec& mask) {
    require_field(field);
    if (!mask.transmission) throw std::invalid_argument("apply_mask: mask has no transmission");

    SampledField out = field;
    for (int i = 0; i < field.grid.n_points; ++i) {
        const double t = mask.transmission(field.grid.coord(i));
        if (!(t >= 0.0 && t <= 1.0)) {
            throw std::domain_error("apply_mask: transmission outside [0,1] at x = " +
                                    std::to_string(field.grid.coord(i)));
        }
        out.amplitude[i] *= t;
    }
    return out;
}

MaskSpec pinhole_array(int count, double separation, double hole_diameter) {
    if (count < 1) throw std::invalid_argument("pinhole_array: count must be >= 1");
    if (!(hole_diameter > 0.0))
        throw std::invalid_argument("pinhole_array: hole_diameter must be positive");
    if (count > 1 && !(separation > hole_diameter)) {
        throw std::invalid_argument("pinhole_array: pinholes overlap (separation <= diameter)");
    }

    std::vector<double> centers;
    for (int k = 0; k < count; ++k) {
        centers.push_back((k - (count - 1) / 2.0) * separation);
    }
    const double half = hole_diameter / 2.0;

    MaskSpec mask;
    mask.n_features = count;
    mask.description = std::to_string(count) + " pinhole(s), diameter " +
                       std::to_string(hole_diameter * 1e3) + " mm, spacing " +
                       std::to_string(separation * 1e3) + " mm";
    mask.transmission = [centers, half](double x) {
        for (double c : centers) {
            if (std::abs(x - c) <= half) return 1.0;
        }
        return 0.0;
    };
    return mask;
}

MaskSpec double_pinhole(double separation, double hole_diameter) {
    return pinhole_array(2, separation, hole_diameter);
}

std::pair<SampledField, SampledField> beamsplit(const SampledField& field) {
    require_field(field);
    SampledField a = field;
    const double s = 1.0 / std::sqrt(2.0);
    for (auto& v : a.amplitude) v *= s;
    return {a, a};
}

LensCheck check_lens_equation(const BenchGeometry& geom, double tolerance) {
    geom.validate();
    if (geom.z2 == geom.z1) {
        throw GeometryError("check_lens_equation: z2 == z1 (degenerate conjugate distance)");
    }
    if (geom.z3 == 0.0) {
        throw GeometryError("check_lens_equation: z3 == 0");
    }

    LensCheck r;
    r.magnification = (geom.z1 - geom.z2) / geom.z3;
    if (geom.z3 == geom.f) {
        // 1/(z2-z1) would have to vanish: not satisfiable at finite geometry.
        r.infinite_conjugate = true;
        r.residual = 1.0 / (geom.z2 - geom.z1);
        r.normalized = std::abs(r.residual * geom.f);
        r.satisfied = false;
        return r;
    }
    r.residual = 1.0 / (geom.z2 - geom.z1) + 1.0 / geom.z3 - 1.0 / geom.f;
    r.normalized = std::abs(r.residual * geom.f);
    r.satisfied = r.normalized <= tolerance;
    return r;
}

}  // namespace gsim
