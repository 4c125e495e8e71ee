#pragma once

#include <functional>
#include <string>
#include <utility>

#include "gsim/field.hpp"

namespace gsim {

// Amplitude transmission mask, values in [0, 1].
struct MaskSpec {
    std::function<double(double)> transmission;
    std::string description;
    // Number of transparent features (pinholes); 0 if unspecified.
    int n_features = 0;
};

// Bench distances of the ghost-imaging layout. z1: collimator C2 to the
// secondary source; z2: imaging lens to the source; z3: lens to mask;
// f: lens focal length. z2 - z1 may be negative (the lens equation is signed).
struct BenchGeometry {
    double z1 = 0.0;  // m
    double z2 = 0.0;  // m
    double z3 = 0.0;  // m
    double f = 0.0;   // m

    void validate() const;  // throws std::invalid_argument
};

struct LensCheck {
    double residual = 0.0;    // 1/(z2-z1) + 1/z3 - 1/f, in 1/m
    double normalized = 0.0;  // |residual * f|
    bool satisfied = false;
    double magnification = 0.0;  // (z1-z2)/z3
    bool infinite_conjugate = false;  // z3 == f: 1/(z2-z1) would have to vanish
};

// Paraxial free-space propagation via the spectral transfer function
// exp(-i pi lambda z f^2), with an internal x2 zero-padding guard band
// that is cropped after the transform. Throws AliasingError when the
// grid cannot support the requested distance (see propagation_min_distance).
SampledField propagate(const SampledField& field, double distance);

// Shortest distance the grid supports: span * pitch / (2 * wavelength).
// The factor 2 is the padding guard band.
double propagation_min_distance(const Grid1D& grid, double wavelength);

// Removes plane-wave components steeper than max_frequency (cycles/m).
// A component at spatial frequency nu walks transversely by lambda*nu*z,
// so a diffuse field must be limited to span/(2*lambda*z_max) before a
// chain of propagations or its off-window light wraps around the periodic
// transform domain and decorrelates the two arms. Standard band-limited
// angular-spectrum practice; a no-op for fields already inside the band.
SampledField band_limit(const SampledField& field, double max_frequency);

// Largest source spatial frequency that stays inside the grid window over
// the given propagation distance: span / (2 * wavelength * distance).
double window_safe_bandwidth(const Grid1D& grid, double wavelength, double distance);

// Thin lens of focal length f (negative f = diverging): multiplies by
// exp(-i pi x^2 / (lambda f)). Pure phase, energy unchanged.
SampledField apply_lens(const SampledField& field, double f);

// Sample-wise amplitude transmission. Throws std::domain_error if the
// transmission evaluates outside [0, 1].
SampledField apply_mask(const SampledField& field, const MaskSpec& mask);

// Equal pinholes of the given diameter centered symmetrically about 0
// with center-to-center spacing `separation`. count >= 1; holes must not
// overlap. double_pinhole(s, d) == pinhole_array(2, s, d).
MaskSpec pinhole_array(int count, double separation, double hole_diameter);
MaskSpec double_pinhole(double separation, double hole_diameter);

// 50/50 non-polarizing beamsplitter: two classical copies, each amplitude
// scaled by 1/sqrt(2).
std::pair<SampledField, SampledField> beamsplit(const SampledField& field);

// Checks the signed thin-lens relation 1/(z2-z1) + 1/z3 = 1/f at the
// given relative tolerance on |r*f|. Throws GeometryError on z2 == z1
// or z3 == 0.
LensCheck check_lens_equation(const BenchGeometry& geom, double tolerance);

}  // namespace gsim
