#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gsim/field.hpp"

namespace gsim {

struct DetectorSpec {
    double center = 0.0;             // m
    double aperture_diameter = 0.0;  // m
    double efficiency = 1.0;         // (0, 1]
    double jitter_fwhm = 0.0;        // s, Gaussian timing jitter of this channel

    void validate() const;
};

// Classical intensity I(t) on a uniform time grid, in counts/s.
struct IntensityTrace {
    double dt = 0.0;  // s per sample
    std::vector<double> values;

    double duration() const { return dt * static_cast<double>(values.size()); }
    double mean() const;
    double peak() const;
};

// Sorted detection timestamps for one detector.
struct PhotonStream {
    std::vector<double> timestamps;  // s, ascending
    double duration = 0.0;           // s
};

// efficiency * sum_{|x-center| <= aperture/2} |E(x)|^2 * pitch.
// Throws GeometryError if the aperture lies fully outside the grid.
double integrate_intensity(const SampledField& field, const DetectorSpec& det);

// Spatially non-resolving detector: efficiency * total energy.
double bucket_detect(const SampledField& field_after_mask, double efficiency);

// Complex Ornstein-Uhlenbeck thermal intensity: I(t) = |a(t)|^2 scaled to
// mean mean_rate, amplitude autocorrelation exp(-|tau|/tau0), hence
// g2(tau) = 1 + exp(-2|tau|/tau0). Requires dt <= tau0/10 and
// duration >= 100*tau0.
IntensityTrace synthesize_intensity_trace(double coherence_time, double mean_rate,
                                          double duration, double dt, std::uint64_t seed);

// Doubly stochastic (Mandel) point process driven by efficiency * I(t):
// per-bin Poisson counts, timestamps uniform within their bin.
// Requires peak rate * dt <= 0.1.
PhotonStream sample_photons(const IntensityTrace& trace, double efficiency, std::uint64_t seed);

// Independent Gaussian timing offsets with the given FWHM; re-sorted.
PhotonStream apply_jitter(const PhotonStream& stream, double jitter_fwhm, std::uint64_t seed);

// Event-driven sampler of the same model as synthesize_intensity_trace +
// sample_photons for two detectors sharing one thermal intensity (50/50
// split, independent detection). Exact: the OU process is advanced with
// its exact transition kernel between candidate times, and candidates are
// thinned against the instantaneous intensity. Tractable for long
// integration times where a full dt <= tau0/10 trace would not fit.
std::pair<PhotonStream, PhotonStream> sample_thermal_stream_pair(double coherence_time,
                                                                 double rate1, double rate2,
                                                                 double duration,
                                                                 std::uint64_t seed);

// Plain-text timestamp serialization: '#'-prefixed header lines
// (duration, seed), then one ascending timestamp in seconds per line.
void write_photon_stream(std::ostream& os, const PhotonStream& stream, std::uint64_t seed);
PhotonStream read_photon_stream(std::istream& is);

}  // namespace gsim
