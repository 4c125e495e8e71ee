#include "gsim/detection.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gsim/errors.hpp"
#include "gsim/rng.hpp"

namespace gsim {

namespace {
constexpr double kFwhmToSigma = 1.0 / 2.3548200450309493;  // 1 / (2 sqrt(2 ln 2))
}

void DetectorSpec::validate() const {
    if (!(aperture_diameter > 0.0))
        throw std::invalid_argument("DetectorSpec: aperture_diameter must be positive");
    if (!(efficiency > 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("DetectorSpec: efficiency must be in (0,1]");
    if (jitter_fwhm < 0.0)
        throw std::invalid_argument("DetectorSpec: jitter_fwhm must be >= 0");
}

double IntensityTrace::mean() const {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double IntensityTrace::peak() const {
    double p = 0.0;
    for (double v : values) p = std::max(p, v);
    return p;
}

double integrate_intensity(const SampledField& field, const DetectorSpec& det) {
    det.validate();
    const Grid1D& g = field.grid;
    const double lo = det.center - det.aperture_diameter / 2.0;
    const double hi = det.center + det.aperture_diameter / 2.0;
    if (hi < g.min_coord() || lo > g.max_coord()) {
        throw GeometryError("integrate_intensity: detector aperture lies outside the grid");
    }
    double s = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
        const double x = g.coord(i);
        if (x >= lo && x <= hi) s += std::norm(field.amplitude[i]);
    }
    return det.efficiency * s * g.pitch;
}

double bucket_detect(const SampledField& field_after_mask, double efficiency) {
    if (!(efficiency > 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("bucket_detect: efficiency must be in (0,1]");
    return efficiency * field_after_mask.energy();
}

IntensityTrace synthesize_intensity_trace(double coherence_time, double mean_rate,
                                          double duration, double dt, std::uint64_t seed) {
    if (!(coherence_time > 0.0) || !(mean_rate > 0.0) || !(duration > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("synthesize_intensity_trace: all parameters must be positive");
    if (dt > coherence_time / 10.0)
        throw std::invalid_argument(
            "synthesize_intensity_trace: dt must be <= coherence_time/10");
    if (duration < 100.0 * coherence_time)
        throw std::invalid_argument(
            "synthesize_intensity_trace: duration must be >= 100*coherence_time");

    const auto n = static_cast<std::size_t>(std::llround(duration / dt));
    const double rho = std::exp(-dt / coherence_time);
    const double drive = std::sqrt(1.0 - rho * rho);

    rng::Counter gen(rng::derive_key(seed, 0x0uLL));
    std::complex<double> a = gen.next_circular_gaussian();

    IntensityTrace trace;
    trace.dt = dt;
    trace.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        trace.values[i] = mean_rate * std::norm(a);
        a = rho * a + drive * gen.next_circular_gaussian();
    }
    return trace;
}

PhotonStream sample_photons(const IntensityTrace& trace, double efficiency, std::uint64_t seed) {
    if (!(efficiency > 0.0 && efficiency <= 1.0))
        throw std::invalid_argument("sample_photons: efficiency must be in (0,1]");
    const double peak_occupancy = efficiency * trace.peak() * trace.dt;
    if (peak_occupancy > 0.1)
        throw std::invalid_argument("sample_photons: peak rate * dt = " +
                                    std::to_string(peak_occupancy) + " exceeds 0.1");

    rng::Counter gen(rng::derive_key(seed, 0x1uLL));
    PhotonStream out;
    out.duration = trace.duration();
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        const double mean = efficiency * trace.values[i] * trace.dt;
        if (mean <= 0.0) continue;
        // Piecewise-constant intensity: exact per-bin Poisson counts.
        const int k = gen.next_poisson(mean);
        const double t0 = static_cast<double>(i) * trace.dt;
        for (int j = 0; j < k; ++j) out.timestamps.push_back(t0 + gen.next_double() * trace.dt);
    }
    std::sort(out.timestamps.begin(), out.timestamps.end());
    return out;
}

PhotonStream apply_jitter(const PhotonStream& stream, double jitter_fwhm, std::uint64_t seed) {
    if (jitter_fwhm < 0.0) throw std::invalid_argument("apply_jitter: jitter_fwhm must be >= 0");
    if (jitter_fwhm == 0.0) return stream;

    const double sigma = jitter_fwhm * kFwhmToSigma;
    rng::Counter gen(rng::derive_key(seed, 0x2uLL));
    PhotonStream out;
    out.duration = stream.duration;
    out.timestamps.reserve(stream.timestamps.size());
    for (double t : stream.timestamps) out.timestamps.push_back(t + sigma * gen.next_normal());
    std::sort(out.timestamps.begin(), out.timestamps.end());
    return out;
}

std::pair<PhotonStream, PhotonStream> sample_thermal_stream_pair(double coherence_time,
                                                                 double rate1, double rate2,
                                                                 double duration,
                                                                 std::uint64_t seed) {
    if (!(coherence_time > 0.0) || !(rate1 > 0.0) || !(rate2 > 0.0) || !(duration > 0.0))
        throw std::invalid_argument("sample_thermal_stream_pair: all parameters must be positive");

    // Candidate rate bound: intensities above kBound saturate the acceptance
    // probability at 1, losing an e^-kBound tail of the photon flux (< 1e-5)
    // and biasing pair correlations by well under 0.1%.
    constexpr double kBound = 12.0;
    const double total_rate = rate1 + rate2;
    const double candidate_rate = kBound * total_rate;
    const double p1 = rate1 / total_rate;
    // Beyond this gap the field correlation exp(-gap/tau) is below 5e-18,
    // under one ulp of the update: the new sample is independent in double
    // precision, so the intensity can be drawn directly as a unit
    // exponential and the phase deferred until a close-by candidate needs
    // the full complex state.
    const double decorrelated_gap = 40.0 * coherence_time;

    rng::Counter gen(rng::derive_key(seed, 0x3uLL));
    std::complex<double> a = gen.next_circular_gaussian();
    double intensity = std::norm(a);
    bool have_phase = true;

    PhotonStream s1, s2;
    s1.duration = duration;
    s2.duration = duration;
    double t = 0.0;
    while (true) {
        const double gap = gen.next_exponential(1.0 / candidate_rate);
        t += gap;
        if (t >= duration) break;
        if (gap > decorrelated_gap) {
            intensity = gen.next_exponential(1.0);
            have_phase = false;
        } else {
            if (!have_phase) {
                const double phi =
                    2.0 * std::numbers::pi * gen.next_double();
                a = std::sqrt(intensity) *
                    std::complex<double>(std::cos(phi), std::sin(phi));
                have_phase = true;
            }
            // Exact OU transition over the gap.
            const double rho = std::exp(-gap / coherence_time);
            a = rho * a + std::sqrt(1.0 - rho * rho) * gen.next_circular_gaussian();
            intensity = std::norm(a);
        }
        // Accept with I_norm / kBound, where I_norm = |a|^2 has mean 1.
        if (gen.next_double() * kBound < intensity) {
            if (gen.next_double() < p1) {
                s1.timestamps.push_back(t);
            } else {
                s2.timestamps.push_back(t);
            }
        }
    }
    return {std::move(s1), std::move(s2)};
}

void write_photon_stream(std::ostream& os, const PhotonStream& stream, std::uint64_t seed) {
    os << "# photon stream, one timestamp in seconds per line, ascending\n";
    os << "# duration_s " << stream.duration << "\n";
    os << "# seed " << seed << "\n";
    os.precision(17);
    for (double t : stream.timestamps) os << t << "\n";
}

PhotonStream read_photon_stream(std::istream& is) {
    PhotonStream out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            if (key == "duration_s") hs >> out.duration;
            continue;
        }
        out.timestamps.push_back(std::stod(line));
    }
    if (!std::is_sorted(out.timestamps.begin(), out.timestamps.end()))
        throw std::invalid_argument("read_photon_stream: timestamps not ascending");
    return out;
}

}  // namespace gsim
