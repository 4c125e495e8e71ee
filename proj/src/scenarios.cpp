#include "gsim/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "gsim/errors.hpp"
#include "gsim/rng.hpp"

namespace gsim {

namespace {

constexpr double kFwhmToSigma = 1.0 / 2.3548200450309493;

void parallel_frames(int n_frames, int threads, const std::function<void(int)>& work) {
    threads = std::max(1, std::min(threads, n_frames));
    if (threads == 1) {
        for (int i = 0; i < n_frames; ++i) work(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_frames; i = next.fetch_add(1)) work(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Parabolic vertex through three samples; returns the x of the refined peak.
double refine_peak(double xm, double x0, double xp, double vm, double v0, double vp) {
    const double denom = vm - 2.0 * v0 + vp;
    if (denom >= 0.0) return x0;
    double d = 0.5 * (vm - vp) / denom;
    d = std::clamp(d, -1.0, 1.0);
    // local spacing may be uneven; interpolate on the relevant side
    return x0 + d * (d > 0.0 ? (xp - x0) : (x0 - xm));
}

}  // namespace

void HbtConfig::validate() const {
    source.validate();
    detector1.validate();
    detector2.validate();
    if (!(tac_bin > 0.0) || !(tac_min < tac_max))
        throw std::invalid_argument("HbtConfig: bad TAC range/bin");
    if (!(integration_time >= 1e4 * source.coherence_time))
        throw std::invalid_argument(
            "HbtConfig: integration_time must be >= 1e4 * coherence_time");
}

void GhostConfig::validate() const {
    source.validate();
    geometry.validate();
    reference.validate();
    if (!mask.transmission) throw std::invalid_argument("GhostConfig: mask has no transmission");
    if (scan_positions.size() < 2)
        throw std::invalid_argument("GhostConfig: need at least 2 scan positions");
    for (std::size_t i = 1; i < scan_positions.size(); ++i) {
        if (!(scan_positions[i] > scan_positions[i - 1]))
            throw std::invalid_argument("GhostConfig: scan positions must be strictly increasing");
    }
    if (frames_per_position < 100)
        throw std::invalid_argument("GhostConfig: frames_per_position must be >= 100");
    if (!(temporal_modes >= 1.0))
        throw std::invalid_argument("GhostConfig: temporal_modes must be >= 1");
    if (!(bucket_efficiency > 0.0 && bucket_efficiency <= 1.0))
        throw std::invalid_argument("GhostConfig: bucket_efficiency must be in (0,1]");
}

HbtResult run_hbt(const HbtConfig& cfg, const HbtAnalysisWindows& win) {
    cfg.validate();

    const double rate1 = cfg.source.mean_rate * cfg.detector1.efficiency;
    const double rate2 = cfg.source.mean_rate * cfg.detector2.efficiency;
    auto [starts, stops] = sample_thermal_stream_pair(
        cfg.source.coherence_time, rate1, rate2, cfg.integration_time,
        rng::derive_key(cfg.master_seed, 0x11uLL));

    starts = apply_jitter(starts, cfg.detector1.jitter_fwhm, rng::derive_key(cfg.master_seed, 0x12uLL));
    stops = apply_jitter(stops, cfg.detector2.jitter_fwhm, rng::derive_key(cfg.master_seed, 0x13uLL));

    HbtResult res;
    res.n_start_counts = static_cast<long long>(starts.timestamps.size());
    res.n_stop_counts = static_cast<long long>(stops.timestamps.size());
    res.histogram = tac_histogram(starts, stops, cfg.tac_min, cfg.tac_max, cfg.tac_bin);
    res.fit = fit_gaussian_peak(res.histogram);
    res.g2_zero = g2_zero_from_histogram(res.histogram, win.peak_halfwidth, win.baseline_exclusion);

    const double excess = res.g2_zero.value - 1.0;
    const double combined_jitter = std::hypot(cfg.detector1.jitter_fwhm, cfg.detector2.jitter_fwhm);
    res.coherence_time_estimate =
        (excess > 0.0 && combined_jitter > 0.0)
            ? coherence_time_from_excess(excess, combined_jitter)
            : 0.0;
    return res;
}

GhostScan run_ghost(const GhostConfig& cfg, int threads) {
    cfg.validate();

    GhostScan scan;
    scan.positions = cfg.scan_positions;

    const LensCheck lc = check_lens_equation(cfg.geometry, 0.01);
    if (!lc.satisfied) {
        scan.lens_check_warning = "lens equation residual |r*f| = " +
                                  std::to_string(lc.normalized) +
                                  " exceeds 1% (running anyway)";
    }

    const int n_frames = cfg.frames_per_position;
    const auto n_pos = cfg.scan_positions.size();
    std::vector<double> bucket(static_cast<std::size_t>(n_frames));
    std::vector<double> refs(static_cast<std::size_t>(n_frames) * n_pos);

    const BenchGeometry& geo = cfg.geometry;
    // Both arms must see the same non-wrapping field, so the per-sample
    // independent source is limited once, at the bandwidth safe for the
    // longest leg, before the splitter.
    const double safe_bw = window_safe_bandwidth(cfg.grid, cfg.source.wavelength,
                                                 std::max(geo.z1, geo.z2));
    parallel_frames(n_frames, threads, [&](int k) {
        const SampledField frame = band_limit(
            generate_source_frame(cfg.source, cfg.grid,
                                  {cfg.master_seed, static_cast<std::uint64_t>(k)}),
            safe_bw);
        auto [arm_a, arm_b] = beamsplit(frame);

        // Arm A: to the lens, through it, to the mask, into the bucket.
        SampledField a = propagate(arm_a, geo.z2);
        a = apply_lens(a, geo.f);
        a = propagate(a, geo.z3);
        a = apply_mask(a, cfg.mask);
        bucket[static_cast<std::size_t>(k)] = bucket_detect(a, cfg.bucket_efficiency);

        // Arm B: free propagation to the scanned reference detector.
        const SampledField b = propagate(arm_b, geo.z1);
        DetectorSpec det = cfg.reference;
        for (std::size_t p = 0; p < n_pos; ++p) {
            det.center = cfg.scan_positions[p];
            refs[static_cast<std::size_t>(k) * n_pos + p] = integrate_intensity(b, det);
        }
    });

    const double m_dilution = cfg.temporal_modes;
    scan.g2.reserve(n_pos);
    scan.g2_raw.reserve(n_pos);
    std::vector<std::pair<double, double>> curve;
    for (std::size_t p = 0; p < n_pos; ++p) {
        std::vector<std::pair<double, double>> pairs;
        pairs.reserve(static_cast<std::size_t>(n_frames));
        for (int k = 0; k < n_frames; ++k) {
            pairs.emplace_back(bucket[static_cast<std::size_t>(k)],
                               refs[static_cast<std::size_t>(k) * n_pos + p]);
        }
        const G2Estimate raw = g2_from_pairs(pairs);
        G2Estimate diluted;
        diluted.value = 1.0 + (raw.value - 1.0) / m_dilution;
        diluted.std_error = raw.std_error / m_dilution;
        diluted.n_samples = raw.n_samples;
        scan.g2_raw.push_back(raw);
        scan.g2.push_back(diluted);
        curve.emplace_back(cfg.scan_positions[p], diluted.value);
    }

    scan.visibility = visibility(curve);

    // Local maxima above half the excess range, parabolic-refined.
    double vmin = curve[0].second, vmax = curve[0].second;
    for (const auto& [x, v] : curve) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    const double threshold = vmin + 0.5 * (vmax - vmin);
    for (std::size_t p = 1; p + 1 < curve.size(); ++p) {
        const double v = curve[p].second;
        if (v >= threshold && v > curve[p - 1].second && v >= curve[p + 1].second) {
            scan.peak_positions.push_back(refine_peak(curve[p - 1].first, curve[p].first,
                                                      curve[p + 1].first, curve[p - 1].second, v,
                                                      curve[p + 1].second));
        }
    }
    return scan;
}

std::vector<std::pair<double, double>> ideal_ghost_curve(const BenchGeometry& geometry,
                                                         const MaskSpec& mask, int n_features,
                                                         const DetectorSpec& detector,
                                                         double coherence_width_fwhm,
                                                         const std::vector<double>& positions) {
    geometry.validate();
    if (n_features < 1) throw std::invalid_argument("ideal_ghost_curve: N must be >= 1");
    if (mask.n_features != 0 && mask.n_features != n_features)
        throw std::invalid_argument("ideal_ghost_curve: N does not match the mask");
    if (!mask.transmission) throw std::invalid_argument("ideal_ghost_curve: mask has no transmission");
    if (positions.empty()) throw std::invalid_argument("ideal_ghost_curve: no positions");
    if (coherence_width_fwhm < 0.0)
        throw std::invalid_argument("ideal_ghost_curve: negative coherence width");
    if (geometry.z1 == geometry.z2)
        throw GeometryError("ideal_ghost_curve: z1 == z2");

    const double inv_mag = geometry.z3 / (geometry.z1 - geometry.z2);
    auto base = [&](double x2) {
        const double t = mask.transmission(inv_mag * x2);
        return static_cast<double>(n_features) + t * t;
    };

    const double aperture = detector.aperture_diameter;
    const double sigma = coherence_width_fwhm * kFwhmToSigma;
    const double half_extent = aperture / 2.0 + 4.0 * sigma;
    if (half_extent <= 0.0) {
        std::vector<std::pair<double, double>> out;
        out.reserve(positions.size());
        for (double x : positions) out.emplace_back(x, base(x));
        return out;
    }

    // Combined smoothing kernel: top-hat of the aperture convolved with the
    // Gaussian coherence profile, sampled and normalized.
    const int half_n = 1000;
    const double du = half_extent / half_n;
    std::vector<double> kernel(static_cast<std::size_t>(2 * half_n + 1));
    double ksum = 0.0;
    for (int i = -half_n; i <= half_n; ++i) {
        const double u = i * du;
        double k;
        if (sigma > 0.0) {
            const double s2 = sigma * std::sqrt(2.0);
            if (aperture > 0.0) {
                k = 0.5 * (std::erf((u + aperture / 2.0) / s2) - std::erf((u - aperture / 2.0) / s2));
            } else {
                k = std::exp(-u * u / (2.0 * sigma * sigma));
            }
        } else {
            k = (std::abs(u) <= aperture / 2.0) ? 1.0 : 0.0;
        }
        kernel[static_cast<std::size_t>(i + half_n)] = k;
        ksum += k;
    }
    for (auto& k : kernel) k /= ksum;

    std::vector<std::pair<double, double>> out;
    out.reserve(positions.size());
    for (double x : positions) {
        double v = 0.0;
        for (int i = -half_n; i <= half_n; ++i) {
            v += kernel[static_cast<std::size_t>(i + half_n)] * base(x - i * du);
        }
        out.emplace_back(x, v);
    }
    return out;
}

double predicted_magnification(const BenchGeometry& geometry) {
    geometry.validate();
    if (geometry.z3 == 0.0) throw GeometryError("predicted_magnification: z3 == 0");
    return (geometry.z1 - geometry.z2) / geometry.z3;
}

double suggested_temporal_modes(double peak_halfwidth, double combined_jitter_fwhm,
                                double coherence_time) {
    if (!(peak_halfwidth > 0.0) || !(combined_jitter_fwhm >= 0.0) || !(coherence_time > 0.0))
        throw std::invalid_argument("suggested_temporal_modes: bad arguments");
    return std::max(1.0, (2.0 * peak_halfwidth + combined_jitter_fwhm) / coherence_time);
}

double transverse_coherence_width(double source_diameter, double wavelength, double distance) {
    if (!(source_diameter > 0.0) || !(wavelength > 0.0) || !(distance > 0.0))
        throw std::invalid_argument("transverse_coherence_width: bad arguments");
    // sinc^2 half-maximum full width for a slit: 2 * 1.39156 / pi * lambda z / D
    return 0.88589 * wavelength * distance / source_diameter;
}

}  // namespace gsim
