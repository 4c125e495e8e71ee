#include "gsim/run.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gsim/correlation.hpp"
#include "gsim/errors.hpp"
#include "gsim/rng.hpp"

namespace gsim {

namespace {

SourceSpec make_source(const RunConfig& cfg) {
    SourceSpec s;
    s.diameter = cfg.source_diameter.value();
    s.wavelength = cfg.wavelength.value();
    s.coherence_time = cfg.coherence_time.value();
    s.mean_rate = cfg.mean_rate.value();
    return s;
}

BenchGeometry make_geometry(const RunConfig& cfg) {
    return BenchGeometry{cfg.z1.value(), cfg.z2.value(), cfg.z3.value(), cfg.f.value()};
}

void write_header_block(std::ostream& os, const RunConfig& cfg) {
    os << "# gsim " << kVersion << "\n";
    os << "# seed " << cfg.seed << "\n";
    std::istringstream echo(serialize_config(cfg));
    std::string line;
    while (std::getline(echo, line)) os << "# " << line << "\n";
}

void write_manifest(const std::string& path, const RunConfig& cfg, double wall_seconds) {
    std::ofstream os(path);
    os << "# run manifest\n";
    os << "# version " << kVersion << "\n";
    os << "# seed " << cfg.seed << "\n";
    os << "# wall_time_s " << wall_seconds << "\n";
    os << serialize_config(cfg);
}

}  // namespace

double resolve_temporal_modes(const RunConfig& cfg) {
    if (cfg.temporal_modes) return *cfg.temporal_modes;
    const double combined_jitter = std::hypot(cfg.det1_jitter_fwhm, cfg.det2_jitter_fwhm);
    return suggested_temporal_modes(cfg.peak_halfwidth, combined_jitter,
                                    cfg.coherence_time.value());
}

HbtConfig make_hbt_config(const RunConfig& cfg) {
    HbtConfig h;
    h.source = make_source(cfg);
    h.detector1 = DetectorSpec{cfg.det1_center, cfg.det1_aperture, cfg.det1_efficiency,
                               cfg.det1_jitter_fwhm};
    h.detector2 = DetectorSpec{cfg.det2_center, cfg.det2_aperture, cfg.det2_efficiency,
                               cfg.det2_jitter_fwhm};
    h.tac_min = cfg.tac_min;
    h.tac_max = cfg.tac_max;
    h.tac_bin = cfg.tac_bin;
    h.integration_time = cfg.hbt_duration.value();
    h.master_seed = cfg.seed;
    return h;
}

GhostConfig make_ghost_config(const RunConfig& cfg) {
    GhostConfig g;
    g.source = make_source(cfg);
    g.geometry = make_geometry(cfg);
    g.mask = pinhole_array(cfg.mask_features, cfg.mask_separation.value(),
                           cfg.mask_hole_diameter.value());
    g.reference = DetectorSpec{0.0, cfg.reference_aperture, cfg.reference_efficiency, 0.0};
    g.scan_positions = cfg.scan_position_list();
    g.frames_per_position = cfg.scan_frames;
    g.temporal_modes = resolve_temporal_modes(cfg);
    g.master_seed = cfg.seed;
    g.grid = make_grid(cfg.grid_points, cfg.grid_pitch, 0.0);
    return g;
}

int run_scenario(const RunConfig& cfg, const std::string& out_prefix, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario scenario = cfg.scenario.value_or(Scenario::Selftest);
    try {
        switch (scenario) {
            case Scenario::CheckLens: {
                const LensCheck lc = check_lens_equation(make_geometry(cfg), 0.01);
                log << "lens equation residual r = " << lc.residual << " 1/m\n";
                log << "normalized |r*f| = " << lc.normalized << "\n";
                log << "magnification (z1-z2)/z3 = " << lc.magnification << "\n";
                if (lc.infinite_conjugate) log << "infinite conjugate: z3 == f\n";
                log << (lc.satisfied ? "satisfied at 1% tolerance\n"
                                     : "NOT satisfied at 1% tolerance\n");
                break;
            }
            case Scenario::Hbt: {
                const HbtResult res =
                    run_hbt(make_hbt_config(cfg), {cfg.peak_halfwidth, cfg.baseline_exclusion});
                const std::string path = out_prefix + "_hbt_histogram.csv";
                std::ofstream os(path);
                write_header_block(os, cfg);
                os << "delay_ns,counts\n";
                os.precision(17);
                for (int i = 0; i < res.histogram.n_bins(); ++i) {
                    os << res.histogram.bin_center(i) * 1e9 << ","
                       << res.histogram.counts[static_cast<std::size_t>(i)] << "\n";
                }
                log << "starts " << res.n_start_counts << ", stops " << res.n_stop_counts
                    << ", coincidences " << res.histogram.total() << "\n";
                log << "fitted FWHM = " << res.fit.fwhm * 1e9 << " ns\n";
                log << "g2(0) = " << res.g2_zero.value << " +- " << res.g2_zero.std_error << "\n";
                log << "coherence time estimate = " << res.coherence_time_estimate * 1e9
                    << " ns\n";
                log << "wrote " << path << "\n";
                break;
            }
            case Scenario::Ghost: {
                const GhostScan scan = run_ghost(make_ghost_config(cfg), cfg.threads);
                if (!scan.lens_check_warning.empty())
                    log << "warning: " << scan.lens_check_warning << "\n";
                const std::string path = out_prefix + "_ghost_scan.csv";
                std::ofstream os(path);
                write_header_block(os, cfg);
                os << "position_mm,g2,g2_err\n";
                os.precision(17);
                for (std::size_t p = 0; p < scan.positions.size(); ++p) {
                    os << scan.positions[p] * 1e3 << "," << scan.g2[p].value << ","
                       << scan.g2[p].std_error << "\n";
                }
                log << "visibility = " << scan.visibility << "\n";
                log << "peaks at (mm):";
                for (double x : scan.peak_positions) log << " " << x * 1e3;
                log << "\n";
                log << "wrote " << path << "\n";
                break;
            }
            case Scenario::IdealCurve: {
                const BenchGeometry geo = make_geometry(cfg);
                const MaskSpec mask = pinhole_array(
                    cfg.mask_features, cfg.mask_separation.value(),
                    cfg.mask_hole_diameter.value());
                const DetectorSpec det{0.0, cfg.reference_aperture, cfg.reference_efficiency,
                                       0.0};
                double coh_width = 0.0;
                if (cfg.coherence_width) {
                    coh_width = *cfg.coherence_width;
                } else if (cfg.source_diameter && cfg.wavelength) {
                    coh_width = transverse_coherence_width(*cfg.source_diameter, *cfg.wavelength,
                                                           geo.z1);
                }
                const auto curve = ideal_ghost_curve(geo, mask, cfg.mask_features, det, coh_width,
                                                     cfg.scan_position_list());
                const std::string path = out_prefix + "_ideal_curve.csv";
                std::ofstream os(path);
                write_header_block(os, cfg);
                os << "position_mm,value\n";
                os.precision(17);
                for (const auto& [x, v] : curve) os << x * 1e3 << "," << v << "\n";
                log << "wrote " << path << "\n";
                break;
            }
            case Scenario::Selftest: {
                if (!run_selftest(log)) return 3;
                break;
            }
        }
    } catch (const ConfigError& e) {
        log << "error: " << scenario_name(scenario) << ": config: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateDataError& e) {
        log << "error: " << scenario_name(scenario) << ": insufficient-statistics: " << e.what()
            << "\n";
        return 4;
    } catch (const InsufficientBaselineError& e) {
        log << "error: " << scenario_name(scenario) << ": insufficient-statistics: " << e.what()
            << "\n";
        return 4;
    } catch (const std::exception& e) {
        log << "error: " << scenario_name(scenario) << ": " << e.what() << "\n";
        return 3;
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out_prefix + "_manifest.txt", cfg, wall);
    return 0;
}

bool run_selftest(std::ostream& log) {
    bool all_ok = true;
    auto check = [&](const char* name, bool ok) {
        log << (ok ? "PASS " : "FAIL ") << name << "\n";
        all_ok = all_ok && ok;
    };

    // Gaussian-beam width after propagation vs the closed form.
    {
        const double lambda = 780e-9, w0 = 0.2e-3, z = 0.5;
        const Grid1D grid = make_grid(4096, 5e-6, 0.0);
        SampledField beam;
        beam.grid = grid;
        beam.wavelength = lambda;
        beam.amplitude.resize(static_cast<std::size_t>(grid.n_points));
        for (int i = 0; i < grid.n_points; ++i) {
            const double x = grid.coord(i);
            beam.amplitude[i] = std::exp(-x * x / (w0 * w0));
        }
        const SampledField out = propagate(beam, z);
        double p = 0.0, pxx = 0.0;
        for (int i = 0; i < grid.n_points; ++i) {
            const double I = std::norm(out.amplitude[i]);
            p += I;
            pxx += I * grid.coord(i) * grid.coord(i);
        }
        const double w_meas = 2.0 * std::sqrt(pxx / p);  // 1/e^2 intensity radius
        const double zr = std::numbers::pi * w0 * w0 / lambda;
        const double w_expect = w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
        check("gaussian-beam-width", std::abs(w_meas / w_expect - 1.0) < 1e-3);
        check("propagation-energy", std::abs(out.energy() / beam.energy() - 1.0) < 1e-10);
    }

    // Exponential-intensity moments: g2 of I1 = I2 = Exp(1) is 2.
    {
        rng::Counter gen(0xABCDEF);
        std::vector<std::pair<double, double>> pairs;
        pairs.reserve(100000);
        for (int i = 0; i < 100000; ++i) {
            const double v = gen.next_exponential(1.0);
            pairs.emplace_back(v, v);
        }
        const G2Estimate est = g2_from_pairs(pairs);
        check("exponential-moments-g2", std::abs(est.value - 2.0) < 5.0 * est.std_error &&
                                            std::abs(est.value - 2.0) < 0.1);
    }

    // Poisson counts from a constant trace.
    {
        IntensityTrace trace;
        trace.dt = 1e-4;
        trace.values.assign(10000, 1000.0);  // rate 1 kHz over 1 s
        double sum = 0.0, sum2 = 0.0;
        const int reps = 50;
        for (int r = 0; r < reps; ++r) {
            const auto n = static_cast<double>(
                sample_photons(trace, 1.0, rng::derive_key(0x5EED, static_cast<std::uint64_t>(r)))
                    .timestamps.size());
            sum += n;
            sum2 += n * n;
        }
        const double mean = sum / reps;
        const double expected = 1000.0;
        check("poisson-counts", std::abs(mean - expected) < 3.0 * std::sqrt(expected / reps));
    }

    // Siegert: g2 - 1 equals |g1|^2 for the thermal frame ensemble.
    {
        const Grid1D grid = make_grid(64, 2e-5, 0.0);
        SourceSpec src{0.8e-3, 780e-9, 0.2e-9, 3e5};
        const int frames = 20000;
        const int ia = 30, ib = 33;
        std::complex<double> e_cross{0.0, 0.0};
        PairMoments mom;
        for (int k = 0; k < frames; ++k) {
            const SampledField f =
                generate_source_frame(src, grid, {0x51E6E47, static_cast<std::uint64_t>(k)});
            const auto a = f.amplitude[ia], b = f.amplitude[ib];
            e_cross += a * std::conj(b);
            mom.add(std::norm(a), std::norm(b));
        }
        const double i1 = mom.sum1 / frames, i2 = mom.sum2 / frames;
        const double g1sq = std::norm(e_cross / static_cast<double>(frames)) / (i1 * i2);
        const double g2 = (mom.sum12 / frames) / (i1 * i2);
        check("siegert", std::abs((g2 - 1.0) - g1sq) < 0.06);
    }

    return all_ok;
}

}  // namespace gsim
