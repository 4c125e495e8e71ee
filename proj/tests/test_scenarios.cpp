#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gsim/errors.hpp"
#include "gsim/scenarios.hpp"

using namespace gsim;

namespace {

// bench layout used throughout: source->splitter 0, reference plane at z1,
// lens at z2, mask at z2+z3
const BenchGeometry kBench{1.80, 1.475, 0.124, 0.20};
constexpr double kLambda = 780e-9;

}  // namespace

TEST_CASE("predicted_magnification") {
    CHECK(predicted_magnification(kBench) == doctest::Approx(2.6210).epsilon(1e-4));
    CHECK(predicted_magnification({1.0, 0.5, 0.25, 0.2}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(predicted_magnification({1.0, 0.5, 0.0, 0.2}), std::invalid_argument);
}

TEST_CASE("suggested_temporal_modes") {
    CHECK(suggested_temporal_modes(0.25e-9, 1.3e-9, 0.2e-9) == doctest::Approx(9.0));
    // never below one mode
    CHECK(suggested_temporal_modes(0.25e-9, 1.3e-9, 1.0e-6) == doctest::Approx(1.0));
    CHECK_THROWS_AS(suggested_temporal_modes(0.0, 1.3e-9, 0.2e-9), std::invalid_argument);
    CHECK_THROWS_AS(suggested_temporal_modes(0.25e-9, 1.3e-9, 0.0), std::invalid_argument);
}

TEST_CASE("transverse_coherence_width") {
    CHECK(transverse_coherence_width(1e-3, kLambda, 1.80) ==
          doctest::Approx(0.88589 * kLambda * 1.80 / 1e-3));
    // scales as z/D
    CHECK(transverse_coherence_width(2e-3, kLambda, 1.80) ==
          doctest::Approx(0.5 * transverse_coherence_width(1e-3, kLambda, 1.80)));
    CHECK_THROWS_AS(transverse_coherence_width(0.0, kLambda, 1.0), std::invalid_argument);
}

TEST_CASE("ideal_ghost_curve: zero-width detector reproduces the magnified mask") {
    const MaskSpec mask = double_pinhole(1.3e-3, 0.5e-3);
    DetectorSpec det{0.0, 0.0, 1.0, 0.0};

    const double peak = 1.3e-3 / 2.0 * predicted_magnification(kBench);  // 1.7036 mm
    const std::vector<double> xs{-3e-3, -peak, -1e-3, 0.0, 1e-3, peak, 3e-3};
    const auto curve = ideal_ghost_curve(kBench, mask, 2, det, 0.0, xs);
    REQUIRE(curve.size() == xs.size());

    CHECK(peak == doctest::Approx(1.7036e-3).epsilon(1e-3));
    // on a pinhole image: N + 1 = 3; elsewhere: N = 2
    CHECK(curve[1].second == doctest::Approx(3.0));
    CHECK(curve[5].second == doctest::Approx(3.0));
    for (std::size_t i : {0u, 2u, 3u, 4u, 6u}) CHECK(curve[i].second == doctest::Approx(2.0));
}

TEST_CASE("ideal_ghost_curve: aperture smoothing is a trapezoid") {
    const MaskSpec mask = double_pinhole(1.3e-3, 0.5e-3);
    const double mag = predicted_magnification(kBench);
    const double a = 2e-3;              // detector aperture
    const double b = 0.5e-3 * mag;      // pinhole image width, 1.3105 mm
    const double center = 1.3e-3 / 2.0 * mag;
    DetectorSpec det{0.0, a, 1.0, 0.0};

    // closed form: N + (1/a) * overlap(top-hat a, top-hat b at offset d)
    auto expect = [&](double x) {
        const double d = std::abs(x - center);
        const double overlap = std::clamp((a + b) / 2.0 - d, 0.0, std::min(a, b));
        return 2.0 + overlap / a;
    };
    std::vector<double> xs;
    for (double d : {0.0, 0.4e-3, 1.0e-3, 1.5e-3, 2.0e-3}) xs.push_back(center + d);
    const auto curve = ideal_ghost_curve(kBench, mask, 2, det, 0.0, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(curve[i].second == doctest::Approx(expect(xs[i])).epsilon(0.005));
    }
    // FWHM of the trapezoid is max(a, b): half maximum at +/- max(a,b)/2
    const auto half = ideal_ghost_curve(kBench, mask, 2, det, 0.0,
                                        {center - a / 2.0, center, center + a / 2.0});
    CHECK(half[0].second - 2.0 == doctest::Approx(0.5 * (half[1].second - 2.0)).epsilon(0.01));
    CHECK(half[2].second - 2.0 == doctest::Approx(0.5 * (half[1].second - 2.0)).epsilon(0.01));
}

TEST_CASE("ideal_ghost_curve: flat for a closed mask, argument checks") {
    MaskSpec closed;
    closed.transmission = [](double) { return 0.0; };
    DetectorSpec det{0.0, 2e-3, 1.0, 0.0};
    const auto curve = ideal_ghost_curve(kBench, closed, 3, det, 0.5e-3, {-1e-3, 0.0, 1e-3});
    for (const auto& [x, v] : curve) CHECK(v == doctest::Approx(3.0));

    const MaskSpec dp = double_pinhole(1.3e-3, 0.5e-3);
    CHECK_THROWS_AS(ideal_ghost_curve(kBench, dp, 5, det, 0.0, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ideal_ghost_curve(kBench, dp, 2, det, 0.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(ideal_ghost_curve({1.0, 1.0, 0.3, 0.2}, dp, 2, det, 0.0, {0.0}),
                    GeometryError);
}

TEST_CASE("run_hbt: bunching peak on a slow thermal source") {
    HbtConfig cfg;
    cfg.source = SourceSpec{1e-3, kLambda, 1e-6, 2e3};
    cfg.detector1 = DetectorSpec{0.0, 2e-3, 1.0, 0.0};
    cfg.detector2 = DetectorSpec{0.0, 2e-3, 1.0, 0.0};
    cfg.tac_min = -10e-6;
    cfg.tac_max = 10e-6;
    cfg.tac_bin = 0.05e-6;
    cfg.integration_time = 100.0;
    cfg.master_seed = 2024;

    const HbtAnalysisWindows win{0.25e-6, 5e-6};
    const HbtResult res = run_hbt(cfg, win);

    // mean count rates
    CHECK(std::abs(static_cast<double>(res.n_start_counts) / 2e5 - 1.0) < 0.05);
    CHECK(std::abs(static_cast<double>(res.n_stop_counts) / 2e5 - 1.0) < 0.05);

    // g2(tau) = 1 + exp(-2|tau|/tau0) averaged over |tau| <= 0.25 tau0:
    // 1 + (tau0/0.5us)(1 - e^-0.5) = 1.7869
    CHECK(res.g2_zero.value == doctest::Approx(1.787).epsilon(0.08));
    CHECK(res.g2_zero.std_error > 0.0);
    CHECK(res.fit.amplitude > 0.0);
    CHECK(std::abs(res.fit.center) < 0.3e-6);
    // no jitter: the inversion is disabled
    CHECK(res.coherence_time_estimate == 0.0);

    // too short an integration time is rejected
    HbtConfig bad = cfg;
    bad.integration_time = 1e-3;
    CHECK_THROWS_AS(run_hbt(bad, win), std::invalid_argument);
}

TEST_CASE("run_ghost: structure, dilution, and thread-count invariance") {
    GhostConfig cfg;
    cfg.source = SourceSpec{1e-3, kLambda, 0.2e-9, 3e5};
    cfg.geometry = kBench;
    cfg.mask = double_pinhole(1.3e-3, 0.5e-3);
    cfg.reference = DetectorSpec{0.0, 2e-3, 1.0, 0.0};
    cfg.scan_positions = {-1.75e-3, -0.9e-3, 0.0, 0.9e-3, 1.75e-3};
    cfg.frames_per_position = 120;
    cfg.temporal_modes = 1.0;
    cfg.master_seed = 7;
    cfg.grid = make_grid(1024, 5e-6, 0.0);

    const GhostScan one = run_ghost(cfg, 1);
    REQUIRE(one.positions == cfg.scan_positions);
    REQUIRE(one.g2.size() == cfg.scan_positions.size());
    REQUIRE(one.g2_raw.size() == cfg.scan_positions.size());
    CHECK(one.lens_check_warning.empty());

    // result is independent of the worker count, bit for bit
    const GhostScan four = run_ghost(cfg, 4);
    for (std::size_t p = 0; p < one.g2.size(); ++p) {
        CHECK(four.g2[p].value == one.g2[p].value);
        CHECK(four.g2[p].std_error == one.g2[p].std_error);
        CHECK(four.g2_raw[p].value == one.g2_raw[p].value);
    }
    CHECK(four.visibility == one.visibility);

    // M > 1 rescales the excess of every point and leaves the raw curve alone
    GhostConfig diluted_cfg = cfg;
    diluted_cfg.temporal_modes = 4.0;
    const GhostScan diluted = run_ghost(diluted_cfg, 2);
    for (std::size_t p = 0; p < one.g2.size(); ++p) {
        CHECK(diluted.g2_raw[p].value == one.g2_raw[p].value);
        CHECK(diluted.g2[p].value ==
              doctest::Approx(1.0 + (one.g2_raw[p].value - 1.0) / 4.0).epsilon(1e-12));
    }

    // a geometry violating the lens equation by more than 1% gets flagged
    GhostConfig off = cfg;
    off.geometry.z3 = 0.20;
    const GhostScan warned = run_ghost(off, 2);
    CHECK(!warned.lens_check_warning.empty());

    GhostConfig bad = cfg;
    bad.frames_per_position = 50;
    CHECK_THROWS_AS(run_ghost(bad, 1), std::invalid_argument);
    bad = cfg;
    bad.scan_positions = {1e-3, 1e-3};
    CHECK_THROWS_AS(run_ghost(bad, 1), std::invalid_argument);
}

TEST_CASE("run_ghost: correlation peaks sit on the magnified pinhole images") {
    GhostConfig cfg;
    cfg.source = SourceSpec{1e-3, kLambda, 0.2e-9, 3e5};
    cfg.geometry = kBench;
    cfg.mask = double_pinhole(1.3e-3, 0.5e-3);
    cfg.reference = DetectorSpec{0.0, 0.5e-3, 1.0, 0.0};
    for (double x = -2.75e-3; x <= 2.75e-3 + 1e-9; x += 0.5e-3) cfg.scan_positions.push_back(x);
    cfg.frames_per_position = 600;
    cfg.temporal_modes = 1.0;
    cfg.master_seed = 99;
    cfg.grid = make_grid(2048, 5e-6, 0.0);

    const GhostScan scan = run_ghost(cfg, 4);

    // excess on a pinhole image should dominate the center of the scan
    double on_peak = 0.0, center = 0.0;
    for (std::size_t p = 0; p < scan.positions.size(); ++p) {
        const double x = scan.positions[p];
        if (std::abs(std::abs(x) - 1.75e-3) < 1e-6) on_peak += (scan.g2[p].value - 1.0) / 2.0;
        if (std::abs(x) < 1e-6) center = scan.g2[p].value - 1.0;
    }
    CHECK(on_peak > 0.01);
    CHECK(on_peak > 3.0 * center + 0.005);

    REQUIRE(scan.peak_positions.size() == 2);
    const double expected = 1.7036e-3;
    CHECK(scan.peak_positions[0] == doctest::Approx(-expected).epsilon(0.25));
    CHECK(scan.peak_positions[1] == doctest::Approx(expected).epsilon(0.25));
    CHECK(scan.visibility > 0.0);
}
