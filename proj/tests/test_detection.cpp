#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "gsim/detection.hpp"
#include "gsim/errors.hpp"
#include "gsim/field.hpp"
#include "gsim/rng.hpp"

using namespace gsim;

namespace {

SampledField flat_field(const Grid1D& grid) {
    SampledField f;
    f.grid = grid;
    f.wavelength = 780e-9;
    f.amplitude.assign(static_cast<std::size_t>(grid.n_points), {1.0, 0.0});
    return f;
}

double autocorr_g2(const IntensityTrace& tr, int lag) {
    const auto n = static_cast<int>(tr.values.size());
    double s12 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int i = 0; i + lag < n; ++i) {
        s12 += tr.values[i] * tr.values[i + lag];
        s1 += tr.values[i];
        s2 += tr.values[i + lag];
    }
    const double m = static_cast<double>(n - lag);
    return (s12 / m) / ((s1 / m) * (s2 / m));
}

}  // namespace

TEST_CASE("integrate_intensity: flat field, centered and offset apertures") {
    const Grid1D grid = make_grid(1024, 10e-6, 0.0);
    const SampledField f = flat_field(grid);

    // |E|^2 = 1 everywhere, so the integral is the covered width.
    DetectorSpec det{0.0, 2e-3, 1.0, 0.0};
    CHECK(integrate_intensity(f, det) == doctest::Approx(2e-3).epsilon(0.01));

    det.efficiency = 0.25;
    CHECK(integrate_intensity(f, det) == doctest::Approx(0.5e-3).epsilon(0.01));

    det = DetectorSpec{3e-3, 2e-3, 1.0, 0.0};
    CHECK(integrate_intensity(f, det) == doctest::Approx(2e-3).epsilon(0.01));

    // aperture fully outside the 10.24 mm span
    det = DetectorSpec{20e-3, 2e-3, 1.0, 0.0};
    CHECK_THROWS_AS(integrate_intensity(f, det), GeometryError);
}

TEST_CASE("bucket_detect is efficiency times total energy") {
    const Grid1D grid = make_grid(512, 10e-6, 0.0);
    const SampledField f = flat_field(grid);
    CHECK(bucket_detect(f, 1.0) == doctest::Approx(f.energy()));
    CHECK(bucket_detect(f, 0.3) == doctest::Approx(0.3 * f.energy()));
}

TEST_CASE("DetectorSpec validation") {
    CHECK_NOTHROW(DetectorSpec{0.0, 2e-3, 0.5, 1e-9}.validate());
    CHECK_THROWS_AS((DetectorSpec{0.0, 0.0, 0.5, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DetectorSpec{0.0, 2e-3, 0.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DetectorSpec{0.0, 2e-3, 1.5, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((DetectorSpec{0.0, 2e-3, 0.5, -1e-9}.validate()), std::invalid_argument);
}

TEST_CASE("synthesized thermal trace: mean rate and bunching autocorrelation") {
    const double tau0 = 1e-6, rate = 1e4;
    const double dt = tau0 / 20.0;
    const double duration = 4000.0 * tau0;
    const IntensityTrace tr = synthesize_intensity_trace(tau0, rate, duration, dt, 31);

    // N_modes ~ duration/tau0 = 4000, so the mean is known to ~ rate/sqrt(4000)
    CHECK(std::abs(tr.mean() / rate - 1.0) < 0.1);

    // g2(tau) = 1 + exp(-2 tau / tau0)
    const int per_tau0 = 20;
    CHECK(autocorr_g2(tr, 0) == doctest::Approx(2.0).epsilon(0.07));
    CHECK(autocorr_g2(tr, per_tau0) == doctest::Approx(1.0 + std::exp(-2.0)).epsilon(0.07));
    CHECK(autocorr_g2(tr, 3 * per_tau0) == doctest::Approx(1.0 + std::exp(-6.0)).epsilon(0.07));

    CHECK(synthesize_intensity_trace(tau0, rate, duration, dt, 31).values == tr.values);
    CHECK(synthesize_intensity_trace(tau0, rate, duration, dt, 32).values != tr.values);

    // preconditions: dt <= tau0/10, duration >= 100*tau0
    CHECK_THROWS_AS(synthesize_intensity_trace(tau0, rate, duration, tau0 / 5.0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(synthesize_intensity_trace(tau0, rate, 50.0 * tau0, dt, 1),
                    std::invalid_argument);
}

TEST_CASE("sample_photons: Poisson statistics on a constant trace") {
    IntensityTrace tr;
    tr.dt = 1e-5;
    tr.values.assign(200000, 5000.0);  // mean count 0.05/bin, 10000 expected total

    const PhotonStream s = sample_photons(tr, 1.0, 77);
    const double expected = 5000.0 * tr.duration();
    const auto n = static_cast<double>(s.timestamps.size());
    CHECK(std::abs(n - expected) < 4.0 * std::sqrt(expected));
    CHECK(s.duration == doctest::Approx(tr.duration()));
    CHECK(std::is_sorted(s.timestamps.begin(), s.timestamps.end()));
    for (double t : s.timestamps) {
        CHECK(t >= 0.0);
        CHECK(t <= tr.duration());
    }

    // efficiency scales the rate
    const PhotonStream half = sample_photons(tr, 0.5, 77);
    CHECK(std::abs(static_cast<double>(half.timestamps.size()) - expected / 2.0) <
          4.0 * std::sqrt(expected / 2.0));

    // variance check over independent reruns: Fano factor of a Poisson is 1
    const int reps = 100;
    IntensityTrace small;
    small.dt = 1e-5;
    small.values.assign(2000, 5000.0);  // 100 expected per rep
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        const auto c = static_cast<double>(
            sample_photons(small, 1.0, 1000 + static_cast<std::uint64_t>(r)).timestamps.size());
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / reps;
    const double var = sum2 / reps - mean * mean;
    CHECK(std::abs(mean - 100.0) < 4.0);           // se = sqrt(100/reps) = 1
    CHECK(std::abs(var / mean - 1.0) < 0.75);      // se of Fano ~ sqrt(2/reps) ~ 0.14

    // precondition: peak rate * dt <= 0.1
    IntensityTrace hot;
    hot.dt = 1e-4;
    hot.values.assign(2000, 5000.0);
    CHECK_THROWS_AS(sample_photons(hot, 1.0, 1), std::invalid_argument);
}

TEST_CASE("apply_jitter: count preserved, sorted, correct spread") {
    PhotonStream s;
    s.duration = 1.0;
    for (int i = 0; i < 20000; ++i) s.timestamps.push_back(i * 5e-5);

    const double fwhm = 2e-6;
    const PhotonStream j = apply_jitter(s, fwhm, 9);
    REQUIRE(j.timestamps.size() == s.timestamps.size());
    CHECK(std::is_sorted(j.timestamps.begin(), j.timestamps.end()));

    // offsets are Gaussian with sigma = fwhm/2.3548 (spacing >> fwhm, so the
    // i-th jittered timestamp still corresponds to the i-th input)
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < s.timestamps.size(); ++i) {
        const double d = j.timestamps[i] - s.timestamps[i];
        sum += d;
        sum2 += d * d;
    }
    const auto n = static_cast<double>(s.timestamps.size());
    const double sigma = fwhm / 2.3548200450309493;
    CHECK(std::abs(sum / n) < 5.0 * sigma / std::sqrt(n));
    CHECK(std::sqrt(sum2 / n) == doctest::Approx(sigma).epsilon(0.03));

    CHECK(apply_jitter(s, 0.0, 9).timestamps == s.timestamps);
}

TEST_CASE("event-driven pair sampler matches the thermal model") {
    const double tau0 = 1e-6, r1 = 2e4, r2 = 2e4, duration = 5.0;
    const auto [a, b] = sample_thermal_stream_pair(tau0, r1, r2, duration, 4242);

    // mean counts: thermal fluctuations over 5e6 coherence times are tiny
    CHECK(std::abs(static_cast<double>(a.timestamps.size()) / (r1 * duration) - 1.0) < 0.05);
    CHECK(std::abs(static_cast<double>(b.timestamps.size()) / (r2 * duration) - 1.0) < 0.05);
    CHECK(std::is_sorted(a.timestamps.begin(), a.timestamps.end()));
    CHECK(std::is_sorted(b.timestamps.begin(), b.timestamps.end()));
    CHECK(a.duration == doctest::Approx(duration));

    // binned cross-correlation at zero lag with dt = tau0:
    // g2_bin = 1 + (tau0/dt)^2 * (dt*tau0 - tau0^2 (1 - e^{-2 dt/tau0})/2) / tau0^2
    const double dt = tau0;
    const auto nbins = static_cast<std::size_t>(duration / dt);
    std::vector<int> na(nbins, 0), nb(nbins, 0);
    for (double t : a.timestamps) {
        const auto k = static_cast<std::size_t>(t / dt);
        if (k < nbins) ++na[k];
    }
    for (double t : b.timestamps) {
        const auto k = static_cast<std::size_t>(t / dt);
        if (k < nbins) ++nb[k];
    }
    double s1 = 0.0, s2 = 0.0, s12 = 0.0;
    for (std::size_t k = 0; k < nbins; ++k) {
        s1 += na[k];
        s2 += nb[k];
        s12 += static_cast<double>(na[k]) * nb[k];
    }
    const double m = static_cast<double>(nbins);
    const double g2_bin = (s12 / m) / ((s1 / m) * (s2 / m));
    const double expected =
        1.0 + (dt * tau0 - tau0 * tau0 * (1.0 - std::exp(-2.0 * dt / tau0)) / 2.0) / (dt * dt);
    CHECK(g2_bin == doctest::Approx(expected).epsilon(0.05));

    // determinism
    const auto [c, d] = sample_thermal_stream_pair(tau0, r1, r2, duration, 4242);
    CHECK(c.timestamps == a.timestamps);
    CHECK(d.timestamps == b.timestamps);

    CHECK_THROWS_AS(sample_thermal_stream_pair(0.0, r1, r2, duration, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_thermal_stream_pair(tau0, -1.0, r2, duration, 1),
                    std::invalid_argument);
}

TEST_CASE("photon stream serialization round trip") {
    PhotonStream s;
    s.duration = 0.125;
    s.timestamps = {1.25e-9, 3.5e-7, 0.0625, 0.1};

    std::ostringstream os;
    write_photon_stream(os, s, 99);
    std::istringstream is(os.str());
    const PhotonStream back = read_photon_stream(is);
    CHECK(back.duration == doctest::Approx(s.duration));
    REQUIRE(back.timestamps.size() == s.timestamps.size());
    for (std::size_t i = 0; i < s.timestamps.size(); ++i) {
        CHECK(back.timestamps[i] == doctest::Approx(s.timestamps[i]).epsilon(1e-14));
    }
}
