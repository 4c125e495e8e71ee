#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gsim/detection.hpp"

namespace gsim {

struct G2Estimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
};

// Counts of start-stop delays with fixed bin width (the MCA output).
struct CoincidenceHistogram {
    double bin_width = 0.0;  // s
    double tau_min = 0.0;    // s
    double tau_max = 0.0;    // s
    std::vector<long long> counts;
    long long n_starts = 0;

    int n_bins() const { return static_cast<int>(counts.size()); }
    double bin_center(int i) const { return tau_min + (i + 0.5) * bin_width; }
    long long total() const;
};

struct GaussianFit {
    double amplitude = 0.0;
    double center = 0.0;  // s
    double fwhm = 0.0;    // s
    double baseline = 0.0;
    double residual_norm = 0.0;      // sqrt(sum of squared residuals)
    double amplitude_std_error = 0.0;
};

// Mergeable second-moment accumulator for intensity pairs. Merging is
// component-wise addition, so partial accumulations combine associatively
// and commutatively; the final estimate is independent of partitioning.
struct PairMoments {
    long n = 0;
    double sum1 = 0.0;
    double sum2 = 0.0;
    double sum12 = 0.0;

    void add(double i1, double i2) {
        ++n;
        sum1 += i1;
        sum2 += i2;
        sum12 += i1 * i2;
    }
    void merge(const PairMoments& o) {
        n += o.n;
        sum1 += o.sum1;
        sum2 += o.sum2;
        sum12 += o.sum12;
    }
};

// <I1 I2> / (<I1><I2>) with leave-one-block-out jackknife standard error.
// Each PairMoments is one jackknife block.
G2Estimate g2_from_blocks(const std::vector<PairMoments>& blocks);

// Convenience: groups samples into blocks of 100 and calls g2_from_blocks.
G2Estimate g2_from_pairs(const std::vector<std::pair<double, double>>& samples);

enum class TacMode {
    // Classic TAC: each start converts against the first stop whose delay
    // falls in range; the TAC is busy until that conversion finishes.
    FirstStop,
    // Every (start, stop) pair with delay in range; cross-check mode.
    AllPairs,
};

CoincidenceHistogram tac_histogram(const PhotonStream& starts, const PhotonStream& stops,
                                   double tau_min, double tau_max, double bin_width,
                                   TacMode mode = TacMode::FirstStop);

// Mean per-bin count in |tau| <= peak_halfwidth divided by the mean per-bin
// count in |tau| >= baseline_exclusion, with propagated Poisson errors.
G2Estimate g2_zero_from_histogram(const CoincidenceHistogram& h, double peak_halfwidth,
                                  double baseline_exclusion);

// Least-squares fit of baseline + amplitude*exp(-(tau-center)^2/(2 sigma^2))
// by damped Gauss-Newton with moment-based initialization. FWHM = 2.3548*sigma.
// Throws NoPeakError if the fitted amplitude is not positive at 3 sigma.
GaussianFit fit_gaussian_peak(const CoincidenceHistogram& h);

// Inverts excess = tau0 * h(0) for a Gaussian jitter kernel h of the given
// combined FWHM, with the unit-area lineshape exp(-2|tau|/tau0):
// tau0 = excess * sigma * sqrt(2 pi).
double coherence_time_from_excess(double g2_zero_excess, double combined_jitter_fwhm);

// Same inversion under a Gaussian lineshape exp(-tau^2/tau0^2) (area
// tau0*sqrt(pi)): tau0 = excess * sigma * sqrt(2).
double coherence_time_from_excess_gaussian(double g2_zero_excess, double combined_jitter_fwhm);

// (max - min) / (max + min) of the curve values.
double visibility(const std::vector<std::pair<double, double>>& curve);

}  // namespace gsim
