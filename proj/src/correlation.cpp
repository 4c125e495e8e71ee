#include "gsim/correlation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gsim/errors.hpp"

namespace gsim {

namespace {

constexpr double kFwhmToSigma = 1.0 / 2.3548200450309493;

double ratio_estimate(const PairMoments& m) {
    const double mean1 = m.sum1 / static_cast<double>(m.n);
    const double mean2 = m.sum2 / static_cast<double>(m.n);
    if (mean1 == 0.0 || mean2 == 0.0) {
        throw DegenerateDataError("g2: one of the mean intensities is zero");
    }
    return (m.sum12 / static_cast<double>(m.n)) / (mean1 * mean2);
}

// Solve A x = b for a small dense system, Gaussian elimination with
// partial pivoting. A is row-major n x n, modified in place.
bool solve_dense(std::vector<double>& A, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(A[r * n + col]) > std::abs(A[pivot * n + col])) pivot = r;
        }
        if (A[pivot * n + col] == 0.0) return false;
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(A[col * n + c], A[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double factor = A[r * n + col] / A[col * n + col];
            for (int c = col; c < n; ++c) A[r * n + c] -= factor * A[col * n + c];
            b[r] -= factor * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * b[c];
        b[r] = s / A[r * n + r];
    }
    return true;
}

}  // namespace

long long CoincidenceHistogram::total() const {
    long long s = 0;
    for (long long c : counts) s += c;
    return s;
}

G2Estimate g2_from_blocks(const std::vector<PairMoments>& blocks) {
    PairMoments all;
    for (const auto& b : blocks) all.merge(b);
    if (all.n < 2) throw std::invalid_argument("g2: need at least 2 samples");

    G2Estimate est;
    est.value = ratio_estimate(all);
    est.n_samples = all.n;

    const auto nb = static_cast<long>(blocks.size());
    if (nb < 2) {
        est.std_error = 0.0;
        return est;
    }
    // Leave-one-block-out jackknife.
    std::vector<double> theta;
    theta.reserve(blocks.size());
    for (const auto& b : blocks) {
        if (b.n == all.n) continue;  // cannot leave out everything
        PairMoments rest = all;
        rest.n -= b.n;
        rest.sum1 -= b.sum1;
        rest.sum2 -= b.sum2;
        rest.sum12 -= b.sum12;
        theta.push_back(ratio_estimate(rest));
    }
    const auto k = static_cast<double>(theta.size());
    if (k < 2) {
        est.std_error = 0.0;
        return est;
    }
    double mean = 0.0;
    for (double t : theta) mean += t;
    mean /= k;
    double var = 0.0;
    for (double t : theta) var += (t - mean) * (t - mean);
    est.std_error = std::sqrt((k - 1.0) / k * var);
    return est;
}

G2Estimate g2_from_pairs(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("g2_from_pairs: need at least 2 samples");
    constexpr std::size_t kBlock = 100;
    std::vector<PairMoments> blocks;
    blocks.reserve(samples.size() / kBlock + 1);
    PairMoments cur;
    for (const auto& [i1, i2] : samples) {
        cur.add(i1, i2);
        if (cur.n == kBlock) {
            blocks.push_back(cur);
            cur = PairMoments{};
        }
    }
    if (cur.n > 0) blocks.push_back(cur);
    return g2_from_blocks(blocks);
}

CoincidenceHistogram tac_histogram(const PhotonStream& starts, const PhotonStream& stops,
                                   double tau_min, double tau_max, double bin_width,
                                   TacMode mode) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("tac_histogram: bin_width must be > 0");
    if (!(tau_min < tau_max)) throw std::invalid_argument("tac_histogram: empty range");

    CoincidenceHistogram h;
    h.bin_width = bin_width;
    h.tau_min = tau_min;
    h.tau_max = tau_max;
    h.n_starts = static_cast<long long>(starts.timestamps.size());
    const int nbins = static_cast<int>(std::ceil((tau_max - tau_min) / bin_width));
    h.counts.assign(static_cast<std::size_t>(nbins), 0);

    auto record = [&](double delay) {
        const int bin = static_cast<int>(std::floor((delay - tau_min) / bin_width));
        if (bin >= 0 && bin < nbins) ++h.counts[static_cast<std::size_t>(bin)];
    };

    const auto& ts = starts.timestamps;
    const auto& tp = stops.timestamps;
    if (mode == TacMode::AllPairs) {
        std::size_t lo = 0;
        for (double s : ts) {
            while (lo < tp.size() && tp[lo] < s + tau_min) ++lo;
            for (std::size_t j = lo; j < tp.size() && tp[j] - s < tau_max; ++j) record(tp[j] - s);
        }
        return h;
    }

    // FirstStop: busy until the conversion (or the range timeout) completes.
    std::size_t j = 0;
    double busy_until = -std::numeric_limits<double>::infinity();
    for (double s : ts) {
        if (s < busy_until) continue;
        while (j < tp.size() && tp[j] < s + tau_min) ++j;
        if (j >= tp.size()) break;
        const double delay = tp[j] - s;
        if (delay < tau_max) {
            record(delay);
            busy_until = tp[j];
            ++j;  // the stop is consumed by this conversion
        } else {
            busy_until = s + tau_max;  // ramp ran out without a stop
        }
    }
    return h;
}

G2Estimate g2_zero_from_histogram(const CoincidenceHistogram& h, double peak_halfwidth,
                                  double baseline_exclusion) {
    if (!(peak_halfwidth > 0.0))
        throw std::invalid_argument("g2_zero_from_histogram: peak_halfwidth must be > 0");
    if (!(baseline_exclusion > peak_halfwidth))
        throw std::invalid_argument(
            "g2_zero_from_histogram: baseline_exclusion must exceed peak_halfwidth");

    long long peak_sum = 0, base_sum = 0;
    int peak_bins = 0, base_lo = 0, base_hi = 0;
    for (int i = 0; i < h.n_bins(); ++i) {
        const double tau = h.bin_center(i);
        if (std::abs(tau) <= peak_halfwidth) {
            peak_sum += h.counts[static_cast<std::size_t>(i)];
            ++peak_bins;
        } else if (std::abs(tau) >= baseline_exclusion) {
            base_sum += h.counts[static_cast<std::size_t>(i)];
            (tau < 0.0 ? base_lo : base_hi)++;
        }
    }
    if (base_lo == 0 || base_hi == 0) {
        throw InsufficientBaselineError(
            "g2_zero_from_histogram: need baseline bins beyond the exclusion on both sides");
    }
    if (peak_bins == 0)
        throw std::invalid_argument("g2_zero_from_histogram: no bins inside the peak window");
    if (base_sum == 0)
        throw DegenerateDataError("g2_zero_from_histogram: empty baseline");

    const double peak_mean = static_cast<double>(peak_sum) / peak_bins;
    const double base_mean = static_cast<double>(base_sum) / (base_lo + base_hi);
    G2Estimate est;
    est.value = peak_mean / base_mean;
    est.n_samples = peak_sum;
    // Poisson counting errors on both windows.
    const double rel2 = (peak_sum > 0 ? 1.0 / static_cast<double>(peak_sum) : 0.0) +
                        1.0 / static_cast<double>(base_sum);
    est.std_error = est.value * std::sqrt(rel2);
    return est;
}

GaussianFit fit_gaussian_peak(const CoincidenceHistogram& h) {
    const int n = h.n_bins();
    if (n < 5) throw std::invalid_argument("fit_gaussian_peak: too few bins");

    double cmin = static_cast<double>(h.counts[0]);
    double cmax = cmin;
    for (int i = 0; i < n; ++i) {
        const auto c = static_cast<double>(h.counts[static_cast<std::size_t>(i)]);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    if (cmax == cmin) throw NoPeakError("fit_gaussian_peak: histogram is constant");

    // Initial guess robust against counting noise: locate the peak on a
    // moving-average smoothed copy so a single noisy bin cannot seed the
    // fit, take the baseline from the outer bins, and the width from the
    // half-maximum crossing. The refinement below runs on the raw counts.
    const int half_window = std::max(1, n / 40);
    std::vector<double> smooth(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        int m = 0;
        for (int j = std::max(0, i - half_window); j <= std::min(n - 1, i + half_window); ++j) {
            s += static_cast<double>(h.counts[static_cast<std::size_t>(j)]);
            ++m;
        }
        smooth[static_cast<std::size_t>(i)] = s / m;
    }
    int ismooth = 0;
    for (int i = 1; i < n; ++i) {
        if (smooth[static_cast<std::size_t>(i)] > smooth[static_cast<std::size_t>(ismooth)])
            ismooth = i;
    }
    const int edge = std::max(1, n / 10);
    double base0 = 0.0;
    for (int i = 0; i < edge; ++i) {
        base0 += smooth[static_cast<std::size_t>(i)] + smooth[static_cast<std::size_t>(n - 1 - i)];
    }
    base0 /= 2.0 * edge;
    double amp0 = smooth[static_cast<std::size_t>(ismooth)] - base0;
    if (!(amp0 > 0.0)) {
        base0 = cmin;
        amp0 = cmax - cmin;
    }
    const double half_level = base0 + amp0 / 2.0;
    int lo = ismooth, hi = ismooth;
    while (lo > 0 && smooth[static_cast<std::size_t>(lo - 1)] > half_level) --lo;
    while (hi + 1 < n && smooth[static_cast<std::size_t>(hi + 1)] > half_level) ++hi;
    const double mu0 = 0.5 * (h.bin_center(lo) + h.bin_center(hi));
    const double sigma0 =
        std::max(kFwhmToSigma * (hi - lo + 1) * h.bin_width, h.bin_width);

    // Parameters: p = {baseline, amplitude, center, sigma}.
    std::array<double, 4> p{base0, amp0, mu0, sigma0};

    auto sse = [&](const std::array<double, 4>& q) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = h.bin_center(i) - q[2];
            const double model = q[0] + q[1] * std::exp(-d * d / (2.0 * q[3] * q[3]));
            const double r = static_cast<double>(h.counts[static_cast<std::size_t>(i)]) - model;
            s += r * r;
        }
        return s;
    };

    // Levenberg-Marquardt on the normal equations. The parameters differ by
    // many orders of magnitude (counts vs. seconds), so the columns of J^T J
    // are rescaled to unit diagonal before solving; without that the system
    // is too ill-conditioned for double precision and the width stalls.
    std::vector<double> jtj(16), jtr(4);
    std::array<double, 4> col_scale{1.0, 1.0, 1.0, 1.0};
    double current_sse = sse(p);
    double lm = 1e-3;
    for (int iter = 0; iter < 200; ++iter) {
        std::fill(jtj.begin(), jtj.end(), 0.0);
        std::fill(jtr.begin(), jtr.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double d = h.bin_center(i) - p[2];
            const double s2 = p[3] * p[3];
            const double e = std::exp(-d * d / (2.0 * s2));
            const double model = p[0] + p[1] * e;
            const double r = static_cast<double>(h.counts[static_cast<std::size_t>(i)]) - model;
            const std::array<double, 4> j{1.0, e, p[1] * e * d / s2,
                                          p[1] * e * d * d / (s2 * p[3])};
            for (int a = 0; a < 4; ++a) {
                jtr[static_cast<std::size_t>(a)] += j[static_cast<std::size_t>(a)] * r;
                for (int b = 0; b < 4; ++b)
                    jtj[static_cast<std::size_t>(a * 4 + b)] +=
                        j[static_cast<std::size_t>(a)] * j[static_cast<std::size_t>(b)];
            }
        }
        for (int a = 0; a < 4; ++a) {
            const double diag = jtj[static_cast<std::size_t>(a * 4 + a)];
            col_scale[static_cast<std::size_t>(a)] = (diag > 0.0) ? std::sqrt(diag) : 1.0;
        }

        bool improved = false;
        std::array<double, 4> step{};
        std::array<double, 4> trial = p;
        for (int attempt = 0; attempt < 30; ++attempt) {
            std::vector<double> A(16), b(4);
            for (int a = 0; a < 4; ++a) {
                for (int c = 0; c < 4; ++c)
                    A[static_cast<std::size_t>(a * 4 + c)] =
                        jtj[static_cast<std::size_t>(a * 4 + c)] /
                        (col_scale[static_cast<std::size_t>(a)] *
                         col_scale[static_cast<std::size_t>(c)]);
                A[static_cast<std::size_t>(a * 4 + a)] += lm;
                b[static_cast<std::size_t>(a)] =
                    jtr[static_cast<std::size_t>(a)] / col_scale[static_cast<std::size_t>(a)];
            }
            if (!solve_dense(A, b, 4)) {
                lm *= 10.0;
                continue;
            }
            for (int a = 0; a < 4; ++a) {
                step[static_cast<std::size_t>(a)] =
                    b[static_cast<std::size_t>(a)] / col_scale[static_cast<std::size_t>(a)];
                trial[static_cast<std::size_t>(a)] =
                    p[static_cast<std::size_t>(a)] + step[static_cast<std::size_t>(a)];
            }
            if (trial[3] != 0.0) {
                const double trial_sse = sse(trial);
                if (trial_sse <= current_sse) {
                    current_sse = trial_sse;
                    lm = std::max(lm * 0.3, 1e-12);
                    improved = true;
                    break;
                }
            }
            lm *= 10.0;
        }
        if (!improved) break;

        double rel = 0.0;
        for (int a = 0; a < 4; ++a) {
            const double denom = std::max(std::abs(p[static_cast<std::size_t>(a)]), 1e-300);
            rel = std::max(rel, std::abs(step[static_cast<std::size_t>(a)]) / denom);
        }
        p = trial;
        if (rel < 1e-10) break;
    }
    p[3] = std::abs(p[3]);

    // Amplitude variance from s^2 (J^T J)^-1 for the significance test,
    // solved in the same rescaled basis.
    double amp_var = 0.0;
    {
        const double s2res = current_sse / std::max(n - 4, 1);
        std::vector<double> A(16), e(4, 0.0);
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c)
                A[static_cast<std::size_t>(a * 4 + c)] =
                    jtj[static_cast<std::size_t>(a * 4 + c)] /
                    (col_scale[static_cast<std::size_t>(a)] *
                     col_scale[static_cast<std::size_t>(c)]);
        e[1] = 1.0;
        if (solve_dense(A, e, 4))
            amp_var = s2res * e[1] / (col_scale[1] * col_scale[1]);
    }

    GaussianFit fit;
    fit.baseline = p[0];
    fit.amplitude = p[1];
    fit.center = p[2];
    fit.fwhm = p[3] / kFwhmToSigma;
    fit.residual_norm = std::sqrt(current_sse);
    fit.amplitude_std_error = (amp_var > 0.0) ? std::sqrt(amp_var) : 0.0;

    if (!(fit.amplitude > 3.0 * fit.amplitude_std_error) || !(fit.amplitude > 0.0)) {
        throw NoPeakError("fit_gaussian_peak: amplitude not positive at 3 sigma");
    }
    return fit;
}

double coherence_time_from_excess(double g2_zero_excess, double combined_jitter_fwhm) {
    if (!(g2_zero_excess > 0.0))
        throw std::invalid_argument("coherence_time_from_excess: excess must be positive");
    if (!(combined_jitter_fwhm > 0.0))
        throw std::invalid_argument("coherence_time_from_excess: jitter must be positive");
    const double sigma = combined_jitter_fwhm * kFwhmToSigma;
    return g2_zero_excess * sigma * std::sqrt(2.0 * std::numbers::pi);
}

double coherence_time_from_excess_gaussian(double g2_zero_excess, double combined_jitter_fwhm) {
    if (!(g2_zero_excess > 0.0))
        throw std::invalid_argument("coherence_time_from_excess_gaussian: excess must be positive");
    if (!(combined_jitter_fwhm > 0.0))
        throw std::invalid_argument("coherence_time_from_excess_gaussian: jitter must be positive");
    const double sigma = combined_jitter_fwhm * kFwhmToSigma;
    return g2_zero_excess * sigma * std::sqrt(2.0);
}

double visibility(const std::vector<std::pair<double, double>>& curve) {
    if (curve.size() < 2) throw std::invalid_argument("visibility: need at least 2 points");
    double vmin = curve[0].second, vmax = curve[0].second;
    for (const auto& [x, v] : curve) {
        if (v < 0.0) throw std::invalid_argument("visibility: negative curve value");
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmax == 0.0) throw DegenerateDataError("visibility: all-zero curve");
    return (vmax - vmin) / (vmax + vmin);
}

}  // namespace gsim
