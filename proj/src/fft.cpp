#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace gsim::detail {

namespace {

std::mutex g_plan_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan> g_plans;

fftw_plan get_plan(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = g_plans.find({n, sign});
    if (it != g_plans.end()) return it->second;
    // Plan on a scratch buffer; executed later on caller arrays via
    // fftw_execute_dft, so the plan must not assume alignment.
    std::vector<std::complex<double>> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    g_plans.emplace(std::make_pair(n, sign), plan);
    return plan;
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, int sign) {
    if (data.size() < 2) return;
    fftw_plan plan = get_plan(data.size(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

}  // namespace gsim::detail
