#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace chebrb::detail {

namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW planning is not thread-safe; execution with fftw_execute_dft is.
fftw_plan plan_for(int n) {
    static std::mutex mutex;
    static std::map<int, Plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second.get();

    std::vector<std::complex<double>> in(n), out(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(n, Plan(p));
    return p;
}

}  // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input) {
    const int n = static_cast<int>(input.size());
    std::vector<std::complex<double>> in(input.begin(), input.end());
    std::vector<std::complex<double>> out(input.size());
    if (n == 0) return out;
    fftw_execute_dft(plan_for(n), reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace chebrb::detail
