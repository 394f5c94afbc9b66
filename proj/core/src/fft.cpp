#include "cbf/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "cbf/errors.hpp"

namespace cbf::fft {

namespace {

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;

// FFTW_ESTIMATE keeps planning deterministic (no runtime measurement), which
// the bit-reproducibility contract of the experiment outputs relies on.
// FFTW_UNALIGNED lets the cached plan execute on any caller buffer.
const PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n) * n);
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair p;
    p.fwd = fftw_plan_dft_2d(n, n, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_2d(n, n, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p.fwd || !p.bwd) throw InvalidArgument("fft: plan creation failed");
    return cache.emplace(n, p).first->second;
}

} // namespace

void forward(int n, std::vector<std::complex<double>>& data) {
    if (data.size() != static_cast<std::size_t>(n) * n)
        throw InvalidArgument("fft::forward: size mismatch");
    const PlanPair& p = plans_for(n);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p.fwd, ptr, ptr);
    const double scale = 1.0 / (static_cast<double>(n) * n);
    for (auto& c : data) c *= scale;
}

void backward(int n, std::vector<std::complex<double>>& data) {
    if (data.size() != static_cast<std::size_t>(n) * n)
        throw InvalidArgument("fft::backward: size mismatch");
    const PlanPair& p = plans_for(n);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p.bwd, ptr, ptr);
}

} // namespace cbf::fft
