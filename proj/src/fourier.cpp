#include "nshs/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace nshs {

namespace {

// One forward and one backward c2c plan per size, created under a lock.
// fftw_execute_dft on distinct arrays is thread-safe.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(int n) {
    static std::map<int, PlanPair> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    PlanPair p;
    std::vector<fftw_complex> buf(static_cast<size_t>(n) * 2);
    p.fwd = fftw_plan_dft_1d(n, buf.data(), buf.data() + n, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_1d(n, buf.data(), buf.data() + n, FFTW_BACKWARD, FFTW_ESTIMATE);
    return cache.emplace(n, p).first->second;
}

void run(fftw_plan plan, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    out.resize(in.size());
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<complexd*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

Eigen::VectorXcd XTransform::synthesize(const Eigen::VectorXcd& coeffs, int nx) {
    const int K = (static_cast<int>(coeffs.size()) - 1) / 2;
    require(static_cast<int>(coeffs.size()) == 2 * K + 1, "synthesize: coeffs must hold xi=-K..K");
    require(nx >= 2 * K + 2, "to_physical: nx < 2K+2 would alias");
    // Pack into FFT ordering; the (-1)^xi phase shifts the sample grid to
    // x_m = -pi + 2 pi m / nx on T = [-pi, pi].
    Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(nx);
    for (int xi = -K; xi <= K; ++xi) {
        const double phase = (xi % 2 == 0) ? 1.0 : -1.0;
        spec[(xi + nx) % nx] = phase * coeffs[xi + K];
    }
    Eigen::VectorXcd out;
    run(plans_for(nx).bwd, spec, out);  // FFTW backward = sum e^{+i xi x}
    return out;
}

Eigen::VectorXcd XTransform::analyze(const Eigen::VectorXcd& samples, int K) {
    const int nx = static_cast<int>(samples.size());
    require(nx >= 2 * K + 2, "analyze: nx < 2K+2 would alias");
    Eigen::VectorXcd spec;
    run(plans_for(nx).fwd, samples, spec);
    Eigen::VectorXcd coeffs(2 * K + 1);
    for (int xi = -K; xi <= K; ++xi) {
        const double phase = (xi % 2 == 0) ? 1.0 : -1.0;
        coeffs[xi + K] = phase * spec[(xi + nx) % nx] / double(nx);
    }
    return coeffs;
}

int XTransform::dealias_size(int K) {
    int n = std::max(3 * K + 1, 2 * K + 2);
    if (n % 2) ++n;
    return n;
}

}  // namespace nshs
