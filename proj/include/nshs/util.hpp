#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

namespace nshs {

using complexd = std::complex<double>;

/// Precondition or configuration violation; message names the violated rule.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure at runtime (non-convergence, under-resolved grid, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

/// Deterministic 64-bit generator (SplitMix64). Used instead of std::
/// distributions so sample streams are bit-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [a,b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (deterministic branch-free form).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::uint64_t state_;
};

/// Number of worker threads honoring the NSHS_THREADS cap.
int worker_count();

/// Collects the first exception thrown inside a parallel loop body so it can
/// be rethrown after the region (exceptions must not cross omp boundaries).
class ParallelExceptions {
public:
    template <typename F>
    void run(F&& f) noexcept {
        try {
            f();
        } catch (...) {
            bool expected = false;
            if (armed_.compare_exchange_strong(expected, true))
                first_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (armed_.load()) std::rethrow_exception(first_);
    }

private:
    std::atomic<bool> armed_{false};
    std::exception_ptr first_;
};

/// sha256 hex digest of a byte buffer.
std::string sha256_hex(const void* data, std::size_t len);

}  // namespace nshs
