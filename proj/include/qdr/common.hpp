// Shared error types, deterministic RNG helpers and a small worker pool.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qdr {

using cplx = std::complex<double>;

// Requested size exceeds a backend capacity bound.
struct capacity_error : std::runtime_error {
    explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input violates a documented precondition.
struct validation_error : std::invalid_argument {
    explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Readout-mitigation attenuation too small to divide out.
struct mitigation_error : std::runtime_error {
    explicit mitigation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Deterministic randomness.
//
// std::mt19937_64 output is fully specified by the standard, but the
// <random> distributions are not; their results differ between standard
// libraries. Reports must be bit-identical across machines, so uniforms and
// normals are produced from raw engine words here.
// ---------------------------------------------------------------------------

using rng_engine = std::mt19937_64;

// splitmix64 finalizer; used to derive independent seed streams.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix_seed(base ^ mix_seed(stream));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t s1, std::uint64_t s2) {
    return derive_seed(derive_seed(base, s1), s2);
}

// Uniform double in [0, 1) with 53 random bits.
inline double rng_u01(rng_engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (deterministic, one value per call).
inline double rng_normal(rng_engine& rng) {
    double u1 = rng_u01(rng);
    while (u1 == 0.0) u1 = rng_u01(rng);
    const double u2 = rng_u01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Uniform integer in [0, bound) by rejection; bound must be > 0.
inline std::uint64_t rng_below(rng_engine& rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % bound;
}

// ---------------------------------------------------------------------------
// Per-sample parallelism. Tasks receive their own index so all RNG streams
// are seed-derived and results are schedule independent.
// ---------------------------------------------------------------------------

inline std::size_t worker_count() {
    if (const char* env = std::getenv("QDR_WORKERS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace qdr
