#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scucb {

using Rng = std::mt19937_64;

std::uint64_t fnv1a64(std::string_view bytes);

/// Derives an independent seed for a named stream of a replication.
/// The same (root, name, index) triple always yields the same seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index = 0);

Rng make_stream(std::uint64_t root, std::string_view stream,
                std::uint64_t index = 0);

/// Uniform on [0,1) with 53 random bits. Portable across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Standard normal via the Marsaglia polar method.
double standard_normal(Rng& rng);

/// Gamma(shape, 1) via Marsaglia-Tsang.
double gamma_sample(Rng& rng, double shape);

double beta_sample(Rng& rng, double a, double b);

/// Uniform integer in [0, n).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace scucb
