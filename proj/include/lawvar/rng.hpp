#pragma once

#include <cstdint>
#include <variant>

#include "lawvar/space.hpp"

namespace lawvar {

/// Deterministic counter-based generator.
///
/// Output i of a stream keyed by `seed` is splitmix64(seed + i * golden),
/// so a stream is a pure function of (seed, counter): serial and parallel
/// runs that draw the same indices see the same values.  `fork` derives an
/// independently keyed stream for per-trial parallelism.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : key_(seed) {}

    std::uint64_t next_u64();
    /// Uniform on [0, 1).
    double uniform01();
    double uniform(double a, double b);
    /// Box-Muller transform on two counter draws.
    double normal(double mu, double sigma);
    /// Uniform integer on [a, b], both ends included.
    std::int64_t integer(std::int64_t a, std::int64_t b);

    CounterRng fork(std::uint64_t stream) const;

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

struct UniformLaw {
    double a, b;
};
struct NormalLaw {
    double mu, sigma;
};
struct IntegerLaw {
    std::int64_t a, b;
};

using DistributionDescriptor = std::variant<UniformLaw, NormalLaw, IntegerLaw>;

/// Deterministic test-point generation: the result is a pure function of
/// (seed, descriptor, space.n()).
RandomVariable random_variable(std::uint64_t seed, const SampleSpace& space,
                               const DistributionDescriptor& law);

}  // namespace lawvar
