#include "lawvar/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lawvar {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

std::uint64_t CounterRng::next_u64() { return mix64(key_ + ++counter_ * kGolden); }

double CounterRng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform(double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("uniform range requires a <= b");
    return a + (b - a) * uniform01();
}

double CounterRng::normal(double mu, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("normal sigma must be nonnegative");
    // u1 in (0, 1] so the logarithm stays finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform01();
    return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t CounterRng::integer(std::int64_t a, std::int64_t b) {
    if (a > b) throw std::invalid_argument("integer range requires a <= b");
    std::uint64_t range = static_cast<std::uint64_t>(b) - static_cast<std::uint64_t>(a) + 1;
    std::uint64_t draw = next_u64();
    if (range == 0) return static_cast<std::int64_t>(draw);  // full 64-bit range
    std::uint64_t v = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(draw) * static_cast<unsigned __int128>(range)) >> 64);
    return a + static_cast<std::int64_t>(v);
}

CounterRng CounterRng::fork(std::uint64_t stream) const {
    return CounterRng(mix64(key_ ^ mix64(stream + kGolden)));
}

RandomVariable random_variable(std::uint64_t seed, const SampleSpace& space,
                               const DistributionDescriptor& law) {
    CounterRng rng(seed);
    std::vector<double> v(space.n());
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, UniformLaw>) {
                if (d.a > d.b) throw std::invalid_argument("uniform descriptor requires a <= b");
                for (double& e : v) e = rng.uniform(d.a, d.b);
            } else if constexpr (std::is_same_v<T, NormalLaw>) {
                if (d.sigma < 0.0) throw std::invalid_argument("normal descriptor requires sigma >= 0");
                for (double& e : v) e = rng.normal(d.mu, d.sigma);
            } else {
                if (d.a > d.b) throw std::invalid_argument("integer descriptor requires a <= b");
                for (double& e : v) e = static_cast<double>(rng.integer(d.a, d.b));
            }
        },
        law);
    return RandomVariable(space, std::move(v));
}

}  // namespace lawvar
