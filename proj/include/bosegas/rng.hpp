#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace bosegas {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/*!
 * Random stream keyed by (master seed, task path).
 *
 * The state is a pure function of the key, so a task's draws do not depend
 * on which worker runs it or in what order. The generator is xoshiro256**;
 * the state is filled by SplitMix64 from the hashed key.
 */
class RandomStream
{
  public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

    /// Child stream: same key path extended by one element.
    RandomStream child(std::uint64_t id) const;

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal();
    std::uint64_t key() const { return key_; }

  private:
    explicit RandomStream(std::uint64_t key, int);
    void seed_state();

    std::uint64_t key_;
    std::array<std::uint64_t, 4> s_{};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace bosegas
