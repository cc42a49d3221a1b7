#pragma once

#include <cstdint>

#include "fss/environment.hpp"
#include "fss/rng.hpp"
#include "fss/sampler.hpp"

namespace fss {

inline constexpr std::uint64_t kDefaultRejectionBudget = 1'000'000;

// Uniform-over-domain draws until one is collision-free. Every attempt costs
// a counted collision check; the accepted point is exactly uniform over free
// space, which makes this the distribution oracle for the adaptive sampler.
class RejectionSampler {
 public:
  RejectionSampler(Environment env, std::uint64_t seed,
                   std::uint64_t max_attempts = kDefaultRejectionBudget);

  // Throws BudgetExhausted after max_attempts consecutive collisions.
  SampleRecord sample();

  const Environment& env() const noexcept { return env_; }
  Environment& env() noexcept { return env_; }
  std::uint64_t draws() const noexcept { return draws_; }
  std::uint64_t max_attempts() const noexcept { return max_attempts_; }

 private:
  Environment env_;
  RandomStream rng_;
  std::uint64_t max_attempts_;
  std::uint64_t draws_ = 0;
};

// One uniform draw over the domain per call, returned with its collision
// status; the un-rejected reference stream for distribution checks.
class UniformSampler {
 public:
  UniformSampler(Environment env, std::uint64_t seed);

  SampleRecord sample();

  const Environment& env() const noexcept { return env_; }
  Environment& env() noexcept { return env_; }
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  Environment env_;
  RandomStream rng_;
  std::uint64_t draws_ = 0;
};

}  // namespace fss
