#include "fss/baseline.hpp"

#include <string>
#include <utility>

#include "fss/errors.hpp"

namespace fss {

RejectionSampler::RejectionSampler(Environment env, std::uint64_t seed,
                                   std::uint64_t max_attempts)
    : env_(std::move(env)), rng_(seed), max_attempts_(max_attempts) {}

SampleRecord RejectionSampler::sample() {
  for (std::uint64_t attempt = 0; attempt < max_attempts_; ++attempt) {
    Point x = sample_uniform(env_.domain(), rng_);
    if (env_.collision_free(x)) {
      return {std::move(x), true, 0, draws_++, nullptr};
    }
  }
  throw BudgetExhausted("rejection sampling found no free point within " +
                        std::to_string(max_attempts_) + " attempts");
}

UniformSampler::UniformSampler(Environment env, std::uint64_t seed)
    : env_(std::move(env)), rng_(seed) {}

SampleRecord UniformSampler::sample() {
  Point x = sample_uniform(env_.domain(), rng_);
  const bool free = env_.collision_free(x);
  return {std::move(x), free, 0, draws_++, nullptr};
}

}  // namespace fss
