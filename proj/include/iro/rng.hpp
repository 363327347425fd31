#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace iro {

/// Counter-based generator (splitmix64). The state advances by a fixed
/// increment and the output is a bijective mix of the counter, so streams
/// seeded from distinct keys never share a sequence prefix.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

/// Identifies one noise batch: the batch used by replica `replica` at
/// iteration `iteration`. Distinct ids give statistically independent
/// batches; equal ids reproduce the same batch bit for bit.
struct RngStreamSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t replica = 0;
    std::uint64_t iteration = 0;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Collapses (master_seed, replica, iteration) into one stream seed.
inline std::uint64_t stream_seed(const RngStreamSpec& spec) {
    std::uint64_t h = detail::mix64(spec.master_seed + 0x9E3779B97F4A7C15ull);
    h = detail::mix64(h ^ (0xBF58476D1CE4E5B9ull * (spec.replica + 1)));
    h = detail::mix64(h ^ (0x94D049BB133111EBull * (spec.iteration + 1)));
    return h;
}

/// n i.i.d. uniform draws on [0,1], shared by every state-action pair within
/// a single operator application.
struct SampleBatch {
    std::vector<double> draws;

    int size() const { return static_cast<int>(draws.size()); }
    bool empty() const { return draws.empty(); }
};

inline void fill_batch(const RngStreamSpec& spec, int n, SampleBatch& batch) {
    CounterRng rng(stream_seed(spec));
    batch.draws.resize(static_cast<std::size_t>(n));
    for (double& u : batch.draws) u = rng.next_double();
}

inline SampleBatch draw_batch(const RngStreamSpec& spec, int n) {
    SampleBatch batch;
    fill_batch(spec, n, batch);
    return batch;
}

}  // namespace iro
