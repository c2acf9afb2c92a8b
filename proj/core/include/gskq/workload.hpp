#pragma once

#include <cstdint>
#include <random>

#include "gskq/io.hpp"
#include "gskq/types.hpp"

namespace gskq {

/// Everything the generators need, for both synthetic datasets and query
/// groups. A config plus a seed fully determines every output bit, on every
/// platform.
struct GenConfig {
    uint64_t seed = 1;

    // Dataset.
    uint64_t object_count = 1000;
    uint32_t vocabulary_size = 100;
    /// Mean keywords per object; actual counts are Poisson-distributed,
    /// resampled until ≥ 1 and capped at the vocabulary size.
    double keywords_per_object = 3.0;
    Rect data_space{{0.0, 0.0}, {100.0, 100.0}};

    // Query groups.
    uint32_t group_size = 10;
    /// Query-square area as a fraction of the data-space area.
    double query_space_fraction = 0.0001;
    uint32_t keywords_per_query = 4;
    /// Fraction of the in-square keyword pool kept as the shared draw pool.
    double keyword_set_fraction = 0.03;

    void validate() const;  // throws std::invalid_argument
};

/// Deterministic random stream. The engine is the standard 64-bit Mersenne
/// Twister seeded through seed_seq from (seed, stream id) — both fully
/// specified — and every mapping to doubles and bounded integers is done by
/// hand here, because the standard library's distribution objects are
/// allowed to differ between implementations.
class Rng {
public:
    Rng(uint64_t seed, uint32_t stream_id, uint64_t salt = 0);

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [0, n); n must be positive.
    uint64_t below(uint64_t n);
    /// Poisson draw (inversion by multiplication), resampled until ≥ 1.
    uint64_t poisson_at_least_one(double mean);
    /// The first `count` elements of a random permutation of [0, n).
    std::vector<uint32_t> sample_without_replacement(uint32_t n,
                                                     uint32_t count);

private:
    std::mt19937_64 engine_;
};

/// Synthesizes object_count objects with uniform locations in data_space
/// and keyword sets drawn from a generated vocabulary ("kw000", "kw001",
/// ...). The full vocabulary is interned up front so keyword ids do not
/// depend on which objects happen to use which tokens.
Dataset gen_objects(const GenConfig& config);

/// Generates one query group: a random square of the configured area is
/// placed in the data space, the keyword pool is collected from objects
/// inside it, a subset of the pool is sampled, and every member draws its
/// location inside the square and its keywords from that shared subset —
/// which is what makes members' keyword sets overlap. A square with no
/// object keywords is re-placed a bounded number of times before giving up.
/// `salt` derives independent groups from one config (repetition index).
QueryGroup gen_query_group(const GenConfig& config, const Dataset& dataset,
                           uint64_t salt = 0);

}  // namespace gskq
