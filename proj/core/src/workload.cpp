#include "gskq/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gskq {

namespace {

// Stream ids keep the independent random purposes apart; adding a purpose
// means adding an id, never reordering existing ones (fixtures depend on
// them).
enum Stream : uint32_t {
    kObjectLocations = 0,
    kObjectKeywords = 1,
    kQueryPlacement = 2,
    kQueryKeywords = 3,
};

std::string make_token(uint32_t id, uint32_t vocabulary_size) {
    size_t digits = 1;
    for (uint32_t v = vocabulary_size - 1; v >= 10; v /= 10) ++digits;
    std::string number = std::to_string(id);
    return "kw" + std::string(digits - number.size(), '0') + number;
}

}  // namespace

void GenConfig::validate() const {
    if (object_count < 1) throw std::invalid_argument("object_count must be >= 1");
    if (vocabulary_size < 1)
        throw std::invalid_argument("vocabulary_size must be >= 1");
    if (keywords_per_object <= 0.0)
        throw std::invalid_argument("keywords_per_object must be positive");
    if (!data_space.valid() || data_space.diagonal() <= 0.0)
        throw std::invalid_argument("data_space must have positive extent");
    if (group_size < 1) throw std::invalid_argument("group_size must be >= 1");
    if (query_space_fraction <= 0.0 || query_space_fraction > 1.0)
        throw std::invalid_argument("query_space_fraction must be in (0, 1]");
    if (keywords_per_query < 1)
        throw std::invalid_argument("keywords_per_query must be >= 1");
    if (keyword_set_fraction <= 0.0 || keyword_set_fraction > 1.0)
        throw std::invalid_argument("keyword_set_fraction must be in (0, 1]");
}

Rng::Rng(uint64_t seed, uint32_t stream_id, uint64_t salt) {
    std::seed_seq seq{
        static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
        stream_id, static_cast<uint32_t>(salt),
        static_cast<uint32_t>(salt >> 32)};
    engine_.seed(seq);
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

uint64_t Rng::below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("empty range");
    // Rejection against the smallest covering bit mask: unbiased and
    // reproducible, unlike modulo or float scaling.
    uint64_t mask = n - 1;
    for (int shift = 1; shift < 64; shift <<= 1) mask |= mask >> shift;
    while (true) {
        const uint64_t x = engine_() & mask;
        if (x < n) return x;
    }
}

uint64_t Rng::poisson_at_least_one(double mean) {
    const double floor = std::exp(-mean);
    while (true) {
        uint64_t count = 0;
        double product = uniform();
        while (product > floor) {
            ++count;
            product *= uniform();
        }
        if (count >= 1) return count;
    }
}

std::vector<uint32_t> Rng::sample_without_replacement(uint32_t n,
                                                      uint32_t count) {
    if (count > n) throw std::invalid_argument("sample larger than population");
    std::vector<uint32_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0u);
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t j = i + static_cast<uint32_t>(below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

Dataset gen_objects(const GenConfig& config) {
    config.validate();
    Dataset dataset;
    for (uint32_t id = 0; id < config.vocabulary_size; ++id)
        dataset.vocabulary.intern(make_token(id, config.vocabulary_size));

    Rng locations(config.seed, kObjectLocations);
    Rng keywords(config.seed, kObjectKeywords);
    dataset.objects.reserve(config.object_count);
    for (uint64_t id = 0; id < config.object_count; ++id) {
        SpatioTextualObject o;
        o.id = static_cast<uint32_t>(id);
        o.location.x =
            locations.uniform(config.data_space.lo.x, config.data_space.hi.x);
        o.location.y =
            locations.uniform(config.data_space.lo.y, config.data_space.hi.y);
        const uint32_t count = static_cast<uint32_t>(
            std::min<uint64_t>(keywords.poisson_at_least_one(
                                   config.keywords_per_object),
                               config.vocabulary_size));
        for (uint32_t kw :
             keywords.sample_without_replacement(config.vocabulary_size, count))
            o.keywords.push_back(kw);
        sort_unique(o.keywords);
        dataset.bounding_box.expand(o.location);
        dataset.objects.push_back(std::move(o));
    }
    return dataset;
}

QueryGroup gen_query_group(const GenConfig& config, const Dataset& dataset,
                           uint64_t salt) {
    config.validate();
    if (dataset.objects.empty())
        throw std::invalid_argument("dataset has no objects");

    Rng placement(config.seed, kQueryPlacement, salt);
    Rng keywords(config.seed, kQueryKeywords, salt);

    const double space_w = config.data_space.hi.x - config.data_space.lo.x;
    const double space_h = config.data_space.hi.y - config.data_space.lo.y;
    const double side =
        std::sqrt(config.query_space_fraction * space_w * space_h);

    constexpr int kMaxPlacements = 100;
    KeywordSet pool;
    Rect square;
    for (int attempt = 0;; ++attempt) {
        if (attempt >= kMaxPlacements)
            throw std::runtime_error(
                "no object keywords found in any sampled query square; "
                "enlarge query_space_fraction or the dataset");
        const Point center{
            placement.uniform(config.data_space.lo.x, config.data_space.hi.x),
            placement.uniform(config.data_space.lo.y, config.data_space.hi.y)};
        square = Rect{{center.x - side / 2.0, center.y - side / 2.0},
                      {center.x + side / 2.0, center.y + side / 2.0}};
        pool.clear();
        for (const SpatioTextualObject& o : dataset.objects)
            if (square.contains(o.location))
                pool.insert(pool.end(), o.keywords.begin(), o.keywords.end());
        sort_unique(pool);
        if (!pool.empty()) break;
    }

    // Keep the configured fraction of the pool, but never fewer tokens than
    // one member wants (when the pool has them): tiny pools would otherwise
    // collapse every member onto a single keyword.
    const uint32_t pool_size = static_cast<uint32_t>(pool.size());
    uint32_t subset_size = static_cast<uint32_t>(
        std::lround(config.keyword_set_fraction * pool_size));
    subset_size = std::max<uint32_t>(
        subset_size, std::min(config.keywords_per_query, pool_size));
    subset_size = std::clamp<uint32_t>(subset_size, 1, pool_size);
    KeywordSet subset;
    for (uint32_t i :
         keywords.sample_without_replacement(pool_size, subset_size))
        subset.push_back(pool[i]);
    sort_unique(subset);

    QueryGroup group;
    const uint32_t per_member =
        std::min<uint32_t>(config.keywords_per_query,
                           static_cast<uint32_t>(subset.size()));
    for (uint32_t i = 0; i < config.group_size; ++i) {
        QueryPoint q;
        q.location.x = placement.uniform(square.lo.x, square.hi.x);
        q.location.y = placement.uniform(square.lo.y, square.hi.y);
        for (uint32_t pick : keywords.sample_without_replacement(
                 static_cast<uint32_t>(subset.size()), per_member))
            q.keywords.push_back(subset[pick]);
        sort_unique(q.keywords);
        group.members.push_back(std::move(q));
    }
    return group;
}

}  // namespace gskq
