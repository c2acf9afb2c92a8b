#include "gskq/cost.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gskq {

const char* to_string(Aggregate a) {
    switch (a) {
        case Aggregate::Sum: return "sum";
        case Aggregate::Max: return "max";
        case Aggregate::Min: return "min";
    }
    return "?";
}

void CostParams::validate() const {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("alpha must be in [0, 1]");
    if (d_max <= 0.0) throw std::invalid_argument("d_max must be positive");
    if (w_max <= 0.0) throw std::invalid_argument("w_max must be positive");
    for (double w : weights) {
        if (w <= 0.0) throw std::invalid_argument("keyword weights must be positive");
        if (w > w_max) throw std::invalid_argument("w_max below a keyword weight");
    }
}

double normalized_distance(Point a, Point b, double d_max) {
    return std::min(1.0, euclidean_distance(a, b) / d_max);
}

double keyword_similarity(std::span<const KeywordId> query_keywords,
                          std::span<const KeywordId> target_keywords,
                          const CostParams& params) {
    if (query_keywords.empty())
        throw std::invalid_argument("query keyword set is empty");
    // Both sides sorted ascending; walk the intersection in query order so
    // the summation order is identical everywhere this value is computed.
    double sum = 0.0;
    auto t = target_keywords.begin();
    for (KeywordId y : query_keywords) {
        while (t != target_keywords.end() && *t < y) ++t;
        if (t == target_keywords.end()) break;
        if (*t == y) sum += params.weight(y) / params.w_max;
    }
    return sum / static_cast<double>(query_keywords.size());
}

static double blend(double spatial, double similarity, const QueryPoint& q,
                    const CostParams& params) {
    const double c = params.alpha * spatial + (1.0 - params.alpha) * (1.0 - similarity);
    return c / q.priority;
}

double cost_object(const QueryPoint& q, const SpatioTextualObject& o,
                   const CostParams& params) {
    const double d = normalized_distance(q.location, o.location, params.d_max);
    const double s = keyword_similarity(q.keywords, o.keywords, params);
    return blend(d, s, q, params);
}

double cost_node(const QueryPoint& q, const Rect& mbr,
                 std::span<const KeywordId> node_keywords,
                 const CostParams& params) {
    if (!mbr.valid()) throw std::invalid_argument("malformed MBR");
    const double d = std::min(1.0, min_dist(q.location, mbr) / params.d_max);
    const double s = keyword_similarity(q.keywords, node_keywords, params);
    return blend(d, s, q, params);
}

std::vector<double> member_costs_object(const QueryGroup& group,
                                        const SpatioTextualObject& o,
                                        const CostParams& params) {
    std::vector<double> costs;
    costs.reserve(group.size());
    for (const QueryPoint& q : group.members) costs.push_back(cost_object(q, o, params));
    return costs;
}

std::vector<double> member_costs_node(const QueryGroup& group, const Rect& mbr,
                                      std::span<const KeywordId> node_keywords,
                                      const CostParams& params) {
    std::vector<double> costs;
    costs.reserve(group.size());
    for (const QueryPoint& q : group.members)
        costs.push_back(cost_node(q, mbr, node_keywords, params));
    return costs;
}

double aggregate(std::span<const double> costs, Aggregate kind) {
    if (costs.empty()) throw std::invalid_argument("empty cost vector");
    double acc = costs[0];
    for (size_t i = 1; i < costs.size(); ++i) {
        switch (kind) {
            case Aggregate::Sum: acc += costs[i]; break;
            case Aggregate::Max: acc = std::max(acc, costs[i]); break;
            case Aggregate::Min: acc = std::min(acc, costs[i]); break;
        }
    }
    return acc;
}

std::vector<uint32_t> RankedCosts::subgroup(uint32_t size) const {
    std::vector<uint32_t> indices(order.begin(), order.begin() + size);
    std::sort(indices.begin(), indices.end());
    return indices;
}

RankedCosts rank_costs(std::span<const double> costs, Aggregate kind) {
    if (costs.empty()) throw std::invalid_argument("empty cost vector");
    RankedCosts ranked;
    ranked.order.resize(costs.size());
    std::iota(ranked.order.begin(), ranked.order.end(), 0u);
    std::sort(ranked.order.begin(), ranked.order.end(),
              [&](uint32_t a, uint32_t b) {
                  if (costs[a] != costs[b]) return costs[a] < costs[b];
                  return a < b;
              });
    ranked.prefix.resize(costs.size());
    double acc = costs[ranked.order[0]];
    ranked.prefix[0] = acc;
    for (size_t i = 1; i < ranked.order.size(); ++i) {
        const double c = costs[ranked.order[i]];
        switch (kind) {
            case Aggregate::Sum: acc += c; break;
            case Aggregate::Max: acc = std::max(acc, c); break;
            case Aggregate::Min: acc = std::min(acc, c); break;
        }
        ranked.prefix[i] = acc;
    }
    return ranked;
}

SubgroupSelection best_subgroup(std::span<const double> costs, uint32_t m,
                                Aggregate kind) {
    if (m < 1 || m > costs.size())
        throw std::invalid_argument("subgroup size out of range");
    const RankedCosts ranked = rank_costs(costs, kind);
    SubgroupSelection sel;
    sel.member_indices = ranked.subgroup(m);
    sel.aggregate_cost = ranked.aggregate_for(m);
    return sel;
}

}  // namespace gskq
