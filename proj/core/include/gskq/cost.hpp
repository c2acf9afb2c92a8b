#pragma once

#include <span>
#include <vector>

#include "gskq/geometry.hpp"
#include "gskq/types.hpp"

namespace gskq {

enum class Aggregate { Sum, Max, Min };

const char* to_string(Aggregate a);

/// Parameters of the blended spatial/textual cost.
///
/// cost(q, o) = alpha * dist(q, o) / d_max  (clamped to [0, 1])
///            + (1 - alpha) * (1 - similarity(q.keywords, o.keywords))
/// divided by the member's priority.
struct CostParams {
    double alpha = 0.5;
    Aggregate aggregate = Aggregate::Sum;
    double d_max = 1.0;
    double w_max = 1.0;
    /// Per-keyword-id weight; ids beyond the vector default to 1.0.
    std::vector<double> weights;

    double weight(KeywordId kw) const {
        return kw < weights.size() ? weights[kw] : 1.0;
    }

    /// Throws std::invalid_argument if any invariant is broken
    /// (alpha outside [0,1], d_max <= 0, or w_max below some weight).
    void validate() const;
};

/// Euclidean distance normalized by d_max and clamped to [0, 1].
double normalized_distance(Point a, Point b, double d_max);

/// (1/|query|) * sum over shared keywords of weight/w_max. In [0, 1].
/// Throws std::invalid_argument on an empty query keyword set.
double keyword_similarity(std::span<const KeywordId> query_keywords,
                          std::span<const KeywordId> target_keywords,
                          const CostParams& params);

/// Cost of a data object for one query user.
double cost_object(const QueryPoint& q, const SpatioTextualObject& o,
                   const CostParams& params);

/// Lower bound cost of a tree node for one query user: uses min point-MBR
/// distance and the node's keyword summary. Throws on a malformed MBR.
double cost_node(const QueryPoint& q, const Rect& mbr,
                 std::span<const KeywordId> node_keywords,
                 const CostParams& params);

/// Per-member costs of one target (object or node) for a whole group.
std::vector<double> member_costs_object(const QueryGroup& group,
                                        const SpatioTextualObject& o,
                                        const CostParams& params);
std::vector<double> member_costs_node(const QueryGroup& group, const Rect& mbr,
                                      std::span<const KeywordId> node_keywords,
                                      const CostParams& params);

/// Plain fold of the named aggregate over the entries, in storage order.
/// Throws std::invalid_argument on an empty vector.
double aggregate(std::span<const double> costs, Aggregate kind);

/// Member indices ranked ascending by (cost, index), with the running
/// aggregate over each prefix. prefix[s-1] is the aggregate cost of the
/// best size-s subgroup; for SUM/MAX/MIN that prefix is optimal among all
/// subgroups of size s. Every algorithm and the oracle compute subgroup
/// aggregates through this one path so their results match bit for bit.
struct RankedCosts {
    std::vector<uint32_t> order;
    std::vector<double> prefix;

    double aggregate_for(uint32_t size) const { return prefix.at(size - 1); }

    /// First `size` ranked member indices, sorted ascending.
    std::vector<uint32_t> subgroup(uint32_t size) const;
};

RankedCosts rank_costs(std::span<const double> costs, Aggregate kind);

/// The size-m subgroup minimizing the aggregate, ties broken by ascending
/// member index. Throws std::invalid_argument if m is out of [1, n].
struct SubgroupSelection {
    std::vector<uint32_t> member_indices;  // sorted ascending, |.| = m
    double aggregate_cost = 0.0;
};

SubgroupSelection best_subgroup(std::span<const double> costs, uint32_t m,
                                Aggregate kind);

}  // namespace gskq
