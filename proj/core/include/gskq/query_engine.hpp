#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "gskq/cost.hpp"
#include "gskq/irtree.hpp"
#include "gskq/types.hpp"

namespace gskq {

/// Which query family runs.
///   GNNK   — whole group, best objects.
///   FSNNK  — best (object, size-m subgroup) pairs.
///   MFSNNK — FSNNK for every subgroup size in [m, n] at once.
enum class QueryVariant { GNNK, FSNNK, MFSNNK };

/// Traversal strategy: branch-and-bound stack (BB), best-first priority
/// queue (BF), or the naive repeated-pass method (N, MFSNNK only).
enum class AlgorithmKind { BB, BF, N };

const char* to_string(QueryVariant v);
const char* to_string(AlgorithmKind a);

struct QuerySpec {
    QueryGroup group;
    CostParams params;
    QueryVariant variant = QueryVariant::GNNK;
    AlgorithmKind algorithm = AlgorithmKind::BF;
    uint32_t k = 1;
    /// Subgroup size (FSNNK) or minimum subgroup size (MFSNNK); ignored for
    /// GNNK.
    uint32_t m = 0;
    /// MFSNNK-BF only: admit a child on the single weakest-bound comparison
    /// instead of testing every subgroup size. Never changes results; can
    /// only admit more nodes.
    bool relaxed_prune = false;
    /// Diagnostic: disable pruning (bound = infinity) in the pruned
    /// algorithms; results must not change.
    bool no_prune = false;
    /// Diagnostic: record every frontier pop for traversal-order checks.
    bool trace_pops = false;

    void validate() const;  // throws std::invalid_argument
};

/// One ranked answer. `subgroup` holds ascending member indices into
/// QueryGroup::members; for GNNK it is the whole group.
struct ResultEntry {
    uint32_t object_id = 0;
    double aggregate_cost = 0.0;
    std::vector<uint32_t> subgroup;
    uint32_t subgroup_size = 0;
};

/// One frontier pop, recorded when QuerySpec::trace_pops is set. `id` is a
/// page id for nodes and an object id for objects.
struct PopEvent {
    bool is_object = false;
    double key = 0.0;
    uint32_t id = 0;
};

struct QueryResult {
    /// Grouped by subgroup size ascending, then (cost, object id) ascending
    /// within each size; at most k entries per size.
    std::vector<ResultEntry> entries;
    AccessCounters counters;
    std::chrono::duration<double> elapsed{0.0};
    std::vector<PopEvent> pops;

    /// The entries for one subgroup size (MFSNNK results carry several).
    std::vector<ResultEntry> entries_for_size(uint32_t size) const;
};

QueryResult gnnk_bb(const IndexReader& index, const QuerySpec& spec);
QueryResult gnnk_bf(const IndexReader& index, const QuerySpec& spec);
QueryResult fsnnk_bb(const IndexReader& index, const QuerySpec& spec);
QueryResult fsnnk_bf(const IndexReader& index, const QuerySpec& spec);
QueryResult mfsnnk_n(const IndexReader& index, const QuerySpec& spec);
QueryResult mfsnnk_bf(const IndexReader& index, const QuerySpec& spec);

/// Dispatches on spec.variant and spec.algorithm.
QueryResult run_query(const IndexReader& index, const QuerySpec& spec);

}  // namespace gskq
