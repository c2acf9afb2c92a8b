#include "gskq/oracle.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace gskq {

namespace {

std::vector<uint32_t> whole_group(uint32_t n) {
    std::vector<uint32_t> all(n);
    for (uint32_t i = 0; i < n; ++i) all[i] = i;
    return all;
}

// Walks every (n choose m) index subset; `visit` receives each subset as an
// ascending index vector.
template <typename Visit>
void for_each_subset(uint32_t n, uint32_t m, Visit visit) {
    std::vector<uint32_t> subset(m);
    for (uint32_t i = 0; i < m; ++i) subset[i] = i;
    while (true) {
        visit(subset);
        // Advance to the next combination in lexicographic order.
        int i = static_cast<int>(m) - 1;
        while (i >= 0 && subset[i] == n - m + static_cast<uint32_t>(i)) --i;
        if (i < 0) return;
        ++subset[i];
        for (uint32_t j = static_cast<uint32_t>(i) + 1; j < m; ++j)
            subset[j] = subset[j - 1] + 1;
    }
}

// Aggregate of one explicit subset, summed in the canonical ranked order so
// the value is bit-identical to the prefix-selection path for equal subsets.
double subset_aggregate(std::span<const double> costs,
                        std::span<const uint32_t> subset, Aggregate kind) {
    std::vector<double> picked;
    picked.reserve(subset.size());
    for (uint32_t i : subset) picked.push_back(costs[i]);
    const RankedCosts ranked = rank_costs(picked, kind);
    return ranked.aggregate_for(static_cast<uint32_t>(subset.size()));
}

void sort_and_truncate(std::vector<ResultEntry>& entries, uint32_t k) {
    std::sort(entries.begin(), entries.end(),
              [](const ResultEntry& a, const ResultEntry& b) {
                  if (a.aggregate_cost != b.aggregate_cost)
                      return a.aggregate_cost < b.aggregate_cost;
                  return a.object_id < b.object_id;
              });
    if (entries.size() > k) entries.resize(k);
}

std::vector<ResultEntry> scan_one_size(
    std::span<const SpatioTextualObject> objects, const QuerySpec& spec,
    uint32_t size, bool exhaustive) {
    const uint32_t n = static_cast<uint32_t>(spec.group.size());
    if (exhaustive && n > 12)
        throw std::invalid_argument(
            "exhaustive subgroup scan is limited to 12 group members");
    std::vector<ResultEntry> entries;
    entries.reserve(objects.size());
    for (const SpatioTextualObject& o : objects) {
        const std::vector<double> costs =
            member_costs_object(spec.group, o, spec.params);
        ResultEntry entry;
        entry.object_id = o.id;
        entry.subgroup_size = size;
        if (exhaustive) {
            // Try every subset outright; among equal-cost subsets keep the
            // lexicographically smallest so the output is deterministic.
            double best = std::numeric_limits<double>::infinity();
            std::vector<uint32_t> best_subset;
            for_each_subset(n, size, [&](const std::vector<uint32_t>& subset) {
                const double c =
                    subset_aggregate(costs, subset, spec.params.aggregate);
                if (c < best) {
                    best = c;
                    best_subset = subset;
                }
            });
            entry.aggregate_cost = best;
            entry.subgroup = std::move(best_subset);
        } else {
            SubgroupSelection sel =
                best_subgroup(costs, size, spec.params.aggregate);
            entry.aggregate_cost = sel.aggregate_cost;
            entry.subgroup = std::move(sel.member_indices);
        }
        entries.push_back(std::move(entry));
    }
    sort_and_truncate(entries, spec.k);
    return entries;
}

}  // namespace

std::vector<ResultEntry> scan_gnnk(std::span<const SpatioTextualObject> objects,
                                   const QuerySpec& spec) {
    if (objects.empty()) throw std::invalid_argument("no objects to scan");
    const uint32_t n = static_cast<uint32_t>(spec.group.size());
    std::vector<ResultEntry> entries =
        scan_one_size(objects, spec, n, /*exhaustive=*/false);
    // The whole group is the only "subgroup"; report it as such.
    for (ResultEntry& e : entries) e.subgroup = whole_group(n);
    return entries;
}

std::vector<ResultEntry> scan_fsnnk(std::span<const SpatioTextualObject> objects,
                                    const QuerySpec& spec, bool exhaustive) {
    if (objects.empty()) throw std::invalid_argument("no objects to scan");
    if (spec.m < 1 || spec.m > spec.group.size())
        throw std::invalid_argument("subgroup size out of range");
    return scan_one_size(objects, spec, spec.m, exhaustive);
}

std::vector<ResultEntry> scan_mfsnnk(std::span<const SpatioTextualObject> objects,
                                     const QuerySpec& spec) {
    if (objects.empty()) throw std::invalid_argument("no objects to scan");
    const uint32_t n = static_cast<uint32_t>(spec.group.size());
    if (spec.m < 1 || spec.m > n)
        throw std::invalid_argument("minimum subgroup size out of range");
    std::vector<ResultEntry> all;
    for (uint32_t size = spec.m; size <= n; ++size) {
        std::vector<ResultEntry> one =
            scan_one_size(objects, spec, size, /*exhaustive=*/false);
        all.insert(all.end(), std::make_move_iterator(one.begin()),
                   std::make_move_iterator(one.end()));
    }
    return all;
}

}  // namespace gskq
