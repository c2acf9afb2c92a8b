#pragma once

#include <span>
#include <vector>

#include "gskq/query_engine.hpp"
#include "gskq/types.hpp"

namespace gskq {

/// Brute-force reference answers by linear scan over the raw object list.
/// These functions never touch an index, so they stay correct even if the
/// tree or its traversals are broken — which is exactly what makes them
/// usable as the yardstick the engine is tested against. Costs follow the
/// same canonical member-ranking order as the engine, so agreement is
/// checked with ==, not a tolerance.

/// Whole-group scan: every object's aggregate cost, sorted by
/// (cost, object id), truncated to spec.k.
std::vector<ResultEntry> scan_gnnk(std::span<const SpatioTextualObject> objects,
                                   const QuerySpec& spec);

/// Size-m subgroup scan. With exhaustive = true every C(n, m) subset of
/// members is tried per object (n capped at 12) instead of trusting the
/// lowest-m-costs selection — a second, slower derivation of the same
/// answer used to validate the first.
std::vector<ResultEntry> scan_fsnnk(std::span<const SpatioTextualObject> objects,
                                    const QuerySpec& spec,
                                    bool exhaustive = false);

/// scan_fsnnk once per subgroup size in [spec.m, n], concatenated size
/// ascending.
std::vector<ResultEntry> scan_mfsnnk(std::span<const SpatioTextualObject> objects,
                                     const QuerySpec& spec);

}  // namespace gskq
