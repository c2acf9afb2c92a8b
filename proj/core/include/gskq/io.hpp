#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gskq/cost.hpp"
#include "gskq/types.hpp"

namespace gskq {

/// An in-memory dataset: objects plus the vocabulary their keyword ids are
/// interned against. The bounding box covers every object location.
struct Dataset {
    std::vector<SpatioTextualObject> objects;
    Vocabulary vocabulary;
    Rect bounding_box;
};

/// Reads a tab-separated object file: `id<TAB>x<TAB>y<TAB>kw1,kw2,...`.
/// Keywords are interned into a fresh vocabulary in first-seen order.
/// Blank lines and lines starting with '#' are skipped. Throws
/// std::runtime_error naming the offending line on malformed input
/// (bad number, duplicate id, missing field, empty keyword list).
Dataset load_dataset(const std::filesystem::path& path);

/// Writes objects back out in the same tab-separated format.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Reads a query group file: one member per line,
/// `x<TAB>y<TAB>kw1,kw2,...[<TAB>priority]`. Keywords are resolved against
/// an existing vocabulary; unknown tokens throw (a query keyword no object
/// carries can never match and almost always indicates a typo).
QueryGroup load_query_group(const std::filesystem::path& path,
                            const Vocabulary& vocabulary);

/// Writes a query group in the same format, emitting the priority column
/// only when some member's priority differs from 1.
void save_query_group(const QueryGroup& group, const Vocabulary& vocabulary,
                      const std::filesystem::path& path);

/// Reads `keyword<TAB>weight` lines into a per-id weight table aligned with
/// the vocabulary; keywords absent from the file keep weight 1. Unknown
/// tokens throw. Weights must be positive.
std::vector<double> load_weights(const std::filesystem::path& path,
                                 const Vocabulary& vocabulary);

/// The largest weight in the table, or 1 if the table is empty
/// (weights default to 1, so the maximum can never drop below it).
double max_weight(const std::vector<double>& weights);

}  // namespace gskq
