#include "gskq/query_engine.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace gskq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Clock = std::chrono::steady_clock;

// Keeps the k lowest candidates seen so far, ordered by (cost, object id).
// k is small (tens), so linear bookkeeping beats a heap in both clarity and
// constant factor.
class KBest {
public:
    explicit KBest(uint32_t k) : k_(k) {}

    /// Cost a subtree must be able to reach (or match — an equal-cost object
    /// with a smaller id still displaces the current worst) to matter.
    double bound() const {
        return entries_.size() < k_ ? kInf : entries_[worst_].aggregate_cost;
    }

    void offer(ResultEntry entry) {
        if (entries_.size() < k_) {
            entries_.push_back(std::move(entry));
            refresh_worst();
            return;
        }
        const ResultEntry& w = entries_[worst_];
        if (entry.aggregate_cost < w.aggregate_cost ||
            (entry.aggregate_cost == w.aggregate_cost &&
             entry.object_id < w.object_id)) {
            entries_[worst_] = std::move(entry);
            refresh_worst();
        }
    }

    std::vector<ResultEntry> take_sorted() {
        std::sort(entries_.begin(), entries_.end(),
                  [](const ResultEntry& a, const ResultEntry& b) {
                      if (a.aggregate_cost != b.aggregate_cost)
                          return a.aggregate_cost < b.aggregate_cost;
                      return a.object_id < b.object_id;
                  });
        return std::move(entries_);
    }

private:
    void refresh_worst() {
        worst_ = 0;
        for (size_t i = 1; i < entries_.size(); ++i) {
            const ResultEntry& a = entries_[i];
            const ResultEntry& w = entries_[worst_];
            if (a.aggregate_cost > w.aggregate_cost ||
                (a.aggregate_cost == w.aggregate_cost &&
                 a.object_id > w.object_id))
                worst_ = i;
        }
    }

    uint32_t k_;
    size_t worst_ = 0;
    std::vector<ResultEntry> entries_;
};

ResultEntry make_entry(uint32_t object_id, const RankedCosts& ranked,
                       uint32_t size) {
    ResultEntry e;
    e.object_id = object_id;
    e.aggregate_cost = ranked.aggregate_for(size);
    e.subgroup = ranked.subgroup(size);
    e.subgroup_size = size;
    return e;
}

RankedCosts rank_child(const QuerySpec& spec, const ChildRef& child) {
    return rank_costs(
        member_costs_node(spec.group, child.mbr, child.summary, spec.params),
        spec.params.aggregate);
}

// Reads a leaf's inverted file, rebuilds each member object's keyword set,
// and hands every object's ranked member costs to `sink`. This is the only
// place objects are scored, so the engine and the linear-scan reference
// necessarily price objects identically.
template <typename Sink>
void score_leaf(const IndexReader& index, const IRTreeNode& leaf,
                const QuerySpec& spec, AccessCounters& counters, Sink sink) {
    const Postings postings =
        index.read_postings(leaf.postings_page, counters);
    std::vector<KeywordSet> keywords = leaf_object_keywords(leaf, postings);
    for (size_t i = 0; i < leaf.objects.size(); ++i) {
        SpatioTextualObject o;
        o.id = leaf.objects[i].object_id;
        o.location = leaf.objects[i].location;
        o.keywords = std::move(keywords[i]);
        const std::vector<double> costs =
            member_costs_object(spec.group, o, spec.params);
        ++counters.objects_scored;
        sink(o.id, rank_costs(costs, spec.params.aggregate));
    }
}

// Depth-first branch and bound for one subgroup size: children are pushed
// in storage order when they beat (or tie) the current k-th best cost, and
// the bound is re-checked at pop time because it may have tightened since
// the push.
QueryResult run_bb(const IndexReader& index, const QuerySpec& spec,
                   uint32_t size) {
    const auto start = Clock::now();
    QueryResult result;
    KBest best(spec.k);
    struct Frame {
        PageId page;
        double cost;
    };
    std::vector<Frame> stack;
    stack.push_back({index.header().root_page, 0.0});
    ++result.counters.nodes_enqueued;
    while (!stack.empty()) {
        const Frame frame = stack.back();
        stack.pop_back();
        if (spec.trace_pops)
            result.pops.push_back({false, frame.cost, frame.page});
        if (!spec.no_prune && frame.cost > best.bound()) {
            ++result.counters.nodes_pruned;
            continue;
        }
        const IRTreeNode node = index.read_node(frame.page, result.counters);
        if (node.is_leaf()) {
            score_leaf(index, node, spec, result.counters,
                       [&](uint32_t id, const RankedCosts& ranked) {
                           best.offer(make_entry(id, ranked, size));
                       });
            continue;
        }
        for (const ChildRef& child : node.children) {
            const double cost = rank_child(spec, child).aggregate_for(size);
            if (spec.no_prune || cost <= best.bound()) {
                stack.push_back({child.page, cost});
                ++result.counters.nodes_enqueued;
            } else {
                ++result.counters.nodes_pruned;
            }
        }
    }
    result.entries = best.take_sorted();
    result.elapsed = Clock::now() - start;
    return result;
}

// Best-first traversal for one subgroup size. Everything goes through one
// min-queue; node costs lower-bound their subtrees, so the first k objects
// popped are the answer. Ties expand nodes before emitting objects — an
// equal-cost subtree may still hide an object that wins the id tiebreak.
QueryResult run_bf(const IndexReader& index, const QuerySpec& spec,
                   uint32_t size) {
    const auto start = Clock::now();
    QueryResult result;
    struct Item {
        double key;
        bool is_object;
        uint32_t id;  // page id for nodes, object id for objects
        ResultEntry entry;
    };
    auto after = [](const Item& a, const Item& b) {
        if (a.key != b.key) return a.key > b.key;
        if (a.is_object != b.is_object) return a.is_object;
        return a.id > b.id;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(after)> queue(after);
    queue.push({0.0, false, index.header().root_page, {}});
    ++result.counters.nodes_enqueued;
    while (!queue.empty()) {
        Item item = queue.top();
        queue.pop();
        if (spec.trace_pops)
            result.pops.push_back({item.is_object, item.key, item.id});
        if (item.is_object) {
            result.entries.push_back(std::move(item.entry));
            if (result.entries.size() >= spec.k) break;
            continue;
        }
        const IRTreeNode node = index.read_node(item.id, result.counters);
        if (node.is_leaf()) {
            score_leaf(index, node, spec, result.counters,
                       [&](uint32_t id, const RankedCosts& ranked) {
                           ResultEntry e = make_entry(id, ranked, size);
                           const double key = e.aggregate_cost;
                           queue.push({key, true, id, std::move(e)});
                       });
        } else {
            for (const ChildRef& child : node.children) {
                queue.push({rank_child(spec, child).aggregate_for(size), false,
                            child.page, {}});
                ++result.counters.nodes_enqueued;
            }
        }
    }
    result.elapsed = Clock::now() - start;
    return result;
}

// All subgroup sizes in one pass. The queue holds nodes only (keyed by the
// sum of the per-size subgroup aggregates, ties by page id); leaves feed
// the per-size k-bests directly, and a node stays interesting while any
// size's stored cost beats that size's current k-th best. The relaxed test
// compares only the size-m cost against the loosest (size-n) bound — one
// comparison instead of up to n−m+1, at the price of admitting more nodes.
QueryResult run_mfsnnk_bf(const IndexReader& index, const QuerySpec& spec) {
    const auto start = Clock::now();
    QueryResult result;
    const uint32_t n = static_cast<uint32_t>(spec.group.size());
    const uint32_t m = spec.m;
    const uint32_t sizes = n - m + 1;
    std::vector<KBest> best(sizes, KBest(spec.k));

    // Current k-th best cost for one subgroup size (infinite until k found).
    auto min_cost = [&](uint32_t s) { return best[s - m].bound(); };
    // size_costs holds the stored per-size aggregates: one entry (size m)
    // in relaxed mode, all of m..n otherwise.
    auto admit = [&](const std::vector<double>& size_costs) {
        if (spec.no_prune) return true;
        if (spec.relaxed_prune) return size_costs[0] <= min_cost(n);
        for (uint32_t i = 0; i < sizes; ++i)
            if (size_costs[i] <= min_cost(m + i)) return true;
        return false;
    };

    struct Item {
        double key;
        PageId page;
        std::vector<double> size_costs;
    };
    auto after = [](const Item& a, const Item& b) {
        if (a.key != b.key) return a.key > b.key;
        return a.page > b.page;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(after)> queue(after);
    queue.push({0.0, index.header().root_page,
                std::vector<double>(spec.relaxed_prune ? 1 : sizes, 0.0)});
    ++result.counters.nodes_enqueued;

    while (!queue.empty()) {
        Item item = queue.top();
        queue.pop();
        if (spec.trace_pops) result.pops.push_back({false, item.key, item.page});
        if (!admit(item.size_costs)) {
            ++result.counters.nodes_pruned;
            continue;
        }
        const IRTreeNode node = index.read_node(item.page, result.counters);
        if (node.is_leaf()) {
            score_leaf(index, node, spec, result.counters,
                       [&](uint32_t id, const RankedCosts& ranked) {
                           for (uint32_t s = m; s <= n; ++s)
                               best[s - m].offer(make_entry(id, ranked, s));
                       });
            continue;
        }
        for (const ChildRef& child : node.children) {
            const RankedCosts ranked = rank_child(spec, child);
            std::vector<double> size_costs;
            double key = 0.0;
            if (spec.relaxed_prune) {
                size_costs.push_back(ranked.aggregate_for(m));
                key = size_costs[0];
            } else {
                size_costs.reserve(sizes);
                for (uint32_t s = m; s <= n; ++s) {
                    size_costs.push_back(ranked.aggregate_for(s));
                    key += size_costs.back();
                }
            }
            if (admit(size_costs)) {
                queue.push({key, child.page, std::move(size_costs)});
                ++result.counters.nodes_enqueued;
            } else {
                ++result.counters.nodes_pruned;
            }
        }
    }

    for (uint32_t s = m; s <= n; ++s) {
        std::vector<ResultEntry> one = best[s - m].take_sorted();
        result.entries.insert(result.entries.end(),
                              std::make_move_iterator(one.begin()),
                              std::make_move_iterator(one.end()));
    }
    result.elapsed = Clock::now() - start;
    return result;
}

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

const char* to_string(QueryVariant v) {
    switch (v) {
        case QueryVariant::GNNK: return "gnnk";
        case QueryVariant::FSNNK: return "fsnnk";
        case QueryVariant::MFSNNK: return "mfsnnk";
    }
    return "?";
}

const char* to_string(AlgorithmKind a) {
    switch (a) {
        case AlgorithmKind::BB: return "bb";
        case AlgorithmKind::BF: return "bf";
        case AlgorithmKind::N: return "n";
    }
    return "?";
}

void QuerySpec::validate() const {
    require(!group.members.empty(), "query group is empty");
    for (const QueryPoint& q : group.members) {
        require(!q.keywords.empty(), "query member has no keywords");
        require(q.priority > 0.0, "query member priority must be positive");
    }
    params.validate();
    require(k >= 1, "k must be at least 1");
    if (variant != QueryVariant::GNNK)
        require(m >= 1 && m <= group.size(),
                "subgroup size must be between 1 and the group size");
    require(algorithm != AlgorithmKind::N || variant == QueryVariant::MFSNNK,
            "the repeated-pass algorithm applies only to mfsnnk");
    require(!relaxed_prune || (variant == QueryVariant::MFSNNK &&
                               algorithm == AlgorithmKind::BF),
            "relaxed pruning applies only to mfsnnk-bf");
}

std::vector<ResultEntry> QueryResult::entries_for_size(uint32_t size) const {
    std::vector<ResultEntry> out;
    for (const ResultEntry& e : entries)
        if (e.subgroup_size == size) out.push_back(e);
    return out;
}

QueryResult gnnk_bb(const IndexReader& index, const QuerySpec& spec) {
    spec.validate();
    require(spec.variant == QueryVariant::GNNK &&
                spec.algorithm == AlgorithmKind::BB,
            "spec does not request gnnk-bb");
    return run_bb(index, spec, static_cast<uint32_t>(spec.group.size()));
}

QueryResult gnnk_bf(const IndexReader& index, const QuerySpec& spec) {
    spec.validate();
    require(spec.variant == QueryVariant::GNNK &&
                spec.algorithm == AlgorithmKind::BF,
            "spec does not request gnnk-bf");
    return run_bf(index, spec, static_cast<uint32_t>(spec.group.size()));
}

QueryResult fsnnk_bb(const IndexReader& index, const QuerySpec& spec) {
    spec.validate();
    require(spec.variant == QueryVariant::FSNNK &&
                spec.algorithm == AlgorithmKind::BB,
            "spec does not request fsnnk-bb");
    return run_bb(index, spec, spec.m);
}

QueryResult fsnnk_bf(const IndexReader& index, const QuerySpec& spec) {
    spec.validate();
    require(spec.variant == QueryVariant::FSNNK &&
                spec.algorithm == AlgorithmKind::BF,
            "spec does not request fsnnk-bf");
    return run_bf(index, spec, spec.m);
}

QueryResult mfsnnk_n(const IndexReader& index, const QuerySpec& spec) {
    spec.validate();
    require(spec.variant == QueryVariant::MFSNNK &&
                spec.algorithm == AlgorithmKind::N,
            "spec does not request mfsnnk-n");
    const auto start = Clock::now();
    QueryResult result;
    const uint32_t n = static_cast<uint32_t>(spec.group.size());
    for (uint32_t size = spec.m; size <= n; ++size) {
        const QueryResult pass = run_bf(index, spec, size);
        result.entries.insert(result.entries.end(), pass.entries.begin(),
                              pass.entries.end());
        result.counters += pass.counters;
        result.pops.insert(result.pops.end(), pass.pops.begin(),
                           pass.pops.end());
    }
    result.elapsed = Clock::now() - start;
    return result;
}

QueryResult mfsnnk_bf(const IndexReader& index, const QuerySpec& spec) {
    spec.validate();
    require(spec.variant == QueryVariant::MFSNNK &&
                spec.algorithm == AlgorithmKind::BF,
            "spec does not request mfsnnk-bf");
    return run_mfsnnk_bf(index, spec);
}

QueryResult run_query(const IndexReader& index, const QuerySpec& spec) {
    spec.validate();
    switch (spec.variant) {
        case QueryVariant::GNNK:
            return spec.algorithm == AlgorithmKind::BB ? gnnk_bb(index, spec)
                                                       : gnnk_bf(index, spec);
        case QueryVariant::FSNNK:
            return spec.algorithm == AlgorithmKind::BB ? fsnnk_bb(index, spec)
                                                       : fsnnk_bf(index, spec);
        case QueryVariant::MFSNNK:
            return spec.algorithm == AlgorithmKind::N ? mfsnnk_n(index, spec)
                                                      : mfsnnk_bf(index, spec);
    }
    throw std::invalid_argument("unknown query variant");
}

}  // namespace gskq
