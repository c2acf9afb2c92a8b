// Acceptance gate: each check prints exactly one [PASS]/[FAIL] line on
// stdout and the binary exits nonzero if any check fails. The checks pin the
// worked cost example, prove the engine equal to the linear-scan oracle over
// hundreds of randomized workloads, audit the tree's lower bounds and the
// best-first pop order, and hold the traversal strategies to their intended
// I/O advantages on a 100,000-object index.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "gskq/cost.hpp"
#include "gskq/irtree.hpp"
#include "gskq/oracle.hpp"
#include "gskq/query_engine.hpp"
#include "gskq/workload.hpp"

namespace {

using gskq::AccessCounters;
using gskq::Aggregate;
using gskq::AlgorithmKind;
using gskq::CostParams;
using gskq::Dataset;
using gskq::GenConfig;
using gskq::IndexReader;
using gskq::IRTreeNode;
using gskq::KeywordSet;
using gskq::PageId;
using gskq::QueryGroup;
using gskq::QueryPoint;
using gskq::QuerySpec;
using gskq::QueryVariant;
using gskq::ResultEntry;
using gskq::Rng;
using gskq::SpatioTextualObject;

struct CheckResult {
    bool pass = false;
    std::string detail;
};

std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir =
        std::filesystem::path(GSKQ_TEST_TMP) /
        ("acceptance-" + std::to_string(::getpid()));
    return dir;
}

std::filesystem::path scratch_file(const std::string& name) {
    return scratch_dir() / name;
}

std::string file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Results must agree with the oracle bit for bit: costs compared with ==,
// subgroups as the exact same index sets.
bool entries_equal(const std::vector<ResultEntry>& lhs,
                   const std::vector<ResultEntry>& rhs) {
    if (lhs.size() != rhs.size()) return false;
    for (size_t i = 0; i < lhs.size(); ++i) {
        if (lhs[i].object_id != rhs[i].object_id) return false;
        if (lhs[i].aggregate_cost != rhs[i].aggregate_cost) return false;
        if (lhs[i].subgroup_size != rhs[i].subgroup_size) return false;
        if (lhs[i].subgroup != rhs[i].subgroup) return false;
    }
    return true;
}

bool counters_equal(const AccessCounters& lhs, const AccessCounters& rhs) {
    return lhs.interior_node_reads == rhs.interior_node_reads &&
           lhs.leaf_node_reads == rhs.leaf_node_reads &&
           lhs.inverted_file_reads == rhs.inverted_file_reads &&
           lhs.objects_scored == rhs.objects_scored &&
           lhs.nodes_pruned == rhs.nodes_pruned &&
           lhs.nodes_enqueued == rhs.nodes_enqueued;
}

// A generated dataset with its persisted index, shared across checks.
struct Corpus {
    GenConfig config;
    Dataset dataset;
    std::filesystem::path path;
    std::unique_ptr<IndexReader> index;
};

Corpus make_corpus(const GenConfig& config, const std::string& name) {
    Corpus corpus;
    corpus.config = config;
    corpus.dataset = gskq::gen_objects(config);
    corpus.path = scratch_file(name);
    gskq::build_index(corpus.dataset, corpus.path, {});
    corpus.index = gskq::open_index(corpus.path);
    return corpus;
}

// Two mid-sized corpora for the randomized equivalence sweeps.
const Corpus& corpus_a() {
    static const Corpus corpus = [] {
        GenConfig config;
        config.seed = 11;
        config.object_count = 2000;
        config.vocabulary_size = 50;
        config.query_space_fraction = 0.01;
        return make_corpus(config, "corpus-a.idx");
    }();
    return corpus;
}

const Corpus& corpus_b() {
    static const Corpus corpus = [] {
        GenConfig config;
        config.seed = 12;
        config.object_count = 2000;
        config.vocabulary_size = 50;
        config.query_space_fraction = 0.01;
        return make_corpus(config, "corpus-b.idx");
    }();
    return corpus;
}

// The large corpus exercising the I/O separation between traversals. The
// keyword texture mirrors a real point-of-interest corpus — one keyword per
// ~77 objects, mean 2.91 keywords per object — so leaf summaries stay
// selective; the query-generation knobs keep their defaults.
const Corpus& corpus_large() {
    static const Corpus corpus = [] {
        GenConfig config;
        config.seed = 51;
        config.object_count = 100000;
        config.vocabulary_size = 1300;
        config.keywords_per_object = 2.91;
        return make_corpus(config, "corpus-large.idx");
    }();
    return corpus;
}

QuerySpec make_spec(const Corpus& corpus, QueryGroup group, Aggregate agg,
                    double alpha, QueryVariant variant, AlgorithmKind algorithm,
                    uint32_t k, uint32_t m) {
    QuerySpec spec;
    spec.group = std::move(group);
    spec.params = corpus.index->default_params();
    spec.params.alpha = alpha;
    spec.params.aggregate = agg;
    spec.variant = variant;
    spec.algorithm = algorithm;
    spec.k = k;
    spec.m = m;
    return spec;
}

constexpr Aggregate kAggregates[] = {Aggregate::Sum, Aggregate::Max,
                                     Aggregate::Min};
constexpr double kAlphas[] = {0.1, 0.5, 1.0};

// The hand-derivable costs of one object for three query users: distances
// 6.5, 1, and 9.5 against d_max = 10, keyword overlaps 1-of-2, 1-of-1, and
// 1-of-2, all weights 1, alpha = 0.5.
CheckResult check_worked_example() {
    CostParams params;
    params.alpha = 0.5;
    params.d_max = 10.0;
    params.w_max = 1.0;

    // Vocabulary ids: t1=0, t2=1, ..., t6=5.
    const SpatioTextualObject target{6, {0.0, 0.0}, {0, 2, 3}};  // t1,t3,t4
    const QueryPoint near_match{{6.5, 0.0}, {2, 5}, 1.0};        // t3,t6
    const QueryPoint subset_match{{1.0, 0.0}, {0}, 1.0};         // t1
    const QueryPoint far_match{{9.5, 0.0}, {2, 4}, 1.0};         // t3,t5

    const double c3 = gskq::cost_object(near_match, target, params);
    const double c4 = gskq::cost_object(subset_match, target, params);
    const double c5 = gskq::cost_object(far_match, target, params);

    const double err = std::max({std::fabs(c3 - 0.575), std::fabs(c4 - 0.05),
                                 std::fabs(c5 - 0.725)});
    std::ostringstream detail;
    detail << "costs " << c3 << ", " << c4 << ", " << c5 << "; max error "
           << err;
    return {err <= 1e-9, detail.str()};
}

// Runs all six algorithms on one workload and compares each against the
// matching linear scan. Returns false on the first disagreement.
bool workload_matches_oracle(const Corpus& corpus, const QueryGroup& group,
                             Aggregate agg, double alpha, uint32_t k,
                             uint32_t m) {
    QuerySpec spec = make_spec(corpus, group, agg, alpha, QueryVariant::GNNK,
                               AlgorithmKind::BB, k, 0);
    const auto whole_group = gskq::scan_gnnk(corpus.dataset.objects, spec);
    if (!entries_equal(gskq::gnnk_bb(*corpus.index, spec).entries, whole_group))
        return false;
    spec.algorithm = AlgorithmKind::BF;
    if (!entries_equal(gskq::gnnk_bf(*corpus.index, spec).entries, whole_group))
        return false;

    spec.variant = QueryVariant::FSNNK;
    spec.m = m;
    spec.algorithm = AlgorithmKind::BB;
    const auto one_size = gskq::scan_fsnnk(corpus.dataset.objects, spec);
    if (!entries_equal(gskq::fsnnk_bb(*corpus.index, spec).entries, one_size))
        return false;
    spec.algorithm = AlgorithmKind::BF;
    if (!entries_equal(gskq::fsnnk_bf(*corpus.index, spec).entries, one_size))
        return false;

    spec.variant = QueryVariant::MFSNNK;
    spec.algorithm = AlgorithmKind::N;
    const auto all_sizes = gskq::scan_mfsnnk(corpus.dataset.objects, spec);
    if (!entries_equal(gskq::mfsnnk_n(*corpus.index, spec).entries, all_sizes))
        return false;
    spec.algorithm = AlgorithmKind::BF;
    if (!entries_equal(gskq::mfsnnk_bf(*corpus.index, spec).entries, all_sizes))
        return false;
    return true;
}

// Every algorithm must reproduce the oracle exactly over a randomized sweep
// of group sizes, blend weights, aggregates, and result depths — and the
// whole sweep must stay inside a two-minute budget.
CheckResult check_oracle_equivalence() {
    const auto started = std::chrono::steady_clock::now();
    int workloads = 0;
    int mismatches = 0;
    uint64_t salt = 100;
    for (const Corpus* corpus : {&corpus_a(), &corpus_b()}) {
        for (uint32_t n = 2; n <= 10; ++n) {
            GenConfig config = corpus->config;
            config.group_size = n;
            for (const double alpha : kAlphas) {
                for (const Aggregate agg : kAggregates) {
                    for (const uint32_t k : {1u, 5u}) {
                        const QueryGroup group = gskq::gen_query_group(
                            config, corpus->dataset, salt++);
                        const uint32_t m = (n + 1) / 2;
                        ++workloads;
                        if (!workload_matches_oracle(*corpus, group, agg, alpha,
                                                     k, m)) {
                            ++mismatches;
                        }
                    }
                }
            }
        }
    }
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - started;
    std::ostringstream detail;
    detail << workloads << " workloads, " << mismatches << " mismatches, "
           << elapsed.count() << " s";
    return {workloads >= 200 && mismatches == 0 && elapsed.count() < 120.0,
            detail.str()};
}

// The stored cost bounds must be genuine lower bounds: a parent node never
// costs more than any child, and a leaf never costs more than any object in
// it, for any query point.
CheckResult check_lower_bounds() {
    GenConfig config;
    config.seed = 31;
    config.object_count = 10000;
    const Dataset dataset = gskq::gen_objects(config);
    const auto path = scratch_file("bounds.idx");
    gskq::build_index(dataset, path, {});
    const auto index = gskq::open_index(path);

    // Materialize the whole tree once; the cost audits then run in memory.
    AccessCounters counters;
    std::map<PageId, IRTreeNode> nodes;
    std::map<PageId, std::vector<KeywordSet>> leaf_keywords;
    std::vector<PageId> pending{index->header().root_page};
    while (!pending.empty()) {
        const PageId page = pending.back();
        pending.pop_back();
        IRTreeNode node = index->read_node(page, counters);
        if (node.is_leaf()) {
            const auto postings =
                index->read_postings(node.postings_page, counters);
            leaf_keywords[page] = gskq::leaf_object_keywords(node, postings);
        } else {
            for (const auto& child : node.children) pending.push_back(child.page);
        }
        nodes.emplace(page, std::move(node));
    }

    CostParams params = index->default_params();
    params.alpha = 0.5;
    const auto& space = config.data_space;
    Rng rng(99, 7);
    uint64_t comparisons = 0;
    uint64_t violations = 0;
    for (int i = 0; i < 50; ++i) {
        QueryPoint q;
        q.location = {rng.uniform(space.lo.x, space.hi.x),
                      rng.uniform(space.lo.y, space.hi.y)};
        const auto sample = rng.sample_without_replacement(
            static_cast<uint32_t>(dataset.vocabulary.size()),
            1 + static_cast<uint32_t>(rng.below(4)));
        q.keywords = KeywordSet(sample.begin(), sample.end());
        gskq::sort_unique(q.keywords);

        for (const auto& [page, node] : nodes) {
            const double bound =
                gskq::cost_node(q, node.mbr, node.summary, params);
            if (node.is_leaf()) {
                const auto& keywords = leaf_keywords.at(page);
                for (size_t j = 0; j < node.objects.size(); ++j) {
                    const SpatioTextualObject object{node.objects[j].object_id,
                                                     node.objects[j].location,
                                                     keywords[j]};
                    ++comparisons;
                    if (bound > gskq::cost_object(q, object, params) + 1e-12)
                        ++violations;
                }
            } else {
                for (const auto& child : node.children) {
                    const auto& child_node = nodes.at(child.page);
                    ++comparisons;
                    if (bound > gskq::cost_node(q, child_node.mbr,
                                                child_node.summary, params) +
                                    1e-12)
                        ++violations;
                }
            }
        }
    }
    std::ostringstream detail;
    detail << comparisons << " bound comparisons, " << violations
           << " violations";
    return {violations == 0, detail.str()};
}

// Best-first pops must come off the frontier in nondecreasing key order, and
// the first object popped must already be the optimum the oracle finds.
CheckResult check_pop_order() {
    const Corpus& corpus = corpus_a();
    GenConfig config = corpus.config;
    config.group_size = 8;
    int ordered = 0;
    int optimum_first = 0;
    for (int i = 0; i < 100; ++i) {
        const QueryGroup group =
            gskq::gen_query_group(config, corpus.dataset, 5000 + i);
        QuerySpec spec = make_spec(corpus, group, Aggregate::Sum, 0.5,
                                   QueryVariant::GNNK, AlgorithmKind::BF, 5, 0);
        spec.trace_pops = true;
        const auto result = gskq::gnnk_bf(*corpus.index, spec);

        bool nondecreasing = true;
        for (size_t j = 1; j < result.pops.size(); ++j) {
            if (result.pops[j].key < result.pops[j - 1].key) {
                nondecreasing = false;
                break;
            }
        }
        ordered += nondecreasing;

        const auto oracle = gskq::scan_gnnk(corpus.dataset.objects, spec);
        for (const auto& pop : result.pops) {
            if (!pop.is_object) continue;
            optimum_first += (pop.id == oracle.front().object_id);
            break;
        }
    }
    std::ostringstream detail;
    detail << ordered << "/100 runs ordered, " << optimum_first
           << "/100 popped the optimum first";
    return {ordered == 100 && optimum_first == 100, detail.str()};
}

// On the large corpus, the best-first traversal must beat branch-and-bound
// on logical page accesses: no worse in at least 95 of 100 groups and at
// most 0.7x its mean.
CheckResult check_page_access_trend() {
    const Corpus& corpus = corpus_large();
    int no_worse = 0;
    uint64_t total_bb = 0;
    uint64_t total_bf = 0;
    for (int i = 0; i < 100; ++i) {
        const QueryGroup group =
            gskq::gen_query_group(corpus.config, corpus.dataset, 7000 + i);
        QuerySpec spec = make_spec(corpus, group, Aggregate::Sum, 0.5,
                                   QueryVariant::GNNK, AlgorithmKind::BB, 10, 0);
        const auto bb = gskq::gnnk_bb(*corpus.index, spec);
        spec.algorithm = AlgorithmKind::BF;
        const auto bf = gskq::gnnk_bf(*corpus.index, spec);
        const uint64_t bb_pages = bb.counters.page_accesses();
        const uint64_t bf_pages = bf.counters.page_accesses();
        no_worse += (bf_pages <= bb_pages);
        total_bb += bb_pages;
        total_bf += bf_pages;
    }
    const double ratio =
        static_cast<double>(total_bf) / static_cast<double>(total_bb);
    std::ostringstream detail;
    detail << "best-first no worse in " << no_worse
           << "/100 groups, mean page ratio " << ratio;
    return {no_worse >= 95 && ratio <= 0.7, detail.str()};
}

// The single-pass subgroup-range traversal must return exactly what the
// repeated per-size passes return, while reading fewer pages on average, at
// every minimum-size setting.
CheckResult check_single_pass_gain() {
    const Corpus& corpus = corpus_large();
    std::ostringstream detail;
    bool pass = true;
    bool first = true;
    for (const uint32_t m : {4u, 6u, 8u}) {
        uint64_t total_repeated = 0;
        uint64_t total_single = 0;
        int identical = 0;
        for (int i = 0; i < 100; ++i) {
            const QueryGroup group =
                gskq::gen_query_group(corpus.config, corpus.dataset, 7000 + i);
            QuerySpec spec =
                make_spec(corpus, group, Aggregate::Sum, 0.5,
                          QueryVariant::MFSNNK, AlgorithmKind::N, 10, m);
            const auto repeated = gskq::mfsnnk_n(*corpus.index, spec);
            spec.algorithm = AlgorithmKind::BF;
            const auto single = gskq::mfsnnk_bf(*corpus.index, spec);
            identical += entries_equal(repeated.entries, single.entries);
            total_repeated += repeated.counters.page_accesses();
            total_single += single.counters.page_accesses();
        }
        pass = pass && identical == 100 && total_single < total_repeated;
        detail << (first ? "" : "; ") << "m=" << m << ": page ratio "
               << static_cast<double>(total_single) /
                      static_cast<double>(total_repeated)
               << ", " << identical << "/100 identical";
        first = false;
    }
    return {pass, detail.str()};
}

// The relaxed admission bound may change how much is read but never what is
// returned. The page-access delta is reported unconstrained.
CheckResult check_relaxed_prune() {
    const Corpus& corpus = corpus_a();
    int identical = 0;
    int64_t delta_sum = 0;
    int64_t delta_min = 0;
    int64_t delta_max = 0;
    for (int i = 0; i < 100; ++i) {
        const uint32_t n = 3 + (i % 8);
        GenConfig config = corpus.config;
        config.group_size = n;
        const QueryGroup group =
            gskq::gen_query_group(config, corpus.dataset, 9000 + i);
        QuerySpec spec = make_spec(
            corpus, group, kAggregates[i % 3], kAlphas[(i / 3) % 3],
            QueryVariant::MFSNNK, AlgorithmKind::BF, 5, 1 + (i % n));
        const auto normal = gskq::mfsnnk_bf(*corpus.index, spec);
        spec.relaxed_prune = true;
        const auto relaxed = gskq::mfsnnk_bf(*corpus.index, spec);
        identical += entries_equal(normal.entries, relaxed.entries);
        const int64_t delta =
            static_cast<int64_t>(relaxed.counters.page_accesses()) -
            static_cast<int64_t>(normal.counters.page_accesses());
        delta_sum += delta;
        delta_min = std::min(delta_min, delta);
        delta_max = std::max(delta_max, delta);
    }
    std::ostringstream detail;
    detail << identical << "/100 identical; page delta mean "
           << static_cast<double>(delta_sum) / 100.0 << ", min " << delta_min
           << ", max " << delta_max;
    return {identical == 100, detail.str()};
}

// Deep result lists: the full top-10 of every algorithm must equal the
// oracle's top-10, ordered by (cost, object id).
CheckResult check_top_k() {
    const Corpus& corpus = corpus_b();
    int matched = 0;
    for (int i = 0; i < 50; ++i) {
        const uint32_t n = 2 + (i % 9);
        GenConfig config = corpus.config;
        config.group_size = n;
        const QueryGroup group =
            gskq::gen_query_group(config, corpus.dataset, 11000 + i);
        matched += workload_matches_oracle(corpus, group, kAggregates[i % 3],
                                           kAlphas[(i / 3) % 3], 10,
                                           (n + 1) / 2);
    }
    std::ostringstream detail;
    detail << matched << "/50 workloads matched at k=10";
    return {matched == 50, detail.str()};
}

// Same seed in, same bits out: regenerating and rebuilding must reproduce
// the index file byte for byte, and rerunning a query must reproduce both
// results and counters.
CheckResult check_determinism() {
    GenConfig config;
    config.seed = 71;
    config.object_count = 3000;
    config.vocabulary_size = 60;
    config.query_space_fraction = 0.01;

    const Dataset first = gskq::gen_objects(config);
    const Dataset second = gskq::gen_objects(config);
    const auto path_a = scratch_file("rebuild-a.idx");
    const auto path_b = scratch_file("rebuild-b.idx");
    gskq::build_index(first, path_a, {});
    gskq::build_index(second, path_b, {});
    const bool files_identical = file_bytes(path_a) == file_bytes(path_b);

    const auto index_a = gskq::open_index(path_a);
    const auto index_b = gskq::open_index(path_b);
    Corpus corpus;
    corpus.config = config;

    const QueryGroup group_a = gskq::gen_query_group(config, first, 5);
    const QueryGroup group_b = gskq::gen_query_group(config, second, 5);
    QuerySpec spec;
    spec.group = group_a;
    spec.params = index_a->default_params();
    spec.params.alpha = 0.5;
    spec.params.aggregate = Aggregate::Sum;
    spec.variant = QueryVariant::MFSNNK;
    spec.algorithm = AlgorithmKind::BF;
    spec.k = 5;
    spec.m = 3;

    const auto run1 = gskq::mfsnnk_bf(*index_a, spec);
    const auto run2 = gskq::mfsnnk_bf(*index_a, spec);
    QuerySpec spec_b = spec;
    spec_b.group = group_b;
    spec_b.params = index_b->default_params();
    spec_b.params.alpha = 0.5;
    spec_b.params.aggregate = Aggregate::Sum;
    const auto run3 = gskq::mfsnnk_bf(*index_b, spec_b);

    const bool reruns_identical =
        entries_equal(run1.entries, run2.entries) &&
        counters_equal(run1.counters, run2.counters) &&
        entries_equal(run1.entries, run3.entries) &&
        counters_equal(run1.counters, run3.counters);

    std::ostringstream detail;
    detail << (files_identical ? "index files byte-identical"
                               : "index files differ")
           << "; " << (reruns_identical ? "reruns identical" : "reruns differ");
    return {files_identical && reruns_identical, detail.str()};
}

}  // namespace

int main() {
    std::filesystem::create_directories(scratch_dir());

    bool all_pass = true;
    const auto run = [&](const char* name,
                         const std::function<CheckResult()>& check) {
        CheckResult result;
        try {
            result = check();
        } catch (const std::exception& error) {
            result = {false, std::string("exception: ") + error.what()};
        }
        all_pass = all_pass && result.pass;
        std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << name;
        if (!result.detail.empty()) std::cout << " — " << result.detail;
        std::cout << std::endl;
    };

    run("1. worked-example costs", check_worked_example);
    run("2. oracle equivalence across randomized workloads",
        check_oracle_equivalence);
    run("3. node lower bounds never exceed descendant costs",
        check_lower_bounds);
    run("4. best-first pops ordered, optimum popped first", check_pop_order);
    run("5. best-first reads fewer pages than branch-and-bound",
        check_page_access_trend);
    run("6. single-pass subgroup range beats repeated passes",
        check_single_pass_gain);
    run("7. relaxed pruning never changes results", check_relaxed_prune);
    run("8. top-10 results match the oracle exactly", check_top_k);
    run("9. rebuilds and reruns are bit-identical", check_determinism);

    std::error_code cleanup_error;
    std::filesystem::remove_all(scratch_dir(), cleanup_error);
    return all_pass ? 0 : 1;
}
