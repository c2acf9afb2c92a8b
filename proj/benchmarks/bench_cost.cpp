// Microbenchmarks for the cost primitives: the per-member blended cost, the
// node lower bound, and the ranked-prefix aggregation the algorithms share.
#include <benchmark/benchmark.h>

#include <vector>

#include "gskq/cost.hpp"
#include "gskq/workload.hpp"

namespace {

using gskq::Aggregate;
using gskq::CostParams;
using gskq::KeywordSet;
using gskq::QueryGroup;
using gskq::QueryPoint;
using gskq::Rect;
using gskq::Rng;
using gskq::SpatioTextualObject;

CostParams bench_params() {
    CostParams params;
    params.alpha = 0.5;
    params.d_max = 141.4;
    params.w_max = 1.0;
    return params;
}

KeywordSet random_keywords(Rng& rng, uint32_t vocabulary, uint32_t count) {
    auto sample = rng.sample_without_replacement(vocabulary, count);
    KeywordSet keywords(sample.begin(), sample.end());
    gskq::sort_unique(keywords);
    return keywords;
}

QueryGroup random_group(uint32_t n, uint32_t keywords_per_member) {
    Rng rng(42, 0);
    QueryGroup group;
    for (uint32_t i = 0; i < n; ++i) {
        QueryPoint member;
        member.location = {rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
        member.keywords = random_keywords(rng, 400, keywords_per_member);
        group.members.push_back(std::move(member));
    }
    return group;
}

SpatioTextualObject random_object() {
    Rng rng(43, 0);
    return {1,
            {rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)},
            random_keywords(rng, 400, 3)};
}

}  // namespace

static void BM_CostObject(benchmark::State& state) {
    const auto params = bench_params();
    const auto group = random_group(1, 4);
    const auto object = random_object();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            gskq::cost_object(group.members[0], object, params));
    }
}
BENCHMARK(BM_CostObject);

static void BM_CostNode(benchmark::State& state) {
    const auto params = bench_params();
    const auto group = random_group(1, 4);
    Rng rng(44, 0);
    const Rect mbr{{20.0, 20.0}, {45.0, 45.0}};
    const KeywordSet summary = random_keywords(rng, 400, 120);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            gskq::cost_node(group.members[0], mbr, summary, params));
    }
}
BENCHMARK(BM_CostNode);

// Per-member costs for a whole group against one object, the inner loop of
// every leaf visit. The argument is the group size.
static void BM_MemberCostsObject(benchmark::State& state) {
    const auto params = bench_params();
    const auto group = random_group(static_cast<uint32_t>(state.range(0)), 4);
    const auto object = random_object();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            gskq::member_costs_object(group, object, params));
    }
}
BENCHMARK(BM_MemberCostsObject)->Arg(4)->Arg(10)->Arg(40);

// Ranking member costs and folding every prefix aggregate — the step that
// turns per-member costs into best subgroups of every size.
static void BM_RankCosts(benchmark::State& state) {
    Rng rng(45, 0);
    std::vector<double> costs(static_cast<size_t>(state.range(0)));
    for (auto& cost : costs) cost = rng.uniform();
    for (auto _ : state) {
        benchmark::DoNotOptimize(gskq::rank_costs(costs, Aggregate::Sum));
    }
}
BENCHMARK(BM_RankCosts)->Arg(4)->Arg(10)->Arg(40);

BENCHMARK_MAIN();
