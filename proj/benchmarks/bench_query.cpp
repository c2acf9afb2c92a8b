// End-to-end query benchmarks over a persisted 20,000-object index: the
// branch-and-bound/best-first pairs for whole-group and subgroup queries,
// the subgroup-range strategies, and the bulk loader itself. Page-access
// counters are reported alongside wall time.
#include <benchmark/benchmark.h>

#include <filesystem>
#include <memory>

#include "gskq/irtree.hpp"
#include "gskq/query_engine.hpp"
#include "gskq/workload.hpp"

namespace {

using gskq::Aggregate;
using gskq::AlgorithmKind;
using gskq::Dataset;
using gskq::GenConfig;
using gskq::IndexReader;
using gskq::QueryResult;
using gskq::QuerySpec;
using gskq::QueryVariant;

struct BenchCorpus {
    GenConfig config;
    Dataset dataset;
    std::filesystem::path path;
    std::unique_ptr<IndexReader> index;
};

const BenchCorpus& corpus() {
    static const BenchCorpus shared = [] {
        BenchCorpus corpus;
        corpus.config.seed = 7;
        corpus.config.object_count = 20000;
        corpus.config.vocabulary_size = 300;
        corpus.config.keywords_per_object = 2.91;
        corpus.dataset = gskq::gen_objects(corpus.config);
        corpus.path = std::filesystem::temp_directory_path() /
                      "gskq-bench-corpus.idx";
        gskq::build_index(corpus.dataset, corpus.path, {});
        corpus.index = gskq::open_index(corpus.path);
        return corpus;
    }();
    return shared;
}

QuerySpec make_spec(QueryVariant variant, AlgorithmKind algorithm, uint32_t k,
                    uint32_t m) {
    const BenchCorpus& shared = corpus();
    QuerySpec spec;
    spec.group = gskq::gen_query_group(shared.config, shared.dataset, 1);
    spec.params = shared.index->default_params();
    spec.params.alpha = 0.5;
    spec.params.aggregate = Aggregate::Sum;
    spec.variant = variant;
    spec.algorithm = algorithm;
    spec.k = k;
    spec.m = m;
    return spec;
}

void report_pages(benchmark::State& state, const QueryResult& result) {
    state.counters["pages"] =
        static_cast<double>(result.counters.page_accesses());
}

}  // namespace

static void BM_GnnkBB(benchmark::State& state) {
    const auto spec = make_spec(QueryVariant::GNNK, AlgorithmKind::BB,
                                static_cast<uint32_t>(state.range(0)), 0);
    QueryResult result;
    for (auto _ : state) {
        result = gskq::gnnk_bb(*corpus().index, spec);
        benchmark::DoNotOptimize(result);
    }
    report_pages(state, result);
}
BENCHMARK(BM_GnnkBB)->Arg(1)->Arg(10);

static void BM_GnnkBF(benchmark::State& state) {
    const auto spec = make_spec(QueryVariant::GNNK, AlgorithmKind::BF,
                                static_cast<uint32_t>(state.range(0)), 0);
    QueryResult result;
    for (auto _ : state) {
        result = gskq::gnnk_bf(*corpus().index, spec);
        benchmark::DoNotOptimize(result);
    }
    report_pages(state, result);
}
BENCHMARK(BM_GnnkBF)->Arg(1)->Arg(10);

static void BM_FsnnkBB(benchmark::State& state) {
    const auto spec = make_spec(QueryVariant::FSNNK, AlgorithmKind::BB, 10, 6);
    QueryResult result;
    for (auto _ : state) {
        result = gskq::fsnnk_bb(*corpus().index, spec);
        benchmark::DoNotOptimize(result);
    }
    report_pages(state, result);
}
BENCHMARK(BM_FsnnkBB);

static void BM_FsnnkBF(benchmark::State& state) {
    const auto spec = make_spec(QueryVariant::FSNNK, AlgorithmKind::BF, 10, 6);
    QueryResult result;
    for (auto _ : state) {
        result = gskq::fsnnk_bf(*corpus().index, spec);
        benchmark::DoNotOptimize(result);
    }
    report_pages(state, result);
}
BENCHMARK(BM_FsnnkBF);

// The repeated-pass baseline answers one subgroup size per traversal; the
// argument is the minimum size, so smaller values mean more passes.
static void BM_MfsnnkRepeated(benchmark::State& state) {
    const auto spec =
        make_spec(QueryVariant::MFSNNK, AlgorithmKind::N, 10,
                  static_cast<uint32_t>(state.range(0)));
    QueryResult result;
    for (auto _ : state) {
        result = gskq::mfsnnk_n(*corpus().index, spec);
        benchmark::DoNotOptimize(result);
    }
    report_pages(state, result);
}
BENCHMARK(BM_MfsnnkRepeated)->Arg(4)->Arg(6)->Arg(8);

static void BM_MfsnnkSinglePass(benchmark::State& state) {
    const auto spec =
        make_spec(QueryVariant::MFSNNK, AlgorithmKind::BF, 10,
                  static_cast<uint32_t>(state.range(0)));
    QueryResult result;
    for (auto _ : state) {
        result = gskq::mfsnnk_bf(*corpus().index, spec);
        benchmark::DoNotOptimize(result);
    }
    report_pages(state, result);
}
BENCHMARK(BM_MfsnnkSinglePass)->Arg(4)->Arg(6)->Arg(8);

static void BM_MfsnnkSinglePassRelaxed(benchmark::State& state) {
    auto spec = make_spec(QueryVariant::MFSNNK, AlgorithmKind::BF, 10,
                          static_cast<uint32_t>(state.range(0)));
    spec.relaxed_prune = true;
    QueryResult result;
    for (auto _ : state) {
        result = gskq::mfsnnk_bf(*corpus().index, spec);
        benchmark::DoNotOptimize(result);
    }
    report_pages(state, result);
}
BENCHMARK(BM_MfsnnkSinglePassRelaxed)->Arg(4)->Arg(6)->Arg(8);

// Bulk-loading a 5,000-object index, including serialization to disk.
static void BM_BuildIndex(benchmark::State& state) {
    GenConfig config;
    config.seed = 8;
    config.object_count = 5000;
    config.vocabulary_size = 300;
    config.keywords_per_object = 2.91;
    const Dataset dataset = gskq::gen_objects(config);
    const auto path =
        std::filesystem::temp_directory_path() / "gskq-bench-build.idx";
    for (auto _ : state) {
        gskq::build_index(dataset, path, {});
    }
    std::filesystem::remove(path);
}
BENCHMARK(BM_BuildIndex);

BENCHMARK_MAIN();
