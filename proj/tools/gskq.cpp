// Command-line front end: build indexes, run queries against them, generate
// synthetic datasets and query groups, and drive benchmark sweeps.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gskq/experiment.hpp"
#include "gskq/io.hpp"
#include "gskq/irtree.hpp"
#include "gskq/oracle.hpp"
#include "gskq/query_engine.hpp"
#include "gskq/workload.hpp"

namespace {

using nlohmann::json;

// Pulls every object back out of the index's leaves so the linear-scan
// reference can run without the original dataset file.
std::vector<gskq::SpatioTextualObject> objects_from_index(
    const gskq::IndexReader& index) {
    std::vector<gskq::SpatioTextualObject> objects;
    gskq::AccessCounters scratch;
    std::vector<gskq::PageId> pending{index.header().root_page};
    while (!pending.empty()) {
        const gskq::PageId page = pending.back();
        pending.pop_back();
        const gskq::IRTreeNode node = index.read_node(page, scratch);
        if (!node.is_leaf()) {
            for (const gskq::ChildRef& child : node.children)
                pending.push_back(child.page);
            continue;
        }
        const gskq::Postings postings =
            index.read_postings(node.postings_page, scratch);
        const auto keyword_sets = gskq::leaf_object_keywords(node, postings);
        for (size_t i = 0; i < node.objects.size(); ++i) {
            gskq::SpatioTextualObject o;
            o.id = node.objects[i].object_id;
            o.location = node.objects[i].location;
            o.keywords = keyword_sets[i];
            objects.push_back(std::move(o));
        }
    }
    std::sort(objects.begin(), objects.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    return objects;
}

json entries_to_json(const std::vector<gskq::ResultEntry>& entries) {
    json rows = json::array();
    for (const gskq::ResultEntry& e : entries) {
        rows.push_back({{"object_id", e.object_id},
                        {"cost", e.aggregate_cost},
                        {"subgroup_size", e.subgroup_size},
                        {"subgroup", e.subgroup}});
    }
    return rows;
}

json counters_to_json(const gskq::AccessCounters& c) {
    return {{"page_accesses", c.page_accesses()},
            {"interior_node_reads", c.interior_node_reads},
            {"leaf_node_reads", c.leaf_node_reads},
            {"inverted_file_reads", c.inverted_file_reads},
            {"objects_scored", c.objects_scored},
            {"nodes_pruned", c.nodes_pruned},
            {"nodes_enqueued", c.nodes_enqueued},
            {"pruning_power", gskq::pruning_power(c)}};
}

int run_build(const std::string& data_path, const std::string& out_path,
              uint32_t fanout, uint32_t page_size, bool exact_dmax,
              const std::string& weights_path) {
    const gskq::Dataset dataset = gskq::load_dataset(data_path);
    gskq::BuildOptions options;
    options.fanout = fanout;
    options.page_size = page_size;
    options.exact_d_max = exact_dmax;
    if (!weights_path.empty())
        options.weights = gskq::load_weights(weights_path, dataset.vocabulary);
    gskq::build_index(dataset, out_path, options);

    const auto index = gskq::open_index(out_path);
    const gskq::IndexHeader& h = index->header();
    json summary = {{"index", out_path},
                    {"object_count", h.object_count},
                    {"vocabulary_size", index->vocabulary().size()},
                    {"fanout", h.fanout},
                    {"page_size", h.page_size},
                    {"levels", h.level_count},
                    {"node_pages", h.node_page_count},
                    {"inverted_file_pages", h.invfile_page_count},
                    {"aux_pages", h.aux_page_count},
                    {"total_pages", h.total_pages()},
                    {"d_max", h.d_max},
                    {"w_max", h.w_max},
                    {"exact_d_max", h.exact_d_max}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_query_command(const std::string& index_path,
                      const std::string& queries_path,
                      const std::string& algo_name,
                      const std::string& agg_name, double alpha, uint32_t k,
                      uint32_t m, bool relaxed, bool no_prune,
                      bool oracle_check) {
    const auto algo = gskq::parse_algorithm(algo_name);
    if (!algo) throw CLI::ValidationError("--algo", "unknown algorithm '" + algo_name + "'");
    const auto agg = gskq::parse_aggregate(agg_name);
    if (!agg) throw CLI::ValidationError("--agg", "unknown aggregate '" + agg_name + "'");

    const auto index = gskq::open_index(index_path);
    gskq::QuerySpec spec;
    spec.group = gskq::load_query_group(queries_path, index->vocabulary());
    spec.params = index->default_params();
    spec.params.alpha = alpha;
    spec.params.aggregate = *agg;
    spec.variant = algo->first;
    spec.algorithm = algo->second;
    spec.k = k;
    spec.m = m;
    spec.relaxed_prune = relaxed;
    spec.no_prune = no_prune;
    if (spec.variant != gskq::QueryVariant::GNNK && m == 0)
        throw CLI::ValidationError("--m", "this algorithm needs a subgroup size");
    if (m > spec.group.size())
        throw CLI::ValidationError(
            "--m", "subgroup size exceeds the group size (" +
                       std::to_string(spec.group.size()) + ")");
    spec.validate();

    const gskq::QueryResult result = gskq::run_query(*index, spec);
    json report = {{"algorithm", algo_name},
                   {"aggregate", agg_name},
                   {"alpha", alpha},
                   {"k", k},
                   {"group_size", spec.group.size()},
                   {"results", entries_to_json(result.entries)},
                   {"counters", counters_to_json(result.counters)},
                   {"elapsed_ms", result.elapsed.count() * 1000.0}};
    if (spec.variant != gskq::QueryVariant::GNNK) report["m"] = m;

    if (oracle_check) {
        const auto objects = objects_from_index(*index);
        std::vector<gskq::ResultEntry> expected;
        switch (spec.variant) {
            case gskq::QueryVariant::GNNK:
                expected = gskq::scan_gnnk(objects, spec);
                break;
            case gskq::QueryVariant::FSNNK:
                expected = gskq::scan_fsnnk(objects, spec);
                break;
            case gskq::QueryVariant::MFSNNK:
                expected = gskq::scan_mfsnnk(objects, spec);
                break;
        }
        const json want = entries_to_json(expected);
        report["oracle_check"] = (want == report["results"]) ? "pass" : "fail";
        if (report["oracle_check"] == "fail") {
            report["oracle_expected"] = want;
            std::cout << report.dump(2) << '\n';
            std::cerr << "oracle mismatch\n";
            return 1;
        }
    }
    std::cout << report.dump(2) << '\n';
    return 0;
}

int run_gen_data(const std::string& out_path, const gskq::GenConfig& config) {
    const gskq::Dataset dataset = gskq::gen_objects(config);
    gskq::save_dataset(dataset, out_path);
    std::cout << "wrote " << dataset.objects.size() << " objects ("
              << dataset.vocabulary.size() << " keywords) to " << out_path
              << '\n';
    return 0;
}

int run_gen_queries(const std::string& data_path, const std::string& out_path,
                    gskq::GenConfig config, uint64_t salt) {
    const gskq::Dataset dataset = gskq::load_dataset(data_path);
    config.vocabulary_size =
        static_cast<uint32_t>(dataset.vocabulary.size());
    const gskq::QueryGroup group =
        gskq::gen_query_group(config, dataset, salt);
    gskq::save_query_group(group, dataset.vocabulary, out_path);
    std::cout << "wrote a group of " << group.size() << " query points to "
              << out_path << '\n';
    return 0;
}

int run_bench(const std::string& config_path, bool progress) {
    const gskq::Experiment experiment = gskq::load_experiment(config_path);
    const std::string csv =
        gskq::run_experiment(experiment, progress ? &std::cerr : nullptr);
    std::cout << csv;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group spatial keyword queries over a disk-paged IR-tree"};
    app.require_subcommand(1);

    // build ------------------------------------------------------------
    auto* build = app.add_subcommand("build", "Bulk-load an index from a TSV dataset");
    std::string build_data, build_out, build_weights;
    uint32_t build_fanout = 50, build_page = 4096;
    bool build_exact = false;
    build->add_option("--data", build_data, "Dataset TSV (id, x, y, keywords)")
        ->required();
    build->add_option("--out", build_out, "Index file to write")->required();
    build->add_option("--fanout", build_fanout, "Node fanout");
    build->add_option("--page-size", build_page, "Page size in bytes");
    build->add_flag("--exact-dmax", build_exact,
                    "Normalize by the true maximum pairwise distance");
    build->add_option("--weights", build_weights,
                      "Keyword weight TSV (keyword, weight)");

    // query ------------------------------------------------------------
    auto* query = app.add_subcommand("query", "Run one query group against an index");
    std::string q_index, q_queries, q_algo = "gnnk-bf", q_agg = "sum";
    double q_alpha = 0.5;
    uint32_t q_k = 1, q_m = 0;
    bool q_relaxed = false, q_noprune = false, q_oracle = false;
    query->add_option("--index", q_index, "Index file")->required();
    query->add_option("--queries", q_queries, "Query group TSV")->required();
    query->add_option("--algo", q_algo,
                      "gnnk-bb|gnnk-bf|fsnnk-bb|fsnnk-bf|mfsnnk-n|mfsnnk-bf");
    query->add_option("--agg", q_agg, "sum|max|min");
    query->add_option("--alpha", q_alpha, "Spatial/textual blend in [0,1]");
    query->add_option("--k", q_k, "Answers per subgroup size");
    query->add_option("--m", q_m, "Subgroup size (fsnnk) or minimum size (mfsnnk)");
    query->add_flag("--relaxed-prune", q_relaxed,
                    "mfsnnk-bf: single loosest-bound admission test");
    query->add_flag("--no-prune", q_noprune, "Disable pruning (diagnostic)");
    query->add_flag("--oracle-check", q_oracle,
                    "Re-answer by linear scan and fail on any mismatch");

    // gen-data ----------------------------------------------------------
    auto* gen_data = app.add_subcommand("gen-data", "Synthesize a dataset TSV");
    gskq::GenConfig gd_config;
    std::string gd_out;
    std::vector<double> gd_space;
    gen_data->add_option("--out", gd_out, "Dataset TSV to write")->required();
    gen_data->add_option("--seed", gd_config.seed, "Generator seed");
    gen_data->add_option("--objects", gd_config.object_count, "Object count");
    gen_data->add_option("--vocab", gd_config.vocabulary_size, "Vocabulary size");
    gen_data->add_option("--object-keywords", gd_config.keywords_per_object,
                         "Mean keywords per object");
    gen_data->add_option("--space", gd_space,
                         "Data space as x0 y0 x1 y1")->expected(4);

    // gen-queries --------------------------------------------------------
    auto* gen_queries =
        app.add_subcommand("gen-queries", "Synthesize a query group TSV");
    gskq::GenConfig gq_config;
    std::string gq_data, gq_out;
    uint64_t gq_salt = 0;
    gen_queries->add_option("--data", gq_data, "Dataset TSV to draw from")
        ->required();
    gen_queries->add_option("--out", gq_out, "Query group TSV to write")
        ->required();
    gen_queries->add_option("--seed", gq_config.seed, "Generator seed");
    gen_queries->add_option("--salt", gq_salt,
                            "Varies the group under one seed");
    gen_queries->add_option("--n", gq_config.group_size, "Group size");
    gen_queries->add_option("--query-keywords", gq_config.keywords_per_query,
                            "Keywords per query point");
    gen_queries->add_option("--query-space", gq_config.query_space_fraction,
                            "Query square area fraction");
    gen_queries->add_option("--keyword-set", gq_config.keyword_set_fraction,
                            "Fraction of nearby keywords members draw from");

    // bench ---------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "Run a parameter sweep from a config file");
    std::string bench_config;
    bool bench_progress = false;
    bench->add_option("config", bench_config, "key=value experiment file")
        ->required();
    bench->add_flag("--progress", bench_progress, "Report cells to stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed())
            return run_build(build_data, build_out, build_fanout, build_page,
                             build_exact, build_weights);
        if (query->parsed())
            return run_query_command(q_index, q_queries, q_algo, q_agg,
                                     q_alpha, q_k, q_m, q_relaxed, q_noprune,
                                     q_oracle);
        if (gen_data->parsed()) {
            if (!gd_space.empty())
                gd_config.data_space =
                    gskq::Rect{{gd_space[0], gd_space[1]},
                               {gd_space[2], gd_space[3]}};
            return run_gen_data(gd_out, gd_config);
        }
        if (gen_queries->parsed())
            return run_gen_queries(gq_data, gq_out, gq_config, gq_salt);
        if (bench->parsed()) return run_bench(bench_config, bench_progress);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
