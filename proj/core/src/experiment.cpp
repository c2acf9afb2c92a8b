#include "gskq/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gskq/irtree.hpp"

namespace gskq {

namespace {

const char* const kSweepAxes[] = {"k",           "n",
                                  "m_percent",   "query_keywords",
                                  "query_space", "keyword_set",
                                  "alpha",       "objects"};

bool known_axis(const std::string& axis) {
    return std::find_if(std::begin(kSweepAxes), std::end(kSweepAxes),
                        [&](const char* a) { return axis == a; }) !=
           std::end(kSweepAxes);
}

std::string trim(std::string_view s) {
    const auto from = s.find_first_not_of(" \t");
    if (from == std::string_view::npos) return "";
    const auto to = s.find_last_not_of(" \t");
    return std::string(s.substr(from, to - from + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream stream(s);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw std::invalid_argument("bad numeric value for '" + key +
                                    "': " + s);
    return v;
}

uint64_t to_u64(const std::string& s, const std::string& key) {
    uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw std::invalid_argument("bad integer value for '" + key +
                                    "': " + s);
    return v;
}

// Returns a copy of the experiment's settings with the swept axis set.
struct CellSettings {
    GenConfig config;
    uint32_t k;
    double m_percent;
    double alpha;
};

CellSettings apply_sweep(const Experiment& e, double value) {
    CellSettings s{e.base, e.k, e.m_percent, e.alpha};
    if (e.sweep == "k") {
        s.k = static_cast<uint32_t>(value);
    } else if (e.sweep == "n") {
        s.config.group_size = static_cast<uint32_t>(value);
    } else if (e.sweep == "m_percent") {
        s.m_percent = value;
    } else if (e.sweep == "query_keywords") {
        s.config.keywords_per_query = static_cast<uint32_t>(value);
    } else if (e.sweep == "query_space") {
        s.config.query_space_fraction = value;
    } else if (e.sweep == "keyword_set") {
        s.config.keyword_set_fraction = value;
    } else if (e.sweep == "alpha") {
        s.alpha = value;
    } else if (e.sweep == "objects") {
        s.config.object_count = static_cast<uint64_t>(value);
    } else {
        throw std::invalid_argument("unknown sweep axis: " + e.sweep);
    }
    return s;
}

std::string format_mean(uint64_t total, uint32_t repetitions) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(4);
    out << static_cast<double>(total) / repetitions;
    return out.str();
}

}  // namespace

std::optional<Aggregate> parse_aggregate(std::string_view name) {
    if (name == "sum") return Aggregate::Sum;
    if (name == "max") return Aggregate::Max;
    if (name == "min") return Aggregate::Min;
    return std::nullopt;
}

std::optional<std::pair<QueryVariant, AlgorithmKind>> parse_algorithm(
    std::string_view name) {
    if (name == "gnnk-bb") return {{QueryVariant::GNNK, AlgorithmKind::BB}};
    if (name == "gnnk-bf") return {{QueryVariant::GNNK, AlgorithmKind::BF}};
    if (name == "fsnnk-bb") return {{QueryVariant::FSNNK, AlgorithmKind::BB}};
    if (name == "fsnnk-bf") return {{QueryVariant::FSNNK, AlgorithmKind::BF}};
    if (name == "mfsnnk-n") return {{QueryVariant::MFSNNK, AlgorithmKind::N}};
    if (name == "mfsnnk-bf") return {{QueryVariant::MFSNNK, AlgorithmKind::BF}};
    return std::nullopt;
}

uint32_t subgroup_size_from_percent(double percent, uint32_t n) {
    const auto m = static_cast<uint32_t>(std::lround(percent / 100.0 * n));
    return std::clamp<uint32_t>(m, 1, n);
}

void Experiment::validate() const {
    if (!known_axis(sweep))
        throw std::invalid_argument("unknown sweep axis: '" + sweep + "'");
    if (values.empty()) throw std::invalid_argument("no sweep values");
    if (algorithms.empty()) throw std::invalid_argument("no algorithms");
    for (const std::string& a : algorithms)
        if (!parse_algorithm(a))
            throw std::invalid_argument("unknown algorithm: '" + a + "'");
    if (repetitions < 1)
        throw std::invalid_argument("repetitions must be >= 1");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (m_percent <= 0.0 || m_percent > 100.0)
        throw std::invalid_argument("m_percent must be in (0, 100]");
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("alpha must be in [0, 1]");
    base.validate();
}

Experiment parse_experiment(std::istream& in) {
    Experiment e;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "sweep") {
            e.sweep = value;
        } else if (key == "values") {
            e.values.clear();
            for (const std::string& v : split_list(value))
                e.values.push_back(to_double(v, key));
        } else if (key == "algorithms") {
            e.algorithms = split_list(value);
        } else if (key == "aggregate") {
            const auto agg = parse_aggregate(value);
            if (!agg)
                throw std::invalid_argument("unknown aggregate: " + value);
            e.aggregate = *agg;
        } else if (key == "repetitions") {
            e.repetitions = static_cast<uint32_t>(to_u64(value, key));
        } else if (key == "k") {
            e.k = static_cast<uint32_t>(to_u64(value, key));
        } else if (key == "n") {
            e.base.group_size = static_cast<uint32_t>(to_u64(value, key));
        } else if (key == "m_percent") {
            e.m_percent = to_double(value, key);
        } else if (key == "objects") {
            e.base.object_count = to_u64(value, key);
        } else if (key == "vocabulary") {
            e.base.vocabulary_size = static_cast<uint32_t>(to_u64(value, key));
        } else if (key == "object_keywords") {
            e.base.keywords_per_object = to_double(value, key);
        } else if (key == "query_keywords") {
            e.base.keywords_per_query =
                static_cast<uint32_t>(to_u64(value, key));
        } else if (key == "query_space") {
            e.base.query_space_fraction = to_double(value, key);
        } else if (key == "keyword_set") {
            e.base.keyword_set_fraction = to_double(value, key);
        } else if (key == "alpha") {
            e.alpha = to_double(value, key);
        } else if (key == "seed") {
            e.base.seed = to_u64(value, key);
        } else if (key == "fanout") {
            e.fanout = static_cast<uint32_t>(to_u64(value, key));
        } else if (key == "page_size") {
            e.page_size = static_cast<uint32_t>(to_u64(value, key));
        } else if (key == "data_space") {
            const auto parts = split_list(value);
            if (parts.size() != 4)
                throw std::invalid_argument(
                    "data_space needs four numbers: x0,y0,x1,y1");
            e.base.data_space =
                Rect{{to_double(parts[0], key), to_double(parts[1], key)},
                     {to_double(parts[2], key), to_double(parts[3], key)}};
        } else if (key == "output") {
            e.output = value;
        } else if (key == "workdir") {
            e.workdir = value;
        } else {
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
    }
    e.validate();
    return e;
}

Experiment load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_experiment(in);
}

std::string run_experiment(const Experiment& experiment,
                           std::ostream* progress) {
    experiment.validate();
    const std::filesystem::path workdir =
        experiment.workdir.empty() ? std::filesystem::temp_directory_path()
                                   : experiment.workdir;
    std::filesystem::create_directories(workdir);

    std::ostringstream csv;
    csv << "sweep,value,algorithm,aggregate,repetitions,mean_elapsed_ms,"
           "mean_page_accesses,mean_interior_reads,mean_leaf_reads,"
           "mean_invfile_reads,mean_objects_scored,mean_nodes_pruned,"
           "mean_nodes_enqueued,pruning_power\n";

    // Datasets and their indexes are reused across sweep values that share
    // an object count (only the "objects" axis changes it).
    std::map<uint64_t, std::pair<Dataset, std::filesystem::path>> cache;

    for (const double value : experiment.values) {
        const CellSettings cell = apply_sweep(experiment, value);
        cell.config.validate();

        auto [it, fresh] = cache.try_emplace(cell.config.object_count);
        if (fresh) {
            it->second.first = gen_objects(cell.config);
            it->second.second =
                workdir / ("bench-" + std::to_string(cell.config.object_count) +
                           "-" + std::to_string(cell.config.seed) + ".idx");
            BuildOptions options;
            options.fanout = experiment.fanout;
            options.page_size = experiment.page_size;
            build_index(it->second.first, it->second.second, options);
        }
        const Dataset& dataset = it->second.first;
        const auto index = open_index(it->second.second);

        CostParams params = index->default_params();
        params.alpha = cell.alpha;
        params.aggregate = experiment.aggregate;

        // Generate the repetition groups once per value so every algorithm
        // answers exactly the same queries.
        std::vector<QueryGroup> groups;
        groups.reserve(experiment.repetitions);
        for (uint32_t rep = 0; rep < experiment.repetitions; ++rep)
            groups.push_back(gen_query_group(cell.config, dataset, rep));

        for (const std::string& algo : experiment.algorithms) {
            const auto parsed = parse_algorithm(algo);
            AccessCounters totals;
            double elapsed_ms = 0.0;
            for (const QueryGroup& group : groups) {
                QuerySpec spec;
                spec.group = group;
                spec.params = params;
                spec.variant = parsed->first;
                spec.algorithm = parsed->second;
                spec.k = cell.k;
                if (spec.variant != QueryVariant::GNNK)
                    spec.m = subgroup_size_from_percent(
                        cell.m_percent, cell.config.group_size);
                const QueryResult result = run_query(*index, spec);
                totals += result.counters;
                elapsed_ms += result.elapsed.count() * 1000.0;
            }
            const uint32_t reps = experiment.repetitions;
            csv << experiment.sweep << ',' << value << ',' << algo << ','
                << to_string(experiment.aggregate) << ',' << reps << ','
                << (elapsed_ms / reps) << ','
                << format_mean(totals.page_accesses(), reps) << ','
                << format_mean(totals.interior_node_reads, reps) << ','
                << format_mean(totals.leaf_node_reads, reps) << ','
                << format_mean(totals.inverted_file_reads, reps) << ','
                << format_mean(totals.objects_scored, reps) << ','
                << format_mean(totals.nodes_pruned, reps) << ','
                << format_mean(totals.nodes_enqueued, reps) << ','
                << pruning_power(totals) << '\n';
            if (progress)
                *progress << experiment.sweep << '=' << value << ' ' << algo
                          << " done\n";
        }
    }

    const std::string out = csv.str();
    if (!experiment.output.empty()) {
        std::ofstream file(experiment.output);
        if (!file)
            throw std::runtime_error("cannot write " +
                                     experiment.output.string());
        file << out;
    }
    return out;
}

}  // namespace gskq
