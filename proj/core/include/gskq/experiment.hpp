#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gskq/query_engine.hpp"
#include "gskq/workload.hpp"

namespace gskq {

/// Parses "sum" / "max" / "min".
std::optional<Aggregate> parse_aggregate(std::string_view name);

/// Parses an algorithm name ("gnnk-bb", "gnnk-bf", "fsnnk-bb", "fsnnk-bf",
/// "mfsnnk-n", "mfsnnk-bf") into its variant/strategy pair.
std::optional<std::pair<QueryVariant, AlgorithmKind>> parse_algorithm(
    std::string_view name);

/// One parameter sweep: every other setting stays at its configured default
/// while `sweep` takes each value in turn, each (value, algorithm) cell is
/// measured over `repetitions` generated query groups, and the means land
/// in one CSV row. Counter columns are deterministic under a fixed seed;
/// elapsed columns are not and are excluded from golden comparisons.
struct Experiment {
    /// Swept axis: one of k, n, m_percent, query_keywords, query_space,
    /// keyword_set, alpha, objects.
    std::string sweep;
    std::vector<double> values;
    std::vector<std::string> algorithms;
    Aggregate aggregate = Aggregate::Sum;
    uint32_t repetitions = 20;
    uint32_t k = 10;
    /// Subgroup size as a percentage of the group size, rounded and clamped
    /// to [1, n]; applies to the fsnnk/mfsnnk algorithms.
    double m_percent = 60.0;
    double alpha = 0.5;
    /// Dataset shape and query-generation defaults (seed lives here).
    GenConfig base;
    uint32_t fanout = 50;
    uint32_t page_size = 4096;
    /// Where run_experiment writes the CSV; empty means caller handles it.
    std::filesystem::path output;
    /// Where index files are built; defaults to the system temp directory.
    std::filesystem::path workdir;

    void validate() const;  // throws std::invalid_argument
};

/// Reads a key=value experiment config ('#' comments, blank lines ignored;
/// unknown keys rejected). Lists are comma-separated.
Experiment parse_experiment(std::istream& in);
Experiment load_experiment(const std::filesystem::path& path);

/// Runs the sweep and returns the CSV (also written to experiment.output
/// when set). `progress`, if given, receives one line per finished cell.
std::string run_experiment(const Experiment& experiment,
                           std::ostream* progress = nullptr);

/// The subgroup size a percentage implies for a group of n members.
uint32_t subgroup_size_from_percent(double percent, uint32_t n);

}  // namespace gskq
