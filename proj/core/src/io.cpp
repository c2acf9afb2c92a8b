#include "gskq/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace gskq {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, size_t line_no,
                       const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                             ": " + what);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    size_t start = 0;
    while (true) {
        const size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(std::string_view s, const std::filesystem::path& path,
                    size_t line_no, const char* field) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size())
        fail(path, line_no, std::string("bad ") + field + " '" + std::string(s) + "'");
    return value;
}

uint32_t parse_u32(std::string_view s, const std::filesystem::path& path,
                   size_t line_no, const char* field) {
    uint32_t value = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size())
        fail(path, line_no, std::string("bad ") + field + " '" + std::string(s) + "'");
    return value;
}

// Splits a comma-separated keyword list; empty tokens are rejected.
std::vector<std::string_view> split_keywords(std::string_view s,
                                             const std::filesystem::path& path,
                                             size_t line_no) {
    if (s.empty()) fail(path, line_no, "empty keyword list");
    auto tokens = split(s, ',');
    for (const auto& token : tokens)
        if (token.empty()) fail(path, line_no, "empty keyword in list");
    return tokens;
}

bool skip_line(std::string_view line) {
    return line.empty() || line.front() == '#';
}

// Strips a trailing carriage return so CRLF files parse cleanly.
std::string_view trim_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    Dataset dataset;
    std::unordered_set<uint32_t> seen_ids;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim_cr(line);
        if (skip_line(sv)) continue;
        const auto fields = split(sv, '\t');
        if (fields.size() != 4)
            fail(path, line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
        SpatioTextualObject o;
        o.id = parse_u32(fields[0], path, line_no, "object id");
        if (!seen_ids.insert(o.id).second)
            fail(path, line_no, "duplicate object id " + std::to_string(o.id));
        o.location.x = parse_double(fields[1], path, line_no, "x coordinate");
        o.location.y = parse_double(fields[2], path, line_no, "y coordinate");
        for (const auto& token : split_keywords(fields[3], path, line_no))
            o.keywords.push_back(dataset.vocabulary.intern(token));
        sort_unique(o.keywords);
        dataset.bounding_box.expand(o.location);
        dataset.objects.push_back(std::move(o));
    }
    if (dataset.objects.empty())
        throw std::runtime_error(path.string() + ": no objects");
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out = open_for_write(path);
    out.precision(17);
    for (const SpatioTextualObject& o : dataset.objects) {
        out << o.id << '\t' << o.location.x << '\t' << o.location.y << '\t';
        for (size_t i = 0; i < o.keywords.size(); ++i) {
            if (i) out << ',';
            out << dataset.vocabulary.token(o.keywords[i]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

QueryGroup load_query_group(const std::filesystem::path& path,
                            const Vocabulary& vocabulary) {
    std::ifstream in = open_for_read(path);
    QueryGroup group;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim_cr(line);
        if (skip_line(sv)) continue;
        const auto fields = split(sv, '\t');
        if (fields.size() != 3 && fields.size() != 4)
            fail(path, line_no, "expected 3 or 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
        QueryPoint q;
        q.location.x = parse_double(fields[0], path, line_no, "x coordinate");
        q.location.y = parse_double(fields[1], path, line_no, "y coordinate");
        for (const auto& token : split_keywords(fields[2], path, line_no)) {
            const auto id = vocabulary.find(token);
            if (!id) fail(path, line_no, "unknown keyword '" + std::string(token) + "'");
            q.keywords.push_back(*id);
        }
        sort_unique(q.keywords);
        if (fields.size() == 4) {
            q.priority = parse_double(fields[3], path, line_no, "priority");
            if (q.priority <= 0.0) fail(path, line_no, "priority must be positive");
        }
        group.members.push_back(std::move(q));
    }
    if (group.members.empty())
        throw std::runtime_error(path.string() + ": no query points");
    return group;
}

void save_query_group(const QueryGroup& group, const Vocabulary& vocabulary,
                      const std::filesystem::path& path) {
    std::ofstream out = open_for_write(path);
    out.precision(17);
    bool any_priority = false;
    for (const QueryPoint& q : group.members)
        if (q.priority != 1.0) any_priority = true;
    for (const QueryPoint& q : group.members) {
        out << q.location.x << '\t' << q.location.y << '\t';
        for (size_t i = 0; i < q.keywords.size(); ++i) {
            if (i) out << ',';
            out << vocabulary.token(q.keywords[i]);
        }
        if (any_priority) out << '\t' << q.priority;
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> load_weights(const std::filesystem::path& path,
                                 const Vocabulary& vocabulary) {
    std::ifstream in = open_for_read(path);
    std::vector<double> weights(vocabulary.size(), 1.0);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim_cr(line);
        if (skip_line(sv)) continue;
        const auto fields = split(sv, '\t');
        if (fields.size() != 2)
            fail(path, line_no, "expected 2 tab-separated fields, got " +
                                    std::to_string(fields.size()));
        const auto id = vocabulary.find(fields[0]);
        if (!id) fail(path, line_no, "unknown keyword '" + std::string(fields[0]) + "'");
        const double w = parse_double(fields[1], path, line_no, "weight");
        if (w <= 0.0) fail(path, line_no, "weight must be positive");
        weights[*id] = w;
    }
    return weights;
}

double max_weight(const std::vector<double>& weights) {
    double w = 1.0;
    for (double x : weights) w = std::max(w, x);
    return w;
}

}  // namespace gskq
