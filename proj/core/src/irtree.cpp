#include "gskq/irtree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace gskq {

namespace {

constexpr size_t kExactDMaxLimit = 10000;

double compute_d_max(const Dataset& dataset, bool exact) {
    if (exact) {
        if (dataset.objects.size() > kExactDMaxLimit)
            throw std::invalid_argument(
                "exact d_max is quadratic; refusing for more than " +
                std::to_string(kExactDMaxLimit) + " objects");
        double best = 0.0;
        for (size_t i = 0; i < dataset.objects.size(); ++i)
            for (size_t j = i + 1; j < dataset.objects.size(); ++j)
                best = std::max(best,
                                euclidean_distance(dataset.objects[i].location,
                                                   dataset.objects[j].location));
        // All objects at one point still need a positive normalizer.
        return best > 0.0 ? best : 1.0;
    }
    const double diag = dataset.bounding_box.diagonal();
    return diag > 0.0 ? diag : 1.0;
}

KeywordSet merge_summaries(const KeywordSet& a, const KeywordSet& b) {
    KeywordSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(out));
    return out;
}

void write_rect(ByteWriter& w, const Rect& r) {
    w.f64(r.lo.x);
    w.f64(r.lo.y);
    w.f64(r.hi.x);
    w.f64(r.hi.y);
}

Rect read_rect(ByteReader& r) {
    Rect rect;
    rect.lo.x = r.f64();
    rect.lo.y = r.f64();
    rect.hi.x = r.f64();
    rect.hi.y = r.f64();
    return rect;
}

void write_keyword_set(ByteWriter& w, const KeywordSet& set) {
    w.u32(static_cast<uint32_t>(set.size()));
    for (KeywordId kw : set) w.u32(kw);
}

KeywordSet read_keyword_set(ByteReader& r) {
    const uint32_t n = r.u32();
    KeywordSet set;
    set.reserve(n);
    for (uint32_t i = 0; i < n; ++i) set.push_back(r.u32());
    return set;
}

// A written node waiting to be referenced by its parent.
struct PendingChild {
    PageId page;
    Rect mbr;
    KeywordSet summary;
    Point center;
};

// Splits `items` into tiles of at most `fanout`, Sort-Tile-Recursive style:
// sort by x, cut into vertical slabs, sort each slab by y, cut into tiles.
// Ties fall back to `tie` so the packing is a pure function of the input.
template <typename T, typename GetPoint, typename GetTie>
std::vector<std::vector<T>> str_pack(std::vector<T> items, uint32_t fanout,
                                     GetPoint point, GetTie tie) {
    const size_t n = items.size();
    const size_t tiles = (n + fanout - 1) / fanout;
    const size_t slabs = static_cast<size_t>(
        std::ceil(std::sqrt(static_cast<double>(tiles))));
    const size_t slab_size = slabs * fanout;
    std::sort(items.begin(), items.end(), [&](const T& a, const T& b) {
        const Point pa = point(a), pb = point(b);
        if (pa.x != pb.x) return pa.x < pb.x;
        if (pa.y != pb.y) return pa.y < pb.y;
        return tie(a) < tie(b);
    });
    std::vector<std::vector<T>> out;
    out.reserve(tiles);
    for (size_t slab = 0; slab * slab_size < n; ++slab) {
        const size_t lo = slab * slab_size;
        const size_t hi = std::min(n, lo + slab_size);
        std::sort(items.begin() + lo, items.begin() + hi,
                  [&](const T& a, const T& b) {
                      const Point pa = point(a), pb = point(b);
                      if (pa.y != pb.y) return pa.y < pb.y;
                      if (pa.x != pb.x) return pa.x < pb.x;
                      return tie(a) < tie(b);
                  });
        for (size_t pos = lo; pos < hi; pos += fanout) {
            const size_t end = std::min(hi, pos + fanout);
            out.emplace_back(items.begin() + pos, items.begin() + end);
        }
    }
    return out;
}

}  // namespace

double pruning_power(const AccessCounters& counters) {
    const uint64_t visited =
        counters.interior_node_reads + counters.leaf_node_reads;
    const uint64_t total = counters.nodes_pruned + visited;
    if (total == 0) return 0.0;
    return static_cast<double>(counters.nodes_pruned) /
           static_cast<double>(total);
}

void build_index(const Dataset& dataset, const std::filesystem::path& path,
                 const BuildOptions& options) {
    if (dataset.objects.empty())
        throw std::invalid_argument("cannot index an empty dataset");
    if (options.fanout < 2) throw std::invalid_argument("fanout must be >= 2");
    if (!options.weights.empty() &&
        options.weights.size() != dataset.vocabulary.size())
        throw std::invalid_argument(
            "weight table size does not match vocabulary");
    {
        std::unordered_set<uint32_t> ids;
        for (const SpatioTextualObject& o : dataset.objects)
            if (!ids.insert(o.id).second)
                throw std::invalid_argument("duplicate object id " +
                                            std::to_string(o.id));
    }

    IndexHeader header;
    header.fanout = options.fanout;
    header.page_size = options.page_size;
    header.object_count = dataset.objects.size();
    header.d_max = compute_d_max(dataset, options.exact_d_max);
    header.w_max = max_weight(options.weights);
    header.bounding_box = dataset.bounding_box;
    header.exact_d_max = options.exact_d_max;

    PageFileWriter file(path, options.page_size);

    // Auxiliary blobs first: vocabulary, then the weight table if any
    // keyword weighs something other than 1.
    {
        ByteWriter w;
        w.u32(static_cast<uint32_t>(dataset.vocabulary.size()));
        for (const std::string& token : dataset.vocabulary.tokens())
            w.str(token);
        header.vocabulary_page =
            file.write_blob(PageKind::Vocabulary, w.data());
    }
    const bool weighted =
        std::any_of(options.weights.begin(), options.weights.end(),
                    [](double w) { return w != 1.0; });
    if (weighted) {
        ByteWriter w;
        w.u32(static_cast<uint32_t>(options.weights.size()));
        for (double weight : options.weights) w.f64(weight);
        header.weights_page = file.write_blob(PageKind::Weights, w.data());
    }
    header.aux_page_count = file.page_count() - 1;

    // Leaves: pack objects into tiles, then write each tile's inverted file
    // followed by the leaf node that points at it.
    auto tiles = str_pack(
        dataset.objects, options.fanout,
        [](const SpatioTextualObject& o) { return o.location; },
        [](const SpatioTextualObject& o) { return o.id; });

    std::vector<PendingChild> level_nodes;
    level_nodes.reserve(tiles.size());
    for (auto& tile : tiles) {
        // Within a leaf, order by id so postings and entries are canonical.
        std::sort(tile.begin(), tile.end(),
                  [](const SpatioTextualObject& a,
                     const SpatioTextualObject& b) { return a.id < b.id; });
        std::map<KeywordId, std::vector<uint32_t>> postings;
        Rect mbr;
        KeywordSet summary;
        for (const SpatioTextualObject& o : tile) {
            mbr.expand(o.location);
            summary = merge_summaries(summary, o.keywords);
            for (KeywordId kw : o.keywords) postings[kw].push_back(o.id);
        }

        ByteWriter inv;
        inv.u32(static_cast<uint32_t>(postings.size()));
        for (const auto& [kw, ids] : postings) {
            inv.u32(kw);
            inv.u32(static_cast<uint32_t>(ids.size()));
            for (uint32_t id : ids) inv.u32(id);
        }
        const uint64_t before_inv = file.page_count();
        const PageId postings_page =
            file.write_blob(PageKind::InvertedFile, inv.data());
        header.invfile_page_count += file.page_count() - before_inv;

        ByteWriter node;
        node.u32(0);  // level
        write_rect(node, mbr);
        write_keyword_set(node, summary);
        node.u32(static_cast<uint32_t>(tile.size()));
        node.u32(postings_page);
        for (const SpatioTextualObject& o : tile) {
            node.u32(o.id);
            node.f64(o.location.x);
            node.f64(o.location.y);
        }
        const uint64_t before_node = file.page_count();
        const PageId page = file.write_blob(PageKind::Leaf, node.data());
        header.node_page_count += file.page_count() - before_node;
        level_nodes.push_back(
            {page, mbr, std::move(summary), mbr.center()});
    }

    // Interior levels, bottom-up, until a single root remains.
    uint32_t level = 0;
    while (level_nodes.size() > 1) {
        ++level;
        auto groups = str_pack(
            std::move(level_nodes), options.fanout,
            [](const PendingChild& c) { return c.center; },
            [](const PendingChild& c) { return c.page; });
        level_nodes.clear();
        level_nodes.reserve(groups.size());
        for (auto& group : groups) {
            Rect mbr;
            KeywordSet summary;
            for (const PendingChild& child : group) {
                mbr.expand(child.mbr);
                summary = merge_summaries(summary, child.summary);
            }
            ByteWriter node;
            node.u32(level);
            write_rect(node, mbr);
            write_keyword_set(node, summary);
            node.u32(static_cast<uint32_t>(group.size()));
            for (const PendingChild& child : group) {
                node.u32(child.page);
                write_rect(node, child.mbr);
                write_keyword_set(node, child.summary);
            }
            const uint64_t before = file.page_count();
            const PageId page = file.write_blob(PageKind::Interior, node.data());
            header.node_page_count += file.page_count() - before;
            level_nodes.push_back(
                {page, mbr, std::move(summary), mbr.center()});
        }
    }
    header.root_page = level_nodes.front().page;
    header.level_count = level + 1;

    ByteWriter h;
    h.u32(header.fanout);
    h.u64(header.object_count);
    h.u32(header.root_page);
    h.u32(header.level_count);
    h.u64(header.node_page_count);
    h.u64(header.invfile_page_count);
    h.u64(header.aux_page_count);
    h.u32(header.vocabulary_page);
    h.u32(header.weights_page);
    h.f64(header.d_max);
    h.f64(header.w_max);
    write_rect(h, header.bounding_box);
    h.u8(header.exact_d_max ? 1 : 0);
    file.write_header(h.data());
}

IndexReader::IndexReader(const std::filesystem::path& path) : file_(path) {
    const std::vector<uint8_t> raw = file_.read_header();
    ByteReader r(raw);
    header_.page_size = file_.page_size();
    header_.fanout = r.u32();
    header_.object_count = r.u64();
    header_.root_page = r.u32();
    header_.level_count = r.u32();
    header_.node_page_count = r.u64();
    header_.invfile_page_count = r.u64();
    header_.aux_page_count = r.u64();
    header_.vocabulary_page = r.u32();
    header_.weights_page = r.u32();
    header_.d_max = r.f64();
    header_.w_max = r.f64();
    header_.bounding_box = read_rect(r);
    header_.exact_d_max = r.u8() != 0;
    if (header_.total_pages() != file_.page_count())
        throw std::runtime_error(path.string() +
                                 ": header page counts disagree with file size");

    {
        const std::vector<uint8_t> blob =
            file_.read_blob(header_.vocabulary_page, PageKind::Vocabulary);
        ByteReader v(blob);
        const uint32_t n = v.u32();
        for (uint32_t i = 0; i < n; ++i) vocabulary_.intern(v.str());
    }
    if (header_.weights_page != kNoPage) {
        const std::vector<uint8_t> blob =
            file_.read_blob(header_.weights_page, PageKind::Weights);
        ByteReader v(blob);
        const uint32_t n = v.u32();
        weights_.reserve(n);
        for (uint32_t i = 0; i < n; ++i) weights_.push_back(v.f64());
        if (weights_.size() != vocabulary_.size())
            throw std::runtime_error(path.string() +
                                     ": weight table size mismatch");
    }
}

CostParams IndexReader::default_params() const {
    CostParams params;
    params.d_max = header_.d_max;
    params.w_max = header_.w_max;
    params.weights = weights_;
    return params;
}

IRTreeNode IndexReader::read_node(PageId page,
                                  AccessCounters& counters) const {
    Blob blob = file_.read_chain(page);
    if (blob.kind != PageKind::Interior && blob.kind != PageKind::Leaf)
        throw std::runtime_error("page " + std::to_string(page) +
                                 " is not a tree node");
    if (blob.kind == PageKind::Interior)
        counters.interior_node_reads += blob.pages;
    else
        counters.leaf_node_reads += blob.pages;

    ByteReader r(blob.payload);
    IRTreeNode node;
    node.page_id = page;
    node.level = r.u32();
    if ((node.level == 0) != (blob.kind == PageKind::Leaf))
        throw std::runtime_error("page " + std::to_string(page) +
                                 " level disagrees with page kind");
    node.mbr = read_rect(r);
    node.summary = read_keyword_set(r);
    const uint32_t entries = r.u32();
    if (node.is_leaf()) {
        node.postings_page = r.u32();
        node.objects.reserve(entries);
        for (uint32_t i = 0; i < entries; ++i) {
            LeafObjectRef o;
            o.object_id = r.u32();
            o.location.x = r.f64();
            o.location.y = r.f64();
            node.objects.push_back(o);
        }
    } else {
        node.children.reserve(entries);
        for (uint32_t i = 0; i < entries; ++i) {
            ChildRef c;
            c.page = r.u32();
            c.mbr = read_rect(r);
            c.summary = read_keyword_set(r);
            node.children.push_back(std::move(c));
        }
    }
    return node;
}

Postings IndexReader::read_postings(PageId page,
                                    AccessCounters& counters) const {
    PageReadStats stats;
    const std::vector<uint8_t> blob =
        file_.read_blob(page, PageKind::InvertedFile, &stats);
    counters.inverted_file_reads += stats.pages_read;
    ByteReader r(blob);
    const uint32_t keywords = r.u32();
    Postings postings;
    postings.reserve(keywords);
    for (uint32_t i = 0; i < keywords; ++i) {
        const KeywordId kw = r.u32();
        const uint32_t count = r.u32();
        std::vector<uint32_t> ids;
        ids.reserve(count);
        for (uint32_t j = 0; j < count; ++j) ids.push_back(r.u32());
        postings.emplace_back(kw, std::move(ids));
    }
    return postings;
}

std::unique_ptr<IndexReader> open_index(const std::filesystem::path& path) {
    return std::make_unique<IndexReader>(path);
}

std::vector<KeywordSet> leaf_object_keywords(const IRTreeNode& node,
                                             const Postings& postings) {
    std::vector<KeywordSet> sets(node.objects.size());
    // Postings are keyword-ascending and posting lists are id-ascending, so
    // appending in posting order yields each object's keywords pre-sorted.
    for (size_t i = 0; i < node.objects.size(); ++i) {
        const uint32_t id = node.objects[i].object_id;
        for (const auto& [kw, ids] : postings)
            if (std::binary_search(ids.begin(), ids.end(), id))
                sets[i].push_back(kw);
    }
    return sets;
}

}  // namespace gskq
