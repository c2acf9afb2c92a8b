#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <utility>
#include <vector>

#include "gskq/cost.hpp"
#include "gskq/io.hpp"
#include "gskq/page_store.hpp"
#include "gskq/types.hpp"

namespace gskq {

/// Build-time options. d_max defaults to the diagonal of the dataset
/// bounding box — a cheap upper bound on the true maximum pairwise
/// distance; exact_d_max switches to the brute-force maximum, which is
/// quadratic and therefore only sensible for small datasets.
struct BuildOptions {
    uint32_t fanout = 50;
    uint32_t page_size = 4096;
    bool exact_d_max = false;
    /// Per-keyword-id weight table aligned with the dataset vocabulary;
    /// empty means every keyword weighs 1.
    std::vector<double> weights;
};

/// Fixed metadata persisted in page 0 alongside the magic/version prefix.
struct IndexHeader {
    uint32_t fanout = 0;
    uint32_t page_size = 0;
    uint64_t object_count = 0;
    PageId root_page = kNoPage;
    uint32_t level_count = 0;  // 1 when the root is itself a leaf
    uint64_t node_page_count = 0;      // interior + leaf pages, spill included
    uint64_t invfile_page_count = 0;   // inverted-file pages, spill included
    uint64_t aux_page_count = 0;       // vocabulary + weight-table pages
    PageId vocabulary_page = kNoPage;
    PageId weights_page = kNoPage;     // kNoPage when all weights are 1
    double d_max = 1.0;
    double w_max = 1.0;
    Rect bounding_box;
    bool exact_d_max = false;

    /// All pages in the file: header + nodes + inverted files + aux.
    uint64_t total_pages() const {
        return 1 + node_page_count + invfile_page_count + aux_page_count;
    }
};

/// One interior entry: where the child lives plus enough of its shape and
/// text (MBR and keyword union) to lower-bound costs without reading it.
struct ChildRef {
    PageId page = kNoPage;
    Rect mbr;
    KeywordSet summary;
};

/// One leaf entry. Keyword sets are not stored inline; they are
/// reconstructed from the leaf's inverted file, which is read (and counted)
/// separately.
struct LeafObjectRef {
    uint32_t object_id = 0;
    Point location;
};

/// A materialized tree node, either interior (children populated) or leaf
/// (objects + postings_page populated).
struct IRTreeNode {
    PageId page_id = kNoPage;
    uint32_t level = 0;  // 0 = leaf
    Rect mbr;
    KeywordSet summary;
    std::vector<ChildRef> children;
    std::vector<LeafObjectRef> objects;
    PageId postings_page = kNoPage;

    bool is_leaf() const { return level == 0; }
};

/// keyword -> ascending object ids, for one leaf.
using Postings = std::vector<std::pair<KeywordId, std::vector<uint32_t>>>;

/// Per-query instrumentation. The three *_reads fields count logical page
/// reads (every page of a chained node or inverted file counts), so their
/// sum is the number of disk pages the query touched.
struct AccessCounters {
    uint64_t interior_node_reads = 0;
    uint64_t leaf_node_reads = 0;
    uint64_t inverted_file_reads = 0;
    uint64_t objects_scored = 0;
    uint64_t nodes_pruned = 0;
    uint64_t nodes_enqueued = 0;

    uint64_t page_accesses() const {
        return interior_node_reads + leaf_node_reads + inverted_file_reads;
    }

    AccessCounters& operator+=(const AccessCounters& other) {
        interior_node_reads += other.interior_node_reads;
        leaf_node_reads += other.leaf_node_reads;
        inverted_file_reads += other.inverted_file_reads;
        objects_scored += other.objects_scored;
        nodes_pruned += other.nodes_pruned;
        nodes_enqueued += other.nodes_enqueued;
        return *this;
    }
};

/// Fraction of traversal decisions that avoided reading a node:
/// pruned / (pruned + node pages actually read). Zero when nothing happened.
double pruning_power(const AccessCounters& counters);

/// Bulk-loads a Sort-Tile-Recursive packed tree and persists it. The same
/// dataset and options always produce a byte-identical file. Throws on an
/// empty dataset, duplicate object ids, fanout < 2, or page_size < 512.
void build_index(const Dataset& dataset, const std::filesystem::path& path,
                 const BuildOptions& options = {});

/// Read-only handle over a persisted index. All mutable state lives in the
/// caller's AccessCounters, and page reads use pread, so a single reader
/// serves any number of concurrent queries.
class IndexReader {
public:
    explicit IndexReader(const std::filesystem::path& path);

    const IndexHeader& header() const { return header_; }
    const Vocabulary& vocabulary() const { return vocabulary_; }

    /// Weight table aligned with the vocabulary (empty = all 1).
    const std::vector<double>& weights() const { return weights_; }

    /// CostParams preloaded with this index's d_max, w_max, and weights;
    /// alpha and the aggregate keep their defaults.
    CostParams default_params() const;

    /// Reads one node, charging its pages to interior_node_reads or
    /// leaf_node_reads. Throws on out-of-range page ids, checksum failures,
    /// or a page of the wrong kind.
    IRTreeNode read_node(PageId page, AccessCounters& counters) const;

    /// Reads a leaf's inverted file, charging inverted_file_reads.
    Postings read_postings(PageId page, AccessCounters& counters) const;

private:
    PageFileReader file_;
    IndexHeader header_;
    Vocabulary vocabulary_;
    std::vector<double> weights_;
};

/// Opens an existing index; throws on missing file, bad magic/version, or a
/// corrupt header.
std::unique_ptr<IndexReader> open_index(const std::filesystem::path& path);

/// Reassembles the keyword set of every object in a leaf from its postings,
/// returned in the same order as node.objects.
std::vector<KeywordSet> leaf_object_keywords(const IRTreeNode& node,
                                             const Postings& postings);

}  // namespace gskq
