#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gskq {

/// Page ids are file offsets divided by the page size; page 0 is the header.
using PageId = uint32_t;

inline constexpr PageId kNoPage = 0xffffffffu;

/// What a page holds; stored in the page header so corrupted or misdirected
/// reads fail loudly instead of being decoded as the wrong structure.
enum class PageKind : uint8_t {
    Interior = 1,
    Leaf = 2,
    Spill = 3,      // continuation of a chained blob
    InvertedFile = 4,
    Vocabulary = 5,
    Weights = 6,
};

/// Little-endian serialization helpers over a byte buffer. All multi-byte
/// values are written least-significant byte first so an index file built on
/// one machine opens identically on any other.
class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    void bytes(std::span<const uint8_t> data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
    }
    void str(std::string_view s) {
        u32(static_cast<uint32_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }
    const std::vector<uint8_t>& data() const { return buf_; }
    size_t size() const { return buf_.size(); }

private:
    std::vector<uint8_t> buf_;
};

/// Reads values back in the same order; throws std::runtime_error on
/// truncation so a short or corrupt page never yields garbage silently.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() { return take(1)[0]; }
    uint32_t u32() {
        const auto b = take(4);
        uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    uint64_t u64() {
        const auto b = take(8);
        uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    double f64() {
        const uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::string str() {
        const uint32_t n = u32();
        const auto b = take(n);
        return std::string(reinterpret_cast<const char*>(b.data()), b.size());
    }
    size_t remaining() const { return data_.size() - pos_; }

private:
    std::span<const uint8_t> take(size_t n);

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

/// Appends fixed-size pages to a new file. Every page carries a 32-bit
/// checksum over its remaining bytes, its kind, and the next page of its
/// chain (kNoPage when it is the last). Payloads longer than one page spill
/// into Spill continuation pages transparently. Page 0 is reserved for the
/// header, which the caller writes last via write_header().
class PageFileWriter {
public:
    PageFileWriter(const std::filesystem::path& path, uint32_t page_size);
    ~PageFileWriter();
    PageFileWriter(const PageFileWriter&) = delete;
    PageFileWriter& operator=(const PageFileWriter&) = delete;

    /// Writes a payload starting at a fresh page, chaining spill pages as
    /// needed, and returns the first page id.
    PageId write_blob(PageKind kind, std::span<const uint8_t> payload);

    /// Payload bytes that fit in a single page.
    uint32_t page_capacity() const;

    /// Number of pages written so far, including the reserved header page.
    PageId page_count() const { return next_page_; }

    /// Writes the header payload into page 0 and closes the file. The
    /// header must fit in one page.
    void write_header(std::span<const uint8_t> payload);

private:
    PageId write_page(PageKind kind, std::span<const uint8_t> payload,
                      PageId next);

    int fd_ = -1;
    std::filesystem::path path_;
    uint32_t page_size_;
    PageId next_page_ = 1;  // page 0 is the header
    bool header_written_ = false;
};

/// Read-side counters. Every page fetched through PageFileReader is counted
/// exactly once per read call, chained continuation pages included, so the
/// totals reflect logical disk accesses.
struct PageReadStats {
    uint64_t pages_read = 0;
};

/// A reassembled chained payload: the head page's kind, the concatenated
/// payload bytes, and how many pages the chain occupied.
struct Blob {
    PageKind kind;
    std::vector<uint8_t> payload;
    uint64_t pages = 0;
};

/// Random-access reader over a page file. Reads use pread and shared state
/// is immutable after open, so one reader can serve concurrent queries.
class PageFileReader {
public:
    explicit PageFileReader(const std::filesystem::path& path);
    ~PageFileReader();
    PageFileReader(const PageFileReader&) = delete;
    PageFileReader& operator=(const PageFileReader&) = delete;

    /// Reads the chain starting at `page`, verifying each page's checksum
    /// and that continuation pages are Spill pages, and returns the
    /// reassembled payload with the head page's kind.
    Blob read_chain(PageId page) const;

    /// read_chain plus a head-kind check; `stats` (if given) accumulates
    /// how many physical pages the chain touched.
    std::vector<uint8_t> read_blob(PageId page, PageKind expected_kind,
                                   PageReadStats* stats = nullptr) const;

    /// Returns the header payload from page 0 after verifying its checksum.
    std::vector<uint8_t> read_header() const;

    uint32_t page_size() const { return page_size_; }
    PageId page_count() const { return page_count_; }

private:
    struct RawPage {
        PageKind kind;
        PageId next;
        std::vector<uint8_t> payload;
    };
    RawPage read_page(PageId page) const;

    int fd_ = -1;
    std::filesystem::path path_;
    uint32_t page_size_ = 0;
    PageId page_count_ = 0;
};

/// FNV-1a over the page body; cheap, order-sensitive, and good enough to
/// catch torn writes and bit rot in tests.
uint32_t page_checksum(std::span<const uint8_t> data);

}  // namespace gskq
