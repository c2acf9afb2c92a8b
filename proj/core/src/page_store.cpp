#include "gskq/page_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <stdexcept>

namespace gskq {

namespace {

// Fixed bytes at the front of every non-header page:
// u32 checksum | u8 kind | 3 zero bytes | u32 next page | u32 payload length.
constexpr size_t kPageOverhead = 16;
constexpr size_t kChecksumOff = 0;
constexpr size_t kKindOff = 4;
constexpr size_t kNextOff = 8;
constexpr size_t kLenOff = 12;

void put_u32(uint8_t* p, uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<uint8_t>(v >> (8 * i));
}

uint32_t get_u32(const uint8_t* p) {
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

void pwrite_all(int fd, const uint8_t* data, size_t size, uint64_t offset,
                const std::filesystem::path& path) {
    while (size > 0) {
        const ssize_t n = ::pwrite(fd, data, size, static_cast<off_t>(offset));
        if (n <= 0) fail(path, "write failed");
        data += n;
        size -= static_cast<size_t>(n);
        offset += static_cast<uint64_t>(n);
    }
}

void pread_all(int fd, uint8_t* data, size_t size, uint64_t offset,
               const std::filesystem::path& path) {
    while (size > 0) {
        const ssize_t n = ::pread(fd, data, size, static_cast<off_t>(offset));
        if (n < 0) fail(path, "read failed");
        if (n == 0) fail(path, "unexpected end of file");
        data += n;
        size -= static_cast<size_t>(n);
        offset += static_cast<uint64_t>(n);
    }
}

}  // namespace

uint32_t page_checksum(std::span<const uint8_t> data) {
    uint32_t h = 2166136261u;
    for (uint8_t b : data) {
        h ^= b;
        h *= 16777619u;
    }
    return h;
}

std::span<const uint8_t> ByteReader::take(size_t n) {
    if (pos_ + n > data_.size())
        throw std::runtime_error("truncated page payload");
    const auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

PageFileWriter::PageFileWriter(const std::filesystem::path& path,
                               uint32_t page_size)
    : path_(path), page_size_(page_size) {
    if (page_size < 512) throw std::invalid_argument("page size below 512 bytes");
    fd_ = ::open(path.c_str(), O_CREAT | O_TRUNC | O_WRONLY, 0644);
    if (fd_ < 0) fail(path_, "cannot create");
}

PageFileWriter::~PageFileWriter() {
    if (fd_ >= 0) ::close(fd_);
}

uint32_t PageFileWriter::page_capacity() const {
    return page_size_ - static_cast<uint32_t>(kPageOverhead);
}

PageId PageFileWriter::write_page(PageKind kind,
                                  std::span<const uint8_t> payload,
                                  PageId next) {
    std::vector<uint8_t> page(page_size_, 0);
    page[kKindOff] = static_cast<uint8_t>(kind);
    put_u32(page.data() + kNextOff, next);
    put_u32(page.data() + kLenOff, static_cast<uint32_t>(payload.size()));
    std::memcpy(page.data() + kPageOverhead, payload.data(), payload.size());
    put_u32(page.data() + kChecksumOff,
            page_checksum({page.data() + kKindOff, page_size_ - kKindOff}));
    const PageId id = next_page_++;
    pwrite_all(fd_, page.data(), page_size_,
               static_cast<uint64_t>(id) * page_size_, path_);
    return id;
}

PageId PageFileWriter::write_blob(PageKind kind,
                                  std::span<const uint8_t> payload) {
    if (header_written_) throw std::logic_error("page file already finalized");
    const uint32_t cap = page_capacity();
    // Pages are appended in chain order, so each page's successor id is
    // simply the next page to be written (or none on the final chunk).
    size_t pos = 0;
    const PageId head = next_page_;
    bool first = true;
    do {
        const size_t chunk = std::min<size_t>(cap, payload.size() - pos);
        const bool last = pos + chunk == payload.size();
        write_page(first ? kind : PageKind::Spill,
                   payload.subspan(pos, chunk), last ? kNoPage : next_page_ + 1);
        pos += chunk;
        first = false;
    } while (pos < payload.size());
    return head;
}

void PageFileWriter::write_header(std::span<const uint8_t> payload) {
    if (header_written_) throw std::logic_error("header already written");
    // Header layout: magic | version | page size | checksum | length | payload.
    if (payload.size() + 24 > page_size_)
        throw std::invalid_argument("header payload exceeds one page");
    std::vector<uint8_t> page(page_size_, 0);
    put_u32(page.data() + 0, 0x51535147u);   // "GQSQ" tag, low word of magic
    put_u32(page.data() + 4, 0x31584449u);   // "IDX1"
    put_u32(page.data() + 8, 1u);            // format version
    put_u32(page.data() + 12, page_size_);
    put_u32(page.data() + 20, static_cast<uint32_t>(payload.size()));
    std::memcpy(page.data() + 24, payload.data(), payload.size());
    put_u32(page.data() + 16,
            page_checksum({page.data() + 20, page_size_ - 20}));
    pwrite_all(fd_, page.data(), page_size_, 0, path_);
    if (::fsync(fd_) != 0) fail(path_, "fsync failed");
    ::close(fd_);
    fd_ = -1;
    header_written_ = true;
}

PageFileReader::PageFileReader(const std::filesystem::path& path)
    : path_(path) {
    fd_ = ::open(path.c_str(), O_RDONLY);
    if (fd_ < 0) fail(path_, "cannot open");
    uint8_t prefix[16];
    pread_all(fd_, prefix, sizeof prefix, 0, path_);
    if (get_u32(prefix + 0) != 0x51535147u || get_u32(prefix + 4) != 0x31584449u)
        fail(path_, "not an index file (bad magic)");
    if (get_u32(prefix + 8) != 1u)
        fail(path_, "unsupported index format version " +
                        std::to_string(get_u32(prefix + 8)));
    page_size_ = get_u32(prefix + 12);
    if (page_size_ < 512) fail(path_, "corrupt header (page size)");
    const uint64_t bytes = std::filesystem::file_size(path);
    if (bytes % page_size_ != 0) fail(path_, "file size is not page-aligned");
    page_count_ = static_cast<PageId>(bytes / page_size_);
}

PageFileReader::~PageFileReader() {
    if (fd_ >= 0) ::close(fd_);
}

std::vector<uint8_t> PageFileReader::read_header() const {
    std::vector<uint8_t> page(page_size_);
    pread_all(fd_, page.data(), page_size_, 0, path_);
    const uint32_t want = get_u32(page.data() + 16);
    const uint32_t got = page_checksum({page.data() + 20, page_size_ - 20});
    if (want != got) fail(path_, "header checksum mismatch");
    const uint32_t len = get_u32(page.data() + 20);
    if (len + 24 > page_size_) fail(path_, "corrupt header (length)");
    return {page.begin() + 24, page.begin() + 24 + len};
}

PageFileReader::RawPage PageFileReader::read_page(PageId page) const {
    if (page == 0 || page >= page_count_)
        fail(path_, "page id " + std::to_string(page) + " out of range");
    std::vector<uint8_t> raw(page_size_);
    pread_all(fd_, raw.data(), page_size_,
              static_cast<uint64_t>(page) * page_size_, path_);
    const uint32_t want = get_u32(raw.data() + kChecksumOff);
    const uint32_t got =
        page_checksum({raw.data() + kKindOff, page_size_ - kKindOff});
    if (want != got)
        fail(path_, "checksum mismatch on page " + std::to_string(page));
    RawPage out;
    out.kind = static_cast<PageKind>(raw[kKindOff]);
    out.next = get_u32(raw.data() + kNextOff);
    const uint32_t len = get_u32(raw.data() + kLenOff);
    if (len + kPageOverhead > page_size_)
        fail(path_, "corrupt page " + std::to_string(page) + " (length)");
    out.payload.assign(raw.begin() + kPageOverhead,
                       raw.begin() + kPageOverhead + len);
    return out;
}

Blob PageFileReader::read_chain(PageId page) const {
    Blob blob;
    PageId current = page;
    bool first = true;
    while (current != kNoPage) {
        RawPage raw = read_page(current);
        if (first) {
            blob.kind = raw.kind;
        } else if (raw.kind != PageKind::Spill) {
            fail(path_, "page " + std::to_string(current) +
                            " breaks a chain (kind " +
                            std::to_string(static_cast<int>(raw.kind)) + ")");
        }
        ++blob.pages;
        blob.payload.insert(blob.payload.end(), raw.payload.begin(),
                            raw.payload.end());
        current = raw.next;
        first = false;
    }
    return blob;
}

std::vector<uint8_t> PageFileReader::read_blob(PageId page,
                                               PageKind expected_kind,
                                               PageReadStats* stats) const {
    Blob blob = read_chain(page);
    if (blob.kind != expected_kind)
        fail(path_, "page " + std::to_string(page) + " has kind " +
                        std::to_string(static_cast<int>(blob.kind)) +
                        ", expected " +
                        std::to_string(static_cast<int>(expected_kind)));
    if (stats) stats->pages_read += blob.pages;
    return std::move(blob.payload);
}

}  // namespace gskq
