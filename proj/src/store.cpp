#include "quarry/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <vector>

#include "quarry/errors.hpp"

namespace quarry {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'Q', 'S', 'T', 'B'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderSize = 40;

std::uint64_t le64_at(const char* p) {
    std::uint64_t v;
    std::memcpy(&v, p, 8);
    return v;  // file format is little-endian; matches all supported targets
}

void append_le64(std::string& out, std::uint64_t v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.append(buf, 8);
}

[[noreturn]] void throw_errno(const std::string& what) {
    throw Error(errc::io, what + ": " + std::strerror(errno));
}

void fsync_path(const fs::path& p) {
    int fd = ::open(p.c_str(), O_RDONLY);
    if (fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
}

}  // namespace

std::string_view table_name(Table t) {
    switch (t) {
        case Table::meta: return "meta";
        case Table::id_map: return "id_map";
        case Table::id_map_rev: return "id_map_rev";
        case Table::items: return "items";
        case Table::inv_pv: return "inv_pv";
        case Table::inv_v: return "inv_v";
        case Table::pagerank: return "pagerank";
        case Table::terms: return "terms";
        case Table::deletes: return "deletes";
        case Table::postings_kw: return "postings_kw";
    }
    return "?";
}

Table table_from_name(std::string_view name) {
    for (Table t : kAllTables)
        if (table_name(t) == name) return t;
    throw Error(errc::table_unknown, "no such table: " + std::string(name));
}

// ---------------------------------------------------------------------------
// MappedFile
// ---------------------------------------------------------------------------

MappedFile::MappedFile(const fs::path& path) {
    int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw_errno("open " + path.string());
    struct stat st{};
    if (::fstat(fd, &st) != 0) {
        ::close(fd);
        throw_errno("stat " + path.string());
    }
    size_ = static_cast<std::size_t>(st.st_size);
    if (size_ > 0) {
        void* p = ::mmap(nullptr, size_, PROT_READ, MAP_SHARED, fd, 0);
        if (p == MAP_FAILED) {
            ::close(fd);
            throw_errno("mmap " + path.string());
        }
        data_ = static_cast<const char*>(p);
    }
    ::close(fd);
}

MappedFile::~MappedFile() {
    if (data_) ::munmap(const_cast<char*>(data_), size_);
}

MappedFile::MappedFile(MappedFile&& other) noexcept
    : data_(other.data_), size_(other.size_) {
    other.data_ = nullptr;
    other.size_ = 0;
}

MappedFile& MappedFile::operator=(MappedFile&& other) noexcept {
    if (this != &other) {
        if (data_) ::munmap(const_cast<char*>(data_), size_);
        data_ = other.data_;
        size_ = other.size_;
        other.data_ = nullptr;
        other.size_ = 0;
    }
    return *this;
}

// ---------------------------------------------------------------------------
// SSTable
// ---------------------------------------------------------------------------

SSTable::SSTable(const fs::path& path) : map_(path) {
    auto corrupt = [&](const char* why) {
        throw Error("CorruptTable", path.string() + ": " + why);
    };
    if (map_.size() < kHeaderSize) corrupt("short header");
    const char* p = map_.data();
    if (std::memcmp(p, kMagic, 4) != 0) corrupt("bad magic");
    std::uint32_t version;
    std::memcpy(&version, p + 4, 4);
    if (version != kFormatVersion) corrupt("unsupported version");
    count_ = le64_at(p + 8);
    std::uint64_t keys_size = le64_at(p + 16);
    std::uint64_t vals_size = le64_at(p + 24);
    std::uint64_t offs = 8 * (count_ + 1);
    std::uint64_t expect = kHeaderSize + 2 * offs + keys_size + vals_size;
    if (expect != map_.size()) corrupt("size mismatch");
    key_offsets_ = p + kHeaderSize;
    val_offsets_ = key_offsets_ + offs;
    keys_ = val_offsets_ + offs;
    vals_ = keys_ + keys_size;
    if (le64_at(key_offsets_ + 8 * count_) != keys_size ||
        le64_at(val_offsets_ + 8 * count_) != vals_size)
        corrupt("offset table mismatch");
}

std::string_view SSTable::key(std::uint64_t i) const {
    std::uint64_t a = le64_at(key_offsets_ + 8 * i);
    std::uint64_t b = le64_at(key_offsets_ + 8 * (i + 1));
    return {keys_ + a, b - a};
}

std::string_view SSTable::value(std::uint64_t i) const {
    std::uint64_t a = le64_at(val_offsets_ + 8 * i);
    std::uint64_t b = le64_at(val_offsets_ + 8 * (i + 1));
    return {vals_ + a, b - a};
}

std::uint64_t SSTable::lower_bound(std::string_view k) const {
    std::uint64_t lo = 0, hi = count_;
    while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (key(mid) < k)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

std::optional<std::uint64_t> SSTable::find(std::string_view k) const {
    std::uint64_t i = lower_bound(k);
    if (i < count_ && key(i) == k) return i;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// SSTableWriter
// ---------------------------------------------------------------------------

struct SSTableWriter::Impl {
    fs::path final_path;
    fs::path part_keys, part_vals, part_ko, part_vo;
    std::ofstream keys, vals, ko, vo;
    std::uint64_t count = 0;
    std::uint64_t keys_size = 0;
    std::uint64_t vals_size = 0;
    bool done = false;

    explicit Impl(const fs::path& path) : final_path(path) {
        part_keys = path.string() + ".k.part";
        part_vals = path.string() + ".v.part";
        part_ko = path.string() + ".ko.part";
        part_vo = path.string() + ".vo.part";
        keys.open(part_keys, std::ios::binary | std::ios::trunc);
        vals.open(part_vals, std::ios::binary | std::ios::trunc);
        ko.open(part_ko, std::ios::binary | std::ios::trunc);
        vo.open(part_vo, std::ios::binary | std::ios::trunc);
        if (!keys || !vals || !ko || !vo)
            throw Error(errc::io, "cannot create part files for " + path.string());
    }

    void put_le64(std::ofstream& f, std::uint64_t v) {
        char buf[8];
        std::memcpy(buf, &v, 8);
        f.write(buf, 8);
    }

    void append(std::string_view key, std::string_view value) {
        put_le64(ko, keys_size);
        put_le64(vo, vals_size);
        keys.write(key.data(), static_cast<std::streamsize>(key.size()));
        vals.write(value.data(), static_cast<std::streamsize>(value.size()));
        keys_size += key.size();
        vals_size += value.size();
        ++count;
    }

    void copy_into(std::ofstream& out, const fs::path& src) {
        std::ifstream in(src, std::ios::binary);
        std::vector<char> buf(1 << 20);
        while (in) {
            in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
            out.write(buf.data(), in.gcount());
        }
    }

    void cleanup_parts() {
        std::error_code ec;
        for (const auto& p : {part_keys, part_vals, part_ko, part_vo})
            fs::remove(p, ec);
    }

    void finish() {
        put_le64(ko, keys_size);
        put_le64(vo, vals_size);
        keys.close();
        vals.close();
        ko.close();
        vo.close();
        if (!keys || !vals || !ko || !vo)
            throw Error(errc::io, "write failed for " + final_path.string());

        fs::path tmp = final_path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            std::string header;
            header.append(kMagic, 4);
            std::uint32_t version = kFormatVersion;
            header.append(reinterpret_cast<const char*>(&version), 4);
            append_le64(header, count);
            append_le64(header, keys_size);
            append_le64(header, vals_size);
            append_le64(header, 0);  // reserved
            out.write(header.data(), static_cast<std::streamsize>(header.size()));
            copy_into(out, part_ko);
            copy_into(out, part_vo);
            copy_into(out, part_keys);
            copy_into(out, part_vals);
            out.close();
            if (!out) throw Error(errc::io, "assembling " + final_path.string());
        }
        cleanup_parts();
        fsync_path(tmp);
        fs::rename(tmp, final_path);
        fsync_path(final_path.parent_path());
        done = true;
    }
};

SSTableWriter::SSTableWriter(const fs::path& final_path)
    : impl_(std::make_unique<Impl>(final_path)) {}

SSTableWriter::~SSTableWriter() {
    if (impl_ && !impl_->done) impl_->cleanup_parts();
}

void SSTableWriter::append(std::string_view key, std::string_view value) {
    impl_->append(key, value);
}

void SSTableWriter::finish() { impl_->finish(); }

void SSTableWriter::abandon() {
    impl_->cleanup_parts();
    impl_->done = true;
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

struct Store::TableState {
    std::map<std::string, std::string> mem;
    std::unique_ptr<SSTable> sst;
    bool bulk_active = false;
};

Store::Store(fs::path dir, Mode mode) : dir_(std::move(dir)), mode_(mode) {
    for (auto& t : tables_) t = std::make_unique<TableState>();
}

Store::~Store() {
    if (lock_fd_ >= 0) ::close(lock_fd_);
}

fs::path Store::table_path(Table t) const {
    return dir_ / (std::string(table_name(t)) + ".tbl");
}

Store::TableState& Store::state(Table t) { return *tables_[static_cast<std::size_t>(t)]; }
const Store::TableState& Store::state(Table t) const {
    return *tables_[static_cast<std::size_t>(t)];
}

StorePtr Store::open(const fs::path& dir, Mode mode) {
    auto store = StorePtr(new Store(dir, mode));
    if (mode == Mode::build) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw Error(errc::io, "cannot create " + dir.string());

        int fd = ::open((dir / "LOCK").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd < 0) throw_errno("open lock file");
        if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
            ::close(fd);
            throw Error(errc::lock_held, "another build holds " + dir.string());
        }
        store->lock_fd_ = fd;

        if (fs::exists(store->table_path(Table::meta)))
            throw Error(errc::already_built,
                        dir.string() + " already contains a completed build");

        // stale temporaries from a crashed builder
        for (const auto& entry : fs::directory_iterator(dir)) {
            auto name = entry.path().filename().string();
            if (name.ends_with(".part") || name.ends_with(".tmp"))
                fs::remove(entry.path(), ec);
        }
        // previously finalized tables stay available for stage resume
        for (Table t : kAllTables)
            if (fs::exists(store->table_path(t)))
                store->state(t).sst = std::make_unique<SSTable>(store->table_path(t));
    } else {
        for (Table t : kAllTables) {
            auto path = store->table_path(t);
            if (!fs::exists(path))
                throw Error(errc::incomplete_build,
                            "missing table " + std::string(table_name(t)) + " in " +
                                dir.string());
            store->state(t).sst = std::make_unique<SSTable>(path);
        }
        auto marker = store->meta_get(meta_keys::build_complete);
        if (!marker || *marker != "1")
            throw Error(errc::incomplete_build,
                        "no build-complete marker in " + dir.string());
    }
    return store;
}

void Store::put(Table t, std::string_view key, std::string_view value) {
    if (mode_ != Mode::build)
        throw Error(errc::read_only, "put on a read-mode handle");
    TableState& ts = state(t);
    if (ts.sst || ts.bulk_active)
        throw Error(errc::read_only,
                    "table " + std::string(table_name(t)) + " is already finalized");
    ts.mem[std::string(key)] = std::string(value);
}

std::optional<std::string_view> Store::get_view(Table t, std::string_view key) const {
    const TableState& ts = state(t);
    if (ts.sst) {
        if (auto i = ts.sst->find(key)) return ts.sst->value(*i);
        return std::nullopt;
    }
    auto it = ts.mem.find(std::string(key));
    if (it == ts.mem.end()) return std::nullopt;
    return std::string_view(it->second);
}

std::optional<std::string> Store::get(Table t, std::string_view key) const {
    auto v = get_view(t, key);
    if (!v) return std::nullopt;
    return std::string(*v);
}

void Store::scan(Table t, std::string_view prefix,
                 const std::function<bool(std::string_view, std::string_view)>& fn) const {
    const TableState& ts = state(t);
    if (ts.sst) {
        for (std::uint64_t i = ts.sst->lower_bound(prefix); i < ts.sst->count(); ++i) {
            std::string_view k = ts.sst->key(i);
            if (k.substr(0, prefix.size()) != prefix) break;
            if (!fn(k, ts.sst->value(i))) break;
        }
        return;
    }
    for (auto it = ts.mem.lower_bound(std::string(prefix)); it != ts.mem.end(); ++it) {
        std::string_view k = it->first;
        if (k.substr(0, prefix.size()) != prefix) break;
        if (!fn(k, it->second)) break;
    }
}

Store::BulkWriter::BulkWriter(Store* store, Table t) : store_(store), table_(t) {
    if (store->mode_ != Mode::build)
        throw Error(errc::read_only, "bulk load on a read-mode handle");
    TableState& ts = store->state(t);
    if (ts.sst || ts.bulk_active || !ts.mem.empty())
        throw Error(errc::read_only, "table " + std::string(table_name(t)) +
                                         " is not empty or already loading");
    ts.bulk_active = true;
    writer_ = std::make_unique<SSTableWriter>(store->table_path(t));
}

Store::BulkWriter::~BulkWriter() {
    if (!finished_ && store_) store_->state(table_).bulk_active = false;
}

void Store::BulkWriter::append(std::string_view key, std::string_view value) {
    if (!first_ && key <= last_key_)
        throw Error(errc::io, "bulk keys not strictly ascending in table " +
                                  std::string(table_name(table_)));
    writer_->append(key, value);
    last_key_.assign(key);
    first_ = false;
}

void Store::BulkWriter::finish() {
    writer_->finish();
    TableState& ts = store_->state(table_);
    ts.bulk_active = false;
    ts.sst = std::make_unique<SSTable>(store_->table_path(table_));
    finished_ = true;
}

Store::BulkWriter Store::bulk_writer(Table t) { return BulkWriter(this, t); }

void Store::finalize_table(Table t) {
    if (mode_ != Mode::build)
        throw Error(errc::read_only, "finalize on a read-mode handle");
    TableState& ts = state(t);
    if (ts.sst) return;  // already finalized (resume path)
    SSTableWriter w(table_path(t));
    for (const auto& [k, v] : ts.mem) w.append(k, v);
    w.finish();
    ts.mem.clear();
    ts.sst = std::make_unique<SSTable>(table_path(t));
}

bool Store::table_finalized(Table t) const { return state(t).sst != nullptr; }

void Store::reset_table(Table t) {
    if (mode_ != Mode::build)
        throw Error(errc::read_only, "reset on a read-mode handle");
    TableState& ts = state(t);
    ts.sst.reset();
    ts.mem.clear();
    std::error_code ec;
    fs::remove(table_path(t), ec);
}

std::uint64_t Store::row_count(Table t) const {
    const TableState& ts = state(t);
    if (ts.sst) return ts.sst->count();
    return ts.mem.size();
}

std::pair<std::string_view, std::string_view> Store::row(Table t, std::uint64_t i) const {
    const TableState& ts = state(t);
    if (!ts.sst)
        throw Error(errc::io,
                    "row access on unfinalized table " + std::string(table_name(t)));
    return {ts.sst->key(i), ts.sst->value(i)};
}

std::optional<std::uint64_t> Store::find_row(Table t, std::string_view key) const {
    const TableState& ts = state(t);
    if (!ts.sst) return std::nullopt;
    return ts.sst->find(key);
}

std::uint64_t Store::table_bytes(Table t) const {
    std::error_code ec;
    auto size = fs::file_size(table_path(t), ec);
    return ec ? 0 : size;
}

std::optional<std::string> Store::meta_get(std::string_view key) const {
    return get(Table::meta, key);
}

void Store::meta_put(std::string_view key, std::string_view value) {
    put(Table::meta, key, value);
}

}  // namespace quarry
