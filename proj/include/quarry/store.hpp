#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace quarry {

// Storage layer: one directory per database, one immutable memory-mapped
// table file per table, a LOCK file enforcing the single build-mode writer.
//
// Build mode accumulates entries (in-memory for small tables, or streamed in
// sorted order through a BulkWriter for large ones) and finalizes each table
// into an immutable sorted file via an atomic rename. Read mode maps the
// finalized files; handles are immutable snapshots, shareable across any
// number of threads and processes without locking.

enum class Mode { build, read };

enum class Table : std::uint8_t {
    meta = 0,
    id_map,       // entity-id string -> 8-byte NumericId
    id_map_rev,   // 8-byte NumericId -> entity-id string
    items,        // 8-byte NumericId -> encoded ItemRecord
    inv_pv,       // 8-byte property id ++ 8-byte value id -> posting
    inv_v,        // 8-byte value id -> posting
    pagerank,     // 8-byte NumericId -> 8-byte big-endian IEEE-754 double
    terms,        // term -> varint document frequency
    deletes,      // delete form -> posting of term ordinals
    postings_kw,  // 8-byte term ordinal -> posting of entity ids
};

inline constexpr std::array<Table, 10> kAllTables = {
    Table::meta,   Table::id_map,   Table::id_map_rev, Table::items,
    Table::inv_pv, Table::inv_v,    Table::pagerank,   Table::terms,
    Table::deletes, Table::postings_kw,
};

std::string_view table_name(Table t);
Table table_from_name(std::string_view name);  // throws TableUnknown

namespace meta_keys {
inline constexpr const char* format_version = "format_version";
inline constexpr const char* build_complete = "build_complete";
inline constexpr const char* dump_timestamp = "dump_timestamp";
inline constexpr const char* entity_count = "entity_count";
inline constexpr const char* item_count = "item_count";
inline constexpr const char* property_count = "property_count";
inline constexpr const char* entities_ok = "entities_ok";
inline constexpr const char* entities_skipped = "entities_skipped";
inline constexpr const char* parse_failures = "parse_failures";
inline constexpr const char* statements_dropped = "statements_dropped";
inline constexpr const char* kw_doc_count = "kw_doc_count";
inline constexpr const char* kw_total_len = "kw_total_len";
inline constexpr const char* kw_max_edit = "kw_max_edit";
inline constexpr const char* kw_prefix_cap = "kw_prefix_cap";
inline constexpr const char* pr_damping = "pr_damping";
inline constexpr const char* pr_iterations = "pr_iterations";
inline constexpr const char* pr_residual = "pr_residual";
inline constexpr const char* pr_skipped = "pr_skipped";
}  // namespace meta_keys

class MappedFile {
public:
    MappedFile() = default;
    explicit MappedFile(const std::filesystem::path& path);
    ~MappedFile();
    MappedFile(MappedFile&&) noexcept;
    MappedFile& operator=(MappedFile&&) noexcept;
    MappedFile(const MappedFile&) = delete;
    MappedFile& operator=(const MappedFile&) = delete;

    const char* data() const { return data_; }
    std::size_t size() const { return size_; }

private:
    const char* data_ = nullptr;
    std::size_t size_ = 0;
};

// Immutable sorted table file. Layout:
//   header | key offsets (count+1 x u64) | value offsets | key blob | value blob
class SSTable {
public:
    explicit SSTable(const std::filesystem::path& path);

    std::uint64_t count() const { return count_; }
    std::string_view key(std::uint64_t i) const;
    std::string_view value(std::uint64_t i) const;
    std::optional<std::uint64_t> find(std::string_view key) const;
    std::uint64_t lower_bound(std::string_view key) const;

private:
    MappedFile map_;
    std::uint64_t count_ = 0;
    const char* key_offsets_ = nullptr;
    const char* val_offsets_ = nullptr;
    const char* keys_ = nullptr;
    const char* vals_ = nullptr;
};

// Streams strictly-ascending (key, value) pairs into a finalized table file.
// finish() assembles the file and publishes it with an atomic rename, so a
// crash at any point leaves either no file or a complete one.
class SSTableWriter {
public:
    SSTableWriter(const std::filesystem::path& final_path);
    ~SSTableWriter();

    void append(std::string_view key, std::string_view value);
    void finish();
    void abandon();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class Store;
using StorePtr = std::shared_ptr<Store>;

class Store {
public:
    // Build mode: creates the directory if needed, refuses a completed build
    // (AlreadyBuilt) and a second concurrent builder (LockHeld). Read mode:
    // requires every table file plus the build-complete marker
    // (IncompleteBuild otherwise).
    static StorePtr open(const std::filesystem::path& dir, Mode mode);
    ~Store();

    Mode mode() const { return mode_; }
    const std::filesystem::path& dir() const { return dir_; }

    void put(Table t, std::string_view key, std::string_view value);
    std::optional<std::string> get(Table t, std::string_view key) const;
    // Zero-copy variant; the view stays valid while the handle lives and the
    // table is not mutated.
    std::optional<std::string_view> get_view(Table t, std::string_view key) const;

    // Ascending scan of keys starting with `prefix`; stop early by returning
    // false from the callback.
    void scan(Table t, std::string_view prefix,
              const std::function<bool(std::string_view, std::string_view)>& fn) const;

    class BulkWriter {
    public:
        void append(std::string_view key, std::string_view value);
        void finish();
        ~BulkWriter();
        BulkWriter(BulkWriter&&) noexcept = default;

    private:
        friend class Store;
        BulkWriter(Store* store, Table t);
        Store* store_;
        Table table_;
        std::unique_ptr<SSTableWriter> writer_;
        std::string last_key_;
        bool first_ = true;
        bool finished_ = false;
    };

    // Sorted streaming load of a large table; finish() finalizes it.
    BulkWriter bulk_writer(Table t);

    // Flushes an in-memory table to its immutable file and reopens it mapped.
    void finalize_table(Table t);
    bool table_finalized(Table t) const;
    void reset_table(Table t);  // build mode: drop the table entirely

    // Row access over finalized tables (rows are in ascending key order).
    std::uint64_t row_count(Table t) const;
    std::pair<std::string_view, std::string_view> row(Table t, std::uint64_t i) const;
    std::optional<std::uint64_t> find_row(Table t, std::string_view key) const;

    std::uint64_t table_bytes(Table t) const;

    std::optional<std::string> meta_get(std::string_view key) const;
    void meta_put(std::string_view key, std::string_view value);

private:
    Store(std::filesystem::path dir, Mode mode);

    struct TableState;
    TableState& state(Table t);
    const TableState& state(Table t) const;
    std::filesystem::path table_path(Table t) const;

    std::filesystem::path dir_;
    Mode mode_;
    int lock_fd_ = -1;
    std::array<std::unique_ptr<TableState>, kAllTables.size()> tables_;
};

}  // namespace quarry
