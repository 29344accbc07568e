#include <doctest.h>

#include <atomic>
#include <thread>
#include <vector>

#include "helpers.hpp"
#include "quarry/codec.hpp"
#include "quarry/errors.hpp"
#include "quarry/store.hpp"

using namespace quarry;

namespace {

// minimal complete build: every table finalized, marker set
StorePtr build_tiny(const std::filesystem::path& dir,
                    const std::vector<std::pair<std::string, std::string>>& items = {}) {
    auto store = Store::open(dir, Mode::build);
    for (const auto& [k, v] : items) store->put(Table::items, k, v);
    store->meta_put(meta_keys::format_version, "1");
    store->meta_put(meta_keys::build_complete, "1");
    for (Table t : kAllTables) store->finalize_table(t);
    return store;
}

}  // namespace

TEST_SUITE("store") {

TEST_CASE("put then get returns the value, absent key is none") {
    testutil::TempDir dir;
    auto store = Store::open(dir.path(), Mode::build);
    store->put(Table::items, "k", "v");
    CHECK(store->get(Table::items, "k") == "v");
    store->put(Table::items, "k", "v2");  // last write wins within a build
    CHECK(store->get(Table::items, "k") == "v2");
    CHECK(!store->get(Table::items, "absent").has_value());
}

TEST_CASE("scan yields keys with the prefix in ascending order") {
    testutil::TempDir dir;
    auto store = Store::open(dir.path(), Mode::build);
    store->put(Table::inv_pv, "P31|2", "b");
    store->put(Table::inv_pv, "P31|1", "a");
    store->put(Table::inv_pv, "Q1|9", "c");
    auto collect = [&] {
        std::vector<std::string> keys;
        store->scan(Table::inv_pv, "P31|", [&](std::string_view k, std::string_view) {
            keys.emplace_back(k);
            return true;
        });
        return keys;
    };
    CHECK(collect() == std::vector<std::string>{"P31|1", "P31|2"});
    store->finalize_table(Table::inv_pv);
    CHECK(collect() == std::vector<std::string>{"P31|1", "P31|2"});  // same over the file
}

TEST_CASE("second build-mode open is refused while the first is live") {
    testutil::TempDir dir;
    auto store = Store::open(dir.path(), Mode::build);
    CHECK_THROWS_WITH_AS(Store::open(dir.path(), Mode::build),
                         doctest::Contains("LockHeld"), Error);
    store.reset();  // lock released with the handle
    CHECK_NOTHROW(Store::open(dir.path(), Mode::build));
}

TEST_CASE("read-mode open before any build reports IncompleteBuild") {
    testutil::TempDir dir;
    CHECK_THROWS_WITH_AS(Store::open(dir.path(), Mode::read),
                         doctest::Contains("IncompleteBuild"), Error);
}

TEST_CASE("read-mode open requires the build-complete marker") {
    testutil::TempDir dir;
    {
        auto store = Store::open(dir.path(), Mode::build);
        for (Table t : kAllTables) store->finalize_table(t);  // all tables, no marker
    }
    CHECK_THROWS_WITH_AS(Store::open(dir.path(), Mode::read),
                         doctest::Contains("IncompleteBuild"), Error);
}

TEST_CASE("build-mode open on a completed build is refused") {
    testutil::TempDir dir;
    build_tiny(dir.path());
    CHECK_THROWS_WITH_AS(Store::open(dir.path(), Mode::build),
                         doctest::Contains("AlreadyBuilt"), Error);
}

TEST_CASE("put on a read handle is refused") {
    testutil::TempDir dir;
    build_tiny(dir.path());
    auto reader = Store::open(dir.path(), Mode::read);
    CHECK_THROWS_WITH_AS(reader->put(Table::items, "k", "v"),
                         doctest::Contains("ReadOnly"), Error);
}

TEST_CASE("every table exists after a build, even if empty") {
    testutil::TempDir dir;
    build_tiny(dir.path());
    auto reader = Store::open(dir.path(), Mode::read);
    for (Table t : kAllTables) {
        CHECK(reader->table_bytes(t) > 0);  // file exists (header at minimum)
        CHECK(reader->row_count(t) == (t == Table::meta ? 2 : 0));
    }
}

TEST_CASE("bulk writer requires strictly ascending keys") {
    testutil::TempDir dir;
    auto store = Store::open(dir.path(), Mode::build);
    auto w = store->bulk_writer(Table::inv_v);
    w.append(be64(1), "a");
    w.append(be64(2), "b");
    CHECK_THROWS_AS(w.append(be64(2), "dup"), Error);
    CHECK_THROWS_AS(w.append(be64(1), "lower"), Error);
    w.append(be64(3), "c");
    w.finish();
    CHECK(store->get(Table::inv_v, be64(2)) == "b");
    CHECK(store->row_count(Table::inv_v) == 3);
    auto [k, v] = store->row(Table::inv_v, 2);
    CHECK(k == be64(3));
    CHECK(v == "c");
    CHECK(store->find_row(Table::inv_v, be64(2)) == 1);
    CHECK(!store->find_row(Table::inv_v, be64(9)).has_value());
}

TEST_CASE("get after finalize reads from the mapped file") {
    testutil::TempDir dir;
    auto rng = testutil::make_rng(9);
    std::vector<std::pair<std::string, std::string>> kv;
    for (int i = 0; i < 1000; ++i)
        kv.emplace_back(be64(static_cast<std::uint64_t>(i * 7)), testutil::random_token(rng, 1, 40));
    {
        auto store = Store::open(dir.path(), Mode::build);
        for (auto& [k, v] : kv) store->put(Table::items, k, v);
        store->meta_put(meta_keys::build_complete, "1");
        for (Table t : kAllTables) store->finalize_table(t);
        for (auto& [k, v] : kv) CHECK(store->get(Table::items, k) == v);
    }
    auto reader = Store::open(dir.path(), Mode::read);
    for (auto& [k, v] : kv) CHECK(reader->get(Table::items, k) == v);
}

TEST_CASE("concurrent readers see identical bytes") {
    testutil::TempDir dir;
    auto rng = testutil::make_rng(11);
    std::vector<std::pair<std::string, std::string>> kv;
    for (int i = 0; i < 256; ++i)
        kv.emplace_back(be64(static_cast<std::uint64_t>(i)), testutil::random_token(rng, 5, 30));
    {
        auto store = Store::open(dir.path(), Mode::build);
        for (auto& [k, v] : kv) store->put(Table::items, k, v);
        store->meta_put(meta_keys::build_complete, "1");
        for (Table t : kAllTables) store->finalize_table(t);
    }
    auto reader = Store::open(dir.path(), Mode::read);
    std::atomic<int> mismatches{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            auto trng = testutil::make_rng(100 + static_cast<std::uint64_t>(t));
            std::uniform_int_distribution<std::size_t> pick(0, kv.size() - 1);
            for (int i = 0; i < 20000; ++i) {
                auto& [k, v] = kv[pick(trng)];
                auto got = reader->get(Table::items, k);
                if (!got || *got != v) mismatches.fetch_add(1);
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(mismatches.load() == 0);
}

TEST_CASE("unknown table names are rejected") {
    CHECK_THROWS_WITH_AS(table_from_name("bogus"), doctest::Contains("TableUnknown"), Error);
    CHECK(table_from_name("inv_pv") == Table::inv_pv);
    CHECK(table_name(Table::postings_kw) == "postings_kw");
}

TEST_CASE("reset_table drops data for a stage re-run") {
    testutil::TempDir dir;
    auto store = Store::open(dir.path(), Mode::build);
    store->put(Table::terms, "a", "1");
    store->finalize_table(Table::terms);
    CHECK(store->table_finalized(Table::terms));
    store->reset_table(Table::terms);
    CHECK(!store->table_finalized(Table::terms));
    CHECK(!store->get(Table::terms, "a").has_value());
    store->put(Table::terms, "b", "2");
    store->finalize_table(Table::terms);
    CHECK(store->get(Table::terms, "b") == "2");
}

}  // TEST_SUITE
