#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "quarry/types.hpp"

namespace testutil {

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

class TempDir {
public:
    TempDir() {
        std::string tpl = (std::filesystem::temp_directory_path() / "quarry_test_XXXXXX").string();
        path_ = mkdtemp(tpl.data());
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& sub) const { return path_ / sub; }

private:
    std::filesystem::path path_;
};

inline std::string random_token(std::mt19937_64& rng, int min_len, int max_len) {
    std::uniform_int_distribution<int> len(min_len, max_len);
    std::uniform_int_distribution<int> ch(0, 25);
    std::string s;
    int n = len(rng);
    for (int i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + ch(rng)));
    return s;
}

inline quarry::PostingList random_posting(std::mt19937_64& rng, std::size_t max_len,
                                          std::uint64_t max_gap = 1000) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::uint64_t> gap(1, max_gap);
    quarry::PostingList list;
    std::uint64_t cur = 0;
    std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
        cur += gap(rng);
        list.push_back({cur});
    }
    return list;
}

inline quarry::Snak random_snak(std::mt19937_64& rng) {
    using namespace quarry;
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> dv(0, 8);
    std::uniform_int_distribution<int> num(1, 9999);
    Snak s;
    s.property = "P" + std::to_string(num(rng));
    int k = kind(rng);
    s.kind = static_cast<SnakKind>(k);
    if (s.kind != SnakKind::value) return s;
    switch (dv(rng)) {
        case 0: s.datavalue = EntityRefValue{"Q" + std::to_string(num(rng))}; break;
        case 1: s.datavalue = StringValue{random_token(rng, 0, 12)}; break;
        case 2: s.datavalue = ExternalIdValue{random_token(rng, 1, 10)}; break;
        case 3: s.datavalue = UrlValue{"https://example.org/" + random_token(rng, 1, 8)}; break;
        case 4: s.datavalue = MonolingualTextValue{"en", random_token(rng, 1, 10)}; break;
        case 5: {
            QuantityValue q;
            q.amount = "+" + std::to_string(num(rng)) + ".5";
            q.unit = num(rng) % 2 ? "1" : "Q" + std::to_string(num(rng));
            if (num(rng) % 3 == 0) q.lower_bound = "+1";
            if (num(rng) % 3 == 1) q.upper_bound = "+99";
            s.datavalue = q;
            break;
        }
        case 6: {
            TimeValue t;
            t.timestamp = "+2020-01-01T00:00:00Z";
            t.precision = num(rng) % 15;
            t.calendar = "Q1985727";
            s.datavalue = t;
            break;
        }
        case 7: {
            GlobeCoordinateValue g;
            g.latitude = (num(rng) % 18000) / 100.0 - 90.0;
            g.longitude = (num(rng) % 36000) / 100.0 - 180.0;
            if (num(rng) % 2) g.precision = 0.01;
            g.globe = "Q2";
            s.datavalue = g;
            break;
        }
        default:
            s.datavalue = OpaqueValue{"musical-notation", "{\"x\":" + std::to_string(num(rng)) + "}"};
            break;
    }
    return s;
}

inline quarry::ItemRecord random_record(std::mt19937_64& rng, const std::string& id) {
    using namespace quarry;
    std::uniform_int_distribution<int> small(0, 3);
    std::uniform_int_distribution<int> num(1, 9999);
    ItemRecord rec;
    rec.id = id;
    const char* langs[] = {"en", "fr", "de", "ja"};
    for (int i = 0; i < small(rng); ++i)
        rec.labels[langs[i % 4]] = random_token(rng, 1, 12);
    for (int i = 0; i < small(rng); ++i)
        rec.descriptions[langs[i % 4]] = random_token(rng, 1, 20);
    for (int i = 0; i < small(rng); ++i) {
        auto& list = rec.aliases[langs[i % 4]];
        for (int j = 0; j <= small(rng); ++j) {
            auto alias = random_token(rng, 1, 10) + std::to_string(j);
            list.push_back(alias);
        }
    }
    for (int i = 0; i < small(rng); ++i)
        rec.sitelinks["site" + std::to_string(i) + "wiki"] = random_token(rng, 1, 14);
    int nprops = small(rng);
    for (int i = 0; i < nprops; ++i) {
        std::string prop = "P" + std::to_string(num(rng));
        auto& statements = rec.claims[prop];
        int nstmt = 1 + small(rng);
        for (int j = 0; j < nstmt; ++j) {
            Statement st;
            st.mainsnak = random_snak(rng);
            st.mainsnak.property = prop;
            st.rank = static_cast<StatementRank>(num(rng) % 3);
            if (num(rng) % 3 == 0) {
                std::string qp = "P" + std::to_string(num(rng));
                st.qualifiers[qp].push_back(random_snak(rng));
            }
            if (num(rng) % 4 == 0) {
                ReferenceGroup g;
                std::string rp = "P" + std::to_string(num(rng));
                g.snaks[rp].push_back(random_snak(rng));
                g.snak_order.push_back(rp);
                st.references.push_back(g);
            }
            statements.push_back(std::move(st));
        }
    }
    return rec;
}

}  // namespace testutil
