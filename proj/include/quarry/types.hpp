#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace quarry {

// ---------------------------------------------------------------------------
// Entity id strings and interned numeric ids
// ---------------------------------------------------------------------------

bool is_entity_id(std::string_view s);    // Q... or P...
bool is_property_id(std::string_view s);  // P...
bool is_item_id(std::string_view s);      // Q...

// Orders property ids numerically (P9 < P31 < P279).
struct PropertyIdLess {
    bool operator()(std::string_view a, std::string_view b) const {
        std::string_view da = a.substr(1), db = b.substr(1);
        if (da.size() != db.size()) return da.size() < db.size();
        if (da != db) return da < db;
        return a < b;  // fall back for malformed keys so the order stays total
    }
};

// Interned entity id: top bit is the namespace (0 = item Q, 1 = property P),
// the low bits a dense per-namespace sequence in first-seen build order.
struct NumericId {
    std::uint64_t raw = 0;

    static constexpr std::uint64_t kPropertyBit = std::uint64_t{1} << 63;

    static NumericId item(std::uint64_t seq) { return {seq}; }
    static NumericId property(std::uint64_t seq) { return {seq | kPropertyBit}; }

    bool is_property() const { return raw & kPropertyBit; }
    std::uint64_t sequence() const { return raw & ~kPropertyBit; }

    auto operator<=>(const NumericId&) const = default;
};

// Sorted, deduplicated set of interned ids; the unit of inverted-index
// storage and boolean evaluation.
using PostingList = std::vector<NumericId>;

// ---------------------------------------------------------------------------
// Snak datavalues
// ---------------------------------------------------------------------------

struct EntityRefValue {
    std::string id;
    bool operator==(const EntityRefValue&) const = default;
};

struct StringValue {
    std::string value;
    bool operator==(const StringValue&) const = default;
};

struct ExternalIdValue {
    std::string value;
    bool operator==(const ExternalIdValue&) const = default;
};

struct UrlValue {
    std::string value;
    bool operator==(const UrlValue&) const = default;
};

struct MonolingualTextValue {
    std::string language;
    std::string text;
    bool operator==(const MonolingualTextValue&) const = default;
};

struct QuantityValue {
    std::string amount;  // decimal kept verbatim ("+12.5") for exact roundtrips
    std::string unit;    // entity id, or "1" for dimensionless
    std::optional<std::string> lower_bound;
    std::optional<std::string> upper_bound;

    double amount_as_double() const;
    bool operator==(const QuantityValue&) const = default;
};

struct TimeValue {
    std::string timestamp;  // ISO-like "+2001-12-31T00:00:00Z"
    int precision = 11;     // 0..14
    std::string calendar;   // entity id
    bool operator==(const TimeValue&) const = default;
};

struct GlobeCoordinateValue {
    double latitude = 0;   // [-90, 90]
    double longitude = 0;  // [-180, 180]
    std::optional<double> precision;
    std::string globe;  // entity id
    bool operator==(const GlobeCoordinateValue&) const = default;
};

// Unknown datavalue types are preserved verbatim, never dropped.
struct OpaqueValue {
    std::string type_tag;
    std::string raw_json;  // canonical (sorted-key) JSON text of the value
    bool operator==(const OpaqueValue&) const = default;
};

using DataValue =
    std::variant<EntityRefValue, StringValue, ExternalIdValue, UrlValue,
                 MonolingualTextValue, QuantityValue, TimeValue,
                 GlobeCoordinateValue, OpaqueValue>;

enum class SnakKind : std::uint8_t { value = 0, somevalue = 1, novalue = 2 };

struct Snak {
    SnakKind kind = SnakKind::novalue;
    std::string property;
    std::optional<DataValue> datavalue;  // present iff kind == value

    const EntityRefValue* entity_ref() const {
        return datavalue ? std::get_if<EntityRefValue>(&*datavalue) : nullptr;
    }
    bool operator==(const Snak&) const = default;
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StatementRank : std::uint8_t { normal = 0, preferred = 1, deprecated = 2 };

using SnakMap = std::map<std::string, std::vector<Snak>, PropertyIdLess>;

struct ReferenceGroup {
    SnakMap snaks;
    std::vector<std::string> snak_order;  // exactly the keys of snaks
    bool operator==(const ReferenceGroup&) const = default;
};

struct Statement {
    Snak mainsnak;
    StatementRank rank = StatementRank::normal;
    SnakMap qualifiers;
    std::vector<ReferenceGroup> references;
    bool operator==(const Statement&) const = default;
};

// ---------------------------------------------------------------------------
// ItemRecord: the value side of the main key-value table
// ---------------------------------------------------------------------------

struct ItemRecord {
    std::string id;
    std::map<std::string, std::string> labels;        // language -> text
    std::map<std::string, std::string> descriptions;  // language -> text
    std::map<std::string, std::vector<std::string>> aliases;
    std::map<std::string, std::string> sitelinks;  // site key -> page title
    std::map<std::string, std::vector<Statement>, PropertyIdLess> claims;

    bool operator==(const ItemRecord&) const = default;
};

const char* snak_kind_name(SnakKind k);
const char* rank_name(StatementRank r);

}  // namespace quarry
