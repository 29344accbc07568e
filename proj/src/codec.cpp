#include "quarry/codec.hpp"

#include <charconv>
#include <cstring>

#include "quarry/errors.hpp"
#include "quarry/varint.hpp"

namespace quarry {

bool is_entity_id(std::string_view s) {
    if (s.size() < 2 || (s[0] != 'Q' && s[0] != 'P')) return false;
    for (char c : s.substr(1))
        if (c < '0' || c > '9') return false;
    return true;
}

bool is_property_id(std::string_view s) { return is_entity_id(s) && s[0] == 'P'; }
bool is_item_id(std::string_view s) { return is_entity_id(s) && s[0] == 'Q'; }

const char* snak_kind_name(SnakKind k) {
    switch (k) {
        case SnakKind::value: return "value";
        case SnakKind::somevalue: return "somevalue";
        case SnakKind::novalue: return "novalue";
    }
    return "?";
}

const char* rank_name(StatementRank r) {
    switch (r) {
        case StatementRank::normal: return "normal";
        case StatementRank::preferred: return "preferred";
        case StatementRank::deprecated: return "deprecated";
    }
    return "?";
}

double QuantityValue::amount_as_double() const {
    std::string_view s = amount;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw Error(errc::malformed_snak, "bad quantity amount: " + amount);
    return v;
}

std::string be64(std::uint64_t v) {
    std::string out(8, '\0');
    for (int i = 7; i >= 0; --i) {
        out[i] = static_cast<char>(v & 0xff);
        v >>= 8;
    }
    return out;
}

std::uint64_t from_be64(std::string_view bytes) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8 && i < bytes.size(); ++i)
        v = (v << 8) | static_cast<std::uint8_t>(bytes[i]);
    return v;
}

std::string be64(NumericId id) { return be64(id.raw); }

std::string pv_key(NumericId property, NumericId value) {
    return be64(property.raw) + be64(value.raw);
}

std::string encode_double(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    return be64(bits);
}

double decode_double(std::string_view bytes) {
    std::uint64_t bits = from_be64(bytes);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

// ---------------------------------------------------------------------------
// Posting codec
// ---------------------------------------------------------------------------

std::string encode_posting(const PostingList& list) {
    std::string out;
    out.reserve(list.size() + list.size() / 4);
    std::uint64_t prev = 0;
    bool first = true;
    for (NumericId id : list) {
        if (first) {
            put_varint(out, id.raw);
            first = false;
        } else {
            if (id.raw <= prev)
                throw Error(errc::corrupt_posting, "posting input not strictly increasing");
            put_varint(out, id.raw - prev);
        }
        prev = id.raw;
    }
    return out;
}

PostingList decode_posting(std::string_view bytes) {
    PostingList out;
    if (bytes.empty()) return out;
    ByteReader r(bytes, errc::corrupt_posting);
    std::uint64_t cur = r.varint();
    out.push_back({cur});
    while (!r.done()) {
        std::uint64_t delta = r.varint();
        if (delta == 0) r.fail("zero delta");
        if (cur > UINT64_MAX - delta) r.fail("delta overflow");
        cur += delta;
        out.push_back({cur});
    }
    return out;
}

std::uint64_t posting_length(std::string_view bytes) {
    if (bytes.empty()) return 0;
    ByteReader r(bytes, errc::corrupt_posting);
    std::uint64_t n = 0;
    while (!r.done()) {
        r.varint();
        ++n;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Record codec
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint8_t kRecordVersion = 1;

// datavalue wire tags
enum : std::uint8_t {
    kEntityRef = 0,
    kString = 1,
    kExternalId = 2,
    kUrl = 3,
    kMonolingual = 4,
    kQuantity = 5,
    kTime = 6,
    kGlobe = 7,
    kOpaque = 8,
};

void put_opt_str(std::string& out, const std::optional<std::string>& s) {
    out.push_back(s ? 1 : 0);
    if (s) put_str(out, *s);
}

std::optional<std::string> get_opt_str(ByteReader& r) {
    if (r.u8() == 0) return std::nullopt;
    return std::string(r.str());
}

void put_f64(std::string& out, double v) { out += encode_double(v); }

double get_f64(ByteReader& r) { return decode_double(r.bytes(8)); }

void encode_datavalue(std::string& out, const DataValue& dv) {
    if (auto* e = std::get_if<EntityRefValue>(&dv)) {
        out.push_back(kEntityRef);
        put_str(out, e->id);
    } else if (auto* s = std::get_if<StringValue>(&dv)) {
        out.push_back(kString);
        put_str(out, s->value);
    } else if (auto* x = std::get_if<ExternalIdValue>(&dv)) {
        out.push_back(kExternalId);
        put_str(out, x->value);
    } else if (auto* u = std::get_if<UrlValue>(&dv)) {
        out.push_back(kUrl);
        put_str(out, u->value);
    } else if (auto* m = std::get_if<MonolingualTextValue>(&dv)) {
        out.push_back(kMonolingual);
        put_str(out, m->language);
        put_str(out, m->text);
    } else if (auto* q = std::get_if<QuantityValue>(&dv)) {
        out.push_back(kQuantity);
        put_str(out, q->amount);
        put_str(out, q->unit);
        put_opt_str(out, q->lower_bound);
        put_opt_str(out, q->upper_bound);
    } else if (auto* t = std::get_if<TimeValue>(&dv)) {
        out.push_back(kTime);
        put_str(out, t->timestamp);
        put_varint(out, static_cast<std::uint64_t>(t->precision));
        put_str(out, t->calendar);
    } else if (auto* g = std::get_if<GlobeCoordinateValue>(&dv)) {
        out.push_back(kGlobe);
        put_f64(out, g->latitude);
        put_f64(out, g->longitude);
        out.push_back(g->precision ? 1 : 0);
        if (g->precision) put_f64(out, *g->precision);
        put_str(out, g->globe);
    } else {
        const auto& o = std::get<OpaqueValue>(dv);
        out.push_back(kOpaque);
        put_str(out, o.type_tag);
        put_str(out, o.raw_json);
    }
}

DataValue decode_datavalue(ByteReader& r) {
    switch (r.u8()) {
        case kEntityRef: return EntityRefValue{std::string(r.str())};
        case kString: return StringValue{std::string(r.str())};
        case kExternalId: return ExternalIdValue{std::string(r.str())};
        case kUrl: return UrlValue{std::string(r.str())};
        case kMonolingual: {
            MonolingualTextValue m;
            m.language = r.str();
            m.text = r.str();
            return m;
        }
        case kQuantity: {
            QuantityValue q;
            q.amount = r.str();
            q.unit = r.str();
            q.lower_bound = get_opt_str(r);
            q.upper_bound = get_opt_str(r);
            return q;
        }
        case kTime: {
            TimeValue t;
            t.timestamp = r.str();
            auto prec = r.varint();
            if (prec > 14) r.fail("time precision out of range");
            t.precision = static_cast<int>(prec);
            t.calendar = r.str();
            return t;
        }
        case kGlobe: {
            GlobeCoordinateValue g;
            g.latitude = get_f64(r);
            g.longitude = get_f64(r);
            if (r.u8()) g.precision = get_f64(r);
            g.globe = r.str();
            return g;
        }
        case kOpaque: {
            OpaqueValue o;
            o.type_tag = r.str();
            o.raw_json = r.str();
            return o;
        }
        default: r.fail("unknown datavalue tag");
    }
}

void encode_snak(std::string& out, const Snak& s) {
    out.push_back(static_cast<char>(s.kind));
    put_str(out, s.property);
    if (s.kind == SnakKind::value) encode_datavalue(out, *s.datavalue);
}

Snak decode_snak(ByteReader& r) {
    Snak s;
    auto kind = r.u8();
    if (kind > 2) r.fail("bad snak kind");
    s.kind = static_cast<SnakKind>(kind);
    s.property = r.str();
    if (s.kind == SnakKind::value) s.datavalue = decode_datavalue(r);
    return s;
}

void encode_snak_map(std::string& out, const SnakMap& m) {
    put_varint(out, m.size());
    for (const auto& [prop, snaks] : m) {
        put_str(out, prop);
        put_varint(out, snaks.size());
        for (const Snak& s : snaks) encode_snak(out, s);
    }
}

SnakMap decode_snak_map(ByteReader& r) {
    SnakMap m;
    std::uint64_t nprops = r.varint();
    if (nprops > r.remaining()) r.fail("snak map count exceeds buffer");
    for (std::uint64_t i = 0; i < nprops; ++i) {
        std::string prop(r.str());
        std::uint64_t n = r.varint();
        if (n > r.remaining()) r.fail("snak count exceeds buffer");
        auto& vec = m[prop];
        vec.reserve(static_cast<std::size_t>(n));
        for (std::uint64_t j = 0; j < n; ++j) vec.push_back(decode_snak(r));
    }
    return m;
}

void encode_statement(std::string& out, const Statement& st) {
    encode_snak(out, st.mainsnak);
    out.push_back(static_cast<char>(st.rank));
    encode_snak_map(out, st.qualifiers);
    put_varint(out, st.references.size());
    for (const ReferenceGroup& g : st.references) {
        put_varint(out, g.snak_order.size());
        for (const std::string& prop : g.snak_order) {
            put_str(out, prop);
            auto it = g.snaks.find(prop);
            std::uint64_t n = it == g.snaks.end() ? 0 : it->second.size();
            put_varint(out, n);
            if (it != g.snaks.end())
                for (const Snak& s : it->second) encode_snak(out, s);
        }
    }
}

Statement decode_statement(ByteReader& r) {
    Statement st;
    st.mainsnak = decode_snak(r);
    auto rank = r.u8();
    if (rank > 2) r.fail("bad statement rank");
    st.rank = static_cast<StatementRank>(rank);
    st.qualifiers = decode_snak_map(r);
    std::uint64_t nrefs = r.varint();
    if (nrefs > r.remaining()) r.fail("reference count exceeds buffer");
    st.references.reserve(static_cast<std::size_t>(nrefs));
    for (std::uint64_t i = 0; i < nrefs; ++i) {
        ReferenceGroup g;
        std::uint64_t nprops = r.varint();
        if (nprops > r.remaining()) r.fail("reference snak count exceeds buffer");
        for (std::uint64_t j = 0; j < nprops; ++j) {
            std::string prop(r.str());
            g.snak_order.push_back(prop);
            std::uint64_t n = r.varint();
            if (n > r.remaining()) r.fail("snak count exceeds buffer");
            auto& vec = g.snaks[prop];
            for (std::uint64_t k = 0; k < n; ++k) vec.push_back(decode_snak(r));
        }
        if (g.snaks.size() != g.snak_order.size())
            r.fail("duplicate property in reference snak order");
        st.references.push_back(std::move(g));
    }
    return st;
}

void encode_string_map(std::string& out, const std::map<std::string, std::string>& m) {
    put_varint(out, m.size());
    for (const auto& [k, v] : m) {
        put_str(out, k);
        put_str(out, v);
    }
}

std::map<std::string, std::string> decode_string_map(ByteReader& r) {
    std::map<std::string, std::string> m;
    std::uint64_t n = r.varint();
    if (n > r.remaining()) r.fail("map count exceeds buffer");
    for (std::uint64_t i = 0; i < n; ++i) {
        std::string k(r.str());
        m[k] = std::string(r.str());
    }
    return m;
}

}  // namespace

std::string encode_record(const ItemRecord& record) {
    std::string out;
    out.push_back(static_cast<char>(kRecordVersion));
    put_str(out, record.id);
    encode_string_map(out, record.labels);
    encode_string_map(out, record.descriptions);
    put_varint(out, record.aliases.size());
    for (const auto& [lang, list] : record.aliases) {
        put_str(out, lang);
        put_varint(out, list.size());
        for (const std::string& a : list) put_str(out, a);
    }
    encode_string_map(out, record.sitelinks);
    put_varint(out, record.claims.size());
    for (const auto& [prop, statements] : record.claims) {
        put_str(out, prop);
        put_varint(out, statements.size());
        for (const Statement& st : statements) encode_statement(out, st);
    }
    return out;
}

ItemRecord decode_record(std::string_view bytes) {
    ByteReader r(bytes, errc::corrupt_record);
    if (r.u8() != kRecordVersion) r.fail("unknown record version");
    ItemRecord rec;
    rec.id = r.str();
    rec.labels = decode_string_map(r);
    rec.descriptions = decode_string_map(r);
    std::uint64_t nalias = r.varint();
    if (nalias > r.remaining()) r.fail("alias count exceeds buffer");
    for (std::uint64_t i = 0; i < nalias; ++i) {
        std::string lang(r.str());
        std::uint64_t n = r.varint();
        if (n > r.remaining()) r.fail("alias count exceeds buffer");
        auto& vec = rec.aliases[lang];
        vec.reserve(static_cast<std::size_t>(n));
        for (std::uint64_t j = 0; j < n; ++j) vec.emplace_back(r.str());
    }
    rec.sitelinks = decode_string_map(r);
    std::uint64_t nprops = r.varint();
    if (nprops > r.remaining()) r.fail("claim count exceeds buffer");
    for (std::uint64_t i = 0; i < nprops; ++i) {
        std::string prop(r.str());
        std::uint64_t n = r.varint();
        if (n > r.remaining()) r.fail("statement count exceeds buffer");
        auto& vec = rec.claims[prop];
        vec.reserve(static_cast<std::size_t>(n));
        for (std::uint64_t j = 0; j < n; ++j) vec.push_back(decode_statement(r));
    }
    if (!r.done()) r.fail("trailing bytes after record");
    return rec;
}

}  // namespace quarry
