#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "quarry/errors.hpp"

namespace quarry {

// Variable-length unsigned integers: 7 data bits per byte, low group first,
// high bit set on every byte except the last.
inline void put_varint(std::string& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7f) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

// Bounds-checked reader over a byte range. Throws Error with the given code
// on any overrun or malformed varint, so corrupt input never crashes.
class ByteReader {
public:
    ByteReader(std::string_view data, const char* error_code)
        : p_(data.data()), end_(data.data() + data.size()), code_(error_code) {}

    bool done() const { return p_ == end_; }
    std::size_t remaining() const { return static_cast<std::size_t>(end_ - p_); }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(*p_++);
    }

    std::uint64_t varint() {
        std::uint64_t v = 0;
        int shift = 0;
        while (true) {
            if (p_ == end_) fail("truncated varint");
            auto byte = static_cast<std::uint8_t>(*p_++);
            if (shift == 63 && (byte & 0x7e)) fail("varint overflow");
            if (shift > 63) fail("varint overflow");
            v |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
            if (!(byte & 0x80)) return v;
            shift += 7;
        }
    }

    std::string_view bytes(std::size_t n) {
        need(n);
        std::string_view out(p_, n);
        p_ += n;
        return out;
    }

    std::string_view str() {
        std::uint64_t n = varint();
        if (n > remaining()) fail("string length exceeds buffer");
        return bytes(static_cast<std::size_t>(n));
    }

    [[noreturn]] void fail(const std::string& why) const { throw Error(code_, why); }

private:
    void need(std::size_t n) const {
        if (remaining() < n) fail("unexpected end of input");
    }

    const char* p_;
    const char* end_;
    const char* code_;
};

inline void put_str(std::string& out, std::string_view s) {
    put_varint(out, s.size());
    out.append(s);
}

}  // namespace quarry
