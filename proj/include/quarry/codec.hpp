#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "quarry/types.hpp"

namespace quarry {

// 8-byte big-endian keys so lexicographic scan order equals numeric order.
std::string be64(std::uint64_t v);
std::uint64_t from_be64(std::string_view bytes);

std::string be64(NumericId id);
std::string pv_key(NumericId property, NumericId value);  // 16-byte inv_pv key

std::string encode_double(double v);
double decode_double(std::string_view bytes);

// Posting codec: first value, then successive deltas, each as a varint.
// Encoding rejects non-increasing input; decoding throws CorruptPosting on
// truncated varints or non-increasing content.
std::string encode_posting(const PostingList& list);
PostingList decode_posting(std::string_view bytes);
std::uint64_t posting_length(std::string_view bytes);  // count without materializing

// Record codec: compact deterministic binary encoding of ItemRecord.
// decode(encode(r)) == r for all valid records; equal records encode to
// identical bytes. Decoding malformed bytes throws CorruptRecord.
std::string encode_record(const ItemRecord& record);
ItemRecord decode_record(std::string_view bytes);

}  // namespace quarry
