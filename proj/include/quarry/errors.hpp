#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace quarry {

// All operational failures carry a stable machine-readable code (the CLI
// prints it, the HTTP service maps it to a status).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* unreadable_source = "UnreadableSource";
inline constexpr const char* malformed_framing = "MalformedFraming";
inline constexpr const char* malformed_snak = "MalformedSnak";
inline constexpr const char* incomplete_build = "IncompleteBuild";
inline constexpr const char* already_built = "AlreadyBuilt";
inline constexpr const char* lock_held = "LockHeld";
inline constexpr const char* read_only = "ReadOnly";
inline constexpr const char* table_unknown = "TableUnknown";
inline constexpr const char* corrupt_record = "CorruptRecord";
inline constexpr const char* corrupt_posting = "CorruptPosting";
inline constexpr const char* unknown_entity = "UnknownEntity";
inline constexpr const char* empty_query = "EmptyQuery";
inline constexpr const char* negative_only_query = "NegativeOnlyQuery";
inline constexpr const char* bad_syntax = "BadSyntax";
inline constexpr const char* empty_graph = "EmptyGraph";
inline constexpr const char* pagerank_absent = "PagerankAbsent";
inline constexpr const char* strict_parse_failure = "StrictParseFailure";
inline constexpr const char* io = "IoError";
}  // namespace errc

}  // namespace quarry
