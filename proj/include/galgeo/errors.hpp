#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace galgeo {

using u32 = std::uint32_t;
using u64 = std::uint64_t;

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or misuse of a precondition (mixed fields, zero divisor, ...).
class argument_error : public error {
public:
    using error::error;
};

// A configured resource cap was exceeded. Carries the cap that tripped.
class bound_error : public error {
public:
    bound_error(const std::string& what, std::uint64_t limit, std::uint64_t requested)
        : error(what + " (limit " + std::to_string(limit) + ", requested " +
                std::to_string(requested) + ")"),
          limit(limit),
          requested(requested) {}

    std::uint64_t limit;
    std::uint64_t requested;
};

// Malformed input file or serialized record.
class format_error : public error {
public:
    using error::error;
};

// A condition that indicates a bug rather than bad input.
class internal_error : public error {
public:
    using error::error;
};

}  // namespace galgeo
