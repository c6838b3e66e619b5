#pragma once

#include <stdexcept>
#include <string>

namespace alcore {

// Base class for everything thrown by this library.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated precondition or invalid user-supplied value (bad flag, bad
// config entry, budget larger than the pool, ...).  CLI exit code 2.
struct argument_error : error {
    explicit argument_error(const std::string& msg) : error(msg) {}
};

// File could not be opened, read or written.  CLI exit code 3.
struct io_error : error {
    explicit io_error(const std::string& msg) : error(msg) {}
};

// File exists but its content is malformed (ragged CSV row, non-numeric
// token, negative label, ...).  CLI exit code 3.
struct format_error : error {
    explicit format_error(const std::string& msg) : error(msg) {}
};

// An internal invariant did not hold.  CLI exit code 4.
struct internal_error : error {
    explicit internal_error(const std::string& msg) : error(msg) {}
};

}  // namespace alcore
