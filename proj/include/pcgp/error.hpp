#pragma once

#include <stdexcept>
#include <string>

namespace pcgp {

// All library failures derive from Error so callers can catch one type.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenomeError : Error {
    using Error::Error;
};

// A node-count bound would be violated.
struct SizeError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct DecodeError : Error {
    using Error::Error;
};

// A PCGP-only operator was applied to a CGP genome.
struct UnsupportedOperator : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DatasetError : Error {
    using Error::Error;
};

struct EvolutionError : Error {
    using Error::Error;
};

} // namespace pcgp
