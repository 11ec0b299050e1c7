#pragma once

#include <stdexcept>
#include <string>

namespace bilevel {

// Root of the library's error hierarchy. Solver outcomes that are data
// (infeasible LPs, timeouts) travel in result statuses, not exceptions;
// exceptions are reserved for contract violations and resource guards.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

class NotDiagonal : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DimensionTooLarge : public Error {
public:
    using Error::Error;
};

class SearchRegionOverflow : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

class RNotRepresentable : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class MismatchedManifests : public Error {
public:
    using Error::Error;
};

}  // namespace bilevel
