// errors.hpp — exception hierarchy shared by every qtrans module

#pragma once

#include <stdexcept>
#include <string>

namespace qtrans {

// Base for every domain-level failure. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DegenerateDetuningError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class NoOddRatioSolution : public Error {
public:
    using Error::Error;
};

class NoGateSolution : public Error {
public:
    using Error::Error;
};

class RequiresRationalError : public Error {
public:
    using Error::Error;
};

class ResonantAtomError : public Error {
public:
    using Error::Error;
};

// Analytic formula used outside the configuration it was derived for.
class ScopeError : public Error {
public:
    using Error::Error;
};

class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double achieved_tail)
        : Error(what), achieved_tail_(achieved_tail) {}
    double achieved_tail() const noexcept { return achieved_tail_; }

private:
    double achieved_tail_;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

class NumericalInstabilityError : public Error {
public:
    using Error::Error;
};

// Two independent routes to the same quantity disagree.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

} // namespace qtrans

#include <vector>

namespace qtrans {

// Non-fatal findings (regime warnings, validity flags) collected by the caller.
struct Diagnostics {
    std::vector<std::string> warnings;
    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

} // namespace qtrans
