#pragma once

#include <stdexcept>

namespace gcsim {

/// Invalid argument to a mathematical operation (negative rate, bad chain spec).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Internal consistency violation. Indicates a simulator bug, never a model outcome.
class LogicError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Structurally unusable configuration discovered at run time (e.g. an isolated cell).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Out-of-range index into a topology or result table.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Filesystem-level failure while reading or writing artifacts.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gcsim
