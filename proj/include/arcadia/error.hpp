#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace arcadia {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV cells, config files, scripts).
class DataError : public Error {
public:
    using Error::Error;
};

/// A graph operation referenced an unknown node or received an invalid edge list.
class GraphError : public Error {
public:
    using Error::Error;
};

/// A statistical model could not be fitted.
class StatError : public Error {
public:
    using Error::Error;
};

/// Design matrix without full column rank. Carries the columns found to be
/// linearly dependent on the others.
class RankDeficientError : public StatError {
public:
    RankDeficientError(const std::string& what, std::vector<std::string> dependent)
        : StatError(what), dependent_(std::move(dependent)) {}

    const std::vector<std::string>& dependent_columns() const noexcept { return dependent_; }

private:
    std::vector<std::string> dependent_;
};

/// Proposal could not be produced or failed validation.
class ProposerError : public Error {
public:
    using Error::Error;
};

/// Prompt template referenced a placeholder with no value.
class TemplateError : public Error {
public:
    TemplateError(const std::string& what, std::string placeholder)
        : Error(what), placeholder_(std::move(placeholder)) {}

    const std::string& placeholder() const noexcept { return placeholder_; }

private:
    std::string placeholder_;
};

/// Invalid run or hyper-parameter configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace arcadia
