#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scamhunt {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (JSON, CSV, config). Carries the 1-based line when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input missing a required key or violating a field invariant.
class SchemaError : public Error {
public:
    SchemaError(std::string key, const std::string& what)
        : Error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Replay mode asked for something the fixture set does not contain.
class MissingFixtureError : public Error {
public:
    using Error::Error;
};

/// Prices were requested for (chain, date) pairs the series does not cover.
class MissingPriceError : public Error {
public:
    explicit MissingPriceError(std::vector<std::string> dates);
    const std::vector<std::string>& dates() const noexcept { return dates_; }

private:
    std::vector<std::string> dates_;
};

}  // namespace scamhunt
