#pragma once

#include <stdexcept>
#include <string>

namespace pepa {

/// Invalid configuration; `field` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error("config error [" + field + "]: " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class EpisodeOverError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class LocationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A checked invariant did not hold (CLI exit code 4).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace pepa
