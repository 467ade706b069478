#pragma once

#include <stdexcept>
#include <string>

namespace galvomosaic {

/// Invalid or inconsistent configuration; carries the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Least-squares slope undefined because the predictor samples are constant.
class DegenerateFitError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace galvomosaic
