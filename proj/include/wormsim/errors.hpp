#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wormsim {

/// Argument outside the physical domain of a formula (r < b0, flux >= phi0/2, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A discretized flux sample could not be realized by a biased SQUID.
class SynthesisError : public std::runtime_error {
public:
    SynthesisError(std::size_t squid_index, const std::string& what)
        : std::runtime_error("SQUID " + std::to_string(squid_index) + ": " + what),
          index_(squid_index) {}

    [[nodiscard]] std::size_t squid_index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Time-machine argument (1 - b/r)(1 + g l F / c^2)^2 left [0, 1].
class RepresentabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solver state became non-finite.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(std::size_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// No detectable pulse in a probe series.
class MeasurementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration failed validation; `path` is the dotted field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace wormsim
