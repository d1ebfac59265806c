#pragma once

#include <stdexcept>
#include <string>

namespace riverlv {

// Bad user input: parameters, expressions, resolutions. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Grid too coarse for the drift; carries the smallest admissible cell count.
class PecletError : public ConfigError {
public:
    PecletError(const std::string& what, int min_cells)
        : ConfigError(what), min_cells_(min_cells) {}
    int min_cells() const { return min_cells_; }

private:
    int min_cells_;
};

// A solve that broke down (NaN, singular pivot, iteration cap). Exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sweep produced a result that contradicts the stability classification. Exit code 4.
class AnomalyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace riverlv
