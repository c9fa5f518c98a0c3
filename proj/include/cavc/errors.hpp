#pragma once

#include <stdexcept>
#include <string>

namespace cavc {

// Invalid models, dimension mismatches, malformed files. CLI exit code 2.
class ModelError : public std::invalid_argument {
  public:
    explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

// Optimizer failed to converge within its iteration budget. CLI exit code 3.
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Enumeration size guard tripped. CLI exit code 3.
class BudgetError : public std::runtime_error {
  public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cavc
