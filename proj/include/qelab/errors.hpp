#pragma once

#include <stdexcept>
#include <string>

namespace qelab {

// Precondition violations use std::invalid_argument / std::out_of_range.
// The classes below cover failures that depend on numerics or budgets.

class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyWindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qelab
