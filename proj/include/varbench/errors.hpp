#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace varbench {

// Precondition violations on caller-supplied data.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidSplit : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class InvalidState : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class AlignmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input files that do not match their documented schema.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OptimizationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Model estimation or filtering could not produce a usable result.
/// Carries the best parameters seen so far (model-specific order) and the
/// objective value at that point, when one exists.
class FitFailure : public std::runtime_error {
public:
    explicit FitFailure(const std::string& what, std::vector<double> best_point = {},
                        double best_value = 0.0)
        : std::runtime_error(what), best_point_(std::move(best_point)), best_value_(best_value) {}

    const std::vector<double>& best_point() const noexcept { return best_point_; }
    double best_value() const noexcept { return best_value_; }

private:
    std::vector<double> best_point_;
    double best_value_;
};

}  // namespace varbench
