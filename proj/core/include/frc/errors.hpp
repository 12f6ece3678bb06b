#pragma once

#include <stdexcept>
#include <string>

namespace frc {

// Domain/range violations of an operation's preconditions.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A series or quadrature could not reach the requested tolerance.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(std::string what, double estimate)
        : std::runtime_error(std::move(what)), error_estimate(estimate) {}
    double error_estimate;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Fixed-point iteration failed to contract within the sweep budget.
class ContractionError : public std::runtime_error {
public:
    ContractionError(std::string what, double update)
        : std::runtime_error(std::move(what)), last_update_norm(update) {}
    double last_update_norm;
};

// The a-priori estimate cannot absorb the nonlocal term.
class BoundUnavailableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Problem data violates one of the standing growth/Lipschitz hypotheses.
// `clause` names the violated clause, e.g. "H1.3".
class HypothesisError : public std::invalid_argument {
public:
    HypothesisError(std::string clause_, const std::string& what)
        : std::invalid_argument(what), clause(std::move(clause_)) {}
    std::string clause;
};

// Malformed problem file.  `field` is the JSON path of the offending entry.
class SchemaError : public std::invalid_argument {
public:
    SchemaError(std::string field_, const std::string& what)
        : std::invalid_argument(what), field(std::move(field_)) {}
    std::string field;
};

} // namespace frc
