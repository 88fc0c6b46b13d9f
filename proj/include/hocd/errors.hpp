#pragma once

#include <stdexcept>
#include <string>

namespace hocd {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptySample : Error {
    explicit EmptySample(const std::string& msg) : Error(msg) {}
};

struct NonFiniteInput : Error {
    explicit NonFiniteInput(const std::string& msg) : Error(msg) {}
};

struct OrderOutOfRange : Error {
    explicit OrderOutOfRange(const std::string& msg) : Error(msg) {}
};

struct MissingCumulant : Error {
    explicit MissingCumulant(const std::string& msg) : Error(msg) {}
};

struct InvalidModel : Error {
    explicit InvalidModel(const std::string& msg) : Error(msg) {}
};

/// Estimator hit a degenerate configuration on this particular input
/// (typically a bootstrap replicate); callers may drop and retry rather
/// than abort.
struct EstimationDegeneracy : Error {
    explicit EstimationDegeneracy(const std::string& msg) : Error(msg) {}
};

/// Leading quadratic coefficient is (relatively) zero: the no-edge regime.
struct DegenerateQuadratic : EstimationDegeneracy {
    explicit DegenerateQuadratic(const std::string& msg) : EstimationDegeneracy(msg) {}
};

/// Discriminant significantly negative: the pair model does not fit.
struct ComplexRoots : EstimationDegeneracy {
    explicit ComplexRoots(const std::string& msg) : EstimationDegeneracy(msg) {}
};

struct DegenerateRoots : EstimationDegeneracy {
    explicit DegenerateRoots(const std::string& msg) : EstimationDegeneracy(msg) {}
};

struct DivisionNearZero : EstimationDegeneracy {
    explicit DivisionNearZero(const std::string& msg) : EstimationDegeneracy(msg) {}
};

struct NegativeUnderRoot : EstimationDegeneracy {
    explicit NegativeUnderRoot(const std::string& msg) : EstimationDegeneracy(msg) {}
};

struct TooManyFailedReplicates : Error {
    explicit TooManyFailedReplicates(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

} // namespace hocd
