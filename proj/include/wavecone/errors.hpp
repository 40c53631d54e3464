#pragma once

#include <stdexcept>
#include <string>

namespace wavecone {

/// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input: bad JSON, dimension mismatch, invalid spec fields.
struct validation_error : error {
    explicit validation_error(const std::string& msg) : error(msg) {}
};

/// A mathematical precondition does not hold (ellipticity, exponent range,
/// size budget). The input parsed fine but the operation is not defined for it.
struct precondition_error : error {
    explicit precondition_error(const std::string& msg) : error(msg) {}
};

/// An experiment hypothesis gate failed (cone violation, non-canceling
/// operator, kernel membership).
struct hypothesis_error : error {
    explicit hypothesis_error(const std::string& msg) : error(msg) {}
};

/// Fixed-point iteration diverged; carries the measured contraction factor.
struct divergence_error : precondition_error {
    double contraction;
    divergence_error(const std::string& msg, double c)
        : precondition_error(msg), contraction(c) {}
};

} // namespace wavecone
