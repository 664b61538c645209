#pragma once

#include <stdexcept>
#include <string>

namespace spinfiber {

/// Base class for all domain errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix logarithm was requested for a matrix with an eigenvalue on the
/// closed negative real axis (outside the identity-component domain).
class BranchCutError : public Error {
public:
    using Error::Error;
};

/// A diagonal metric entry is zero (or would become zero).
class DegenerateMetricError : public Error {
public:
    using Error::Error;
};

/// A transformation matrix that must be invertible is singular.
class SingularTransformError : public Error {
public:
    using Error::Error;
};

/// A metric does not have the (+,-,-,-) sign pattern required here.
class SignatureError : public Error {
public:
    using Error::Error;
};

/// A matrix fails the isometry-generator identity for the given metric.
class NotAnIsometryGeneratorError : public Error {
public:
    using Error::Error;
};

/// A matrix fails the finite isometry condition for the given metric.
class NotAnIsometryError : public Error {
public:
    using Error::Error;
};

/// A tetrad frame matrix is singular at some sample point.
class SingularFrameError : public Error {
public:
    using Error::Error;
};

/// An integrated flow left the chart's bounding box.
class FlowEscapeError : public Error {
public:
    using Error::Error;
};

/// A base translation is not an integer multiple of the lattice spacing,
/// or a spacetime map does not take grid points to grid points.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// A finite-difference stencil cannot be formed (too few samples on an axis).
class StencilError : public Error {
public:
    using Error::Error;
};

/// A scale factor is nonpositive somewhere on the requested range.
class ScaleFactorError : public Error {
public:
    using Error::Error;
};

/// Two fields that must share a grid do not.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

/// A lattice shift would move a nonzero sample off the grid.
class SupportEscapeError : public Error {
public:
    using Error::Error;
};

/// A stated operation precondition was violated.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed or type-mismatched JSON input.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace spinfiber
