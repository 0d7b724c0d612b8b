#pragma once

#include <stdexcept>
#include <string>

namespace steklov {

// Base class for every failure the library can signal.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Geometry construction produced (or would produce) a degenerate object.
class DegenerateGeometry : public Error {
    using Error::Error;
};

// A triangle area underflowed during assembly.
class DegenerateTriangle : public Error {
    using Error::Error;
};

// An attachment interval cannot be resolved on the base boundary.
class ResolutionMismatch : public Error {
    using Error::Error;
};

// Orientation flags conflict with the requested identification.
class OrientationError : public Error {
    using Error::Error;
};

// An edge of the complex borders more than two triangles.
class NonManifold : public Error {
    using Error::Error;
};

// A linear algebra kernel failed; the message carries diagnostics.
class SolverFailure : public Error {
    using Error::Error;
};

// One-dimensional eigenvalue solve did not converge.
class NoConvergence : public Error {
    using Error::Error;
};

// Bisection bracket for the mass-balancing parameter does not straddle the target.
class BracketFailure : public Error {
    using Error::Error;
};

// Thick-thin interface iteration exceeded its iteration cap.
class InterfaceMismatch : public Error {
    using Error::Error;
};

// Combined test function is undefined because |c1| is numerically zero.
class DegenerateC1 : public Error {
    using Error::Error;
};

// Quadrature grid too coarse or degenerate for the requested identity.
class QuadratureUnderflow : public Error {
    using Error::Error;
};

// Configuration file is malformed or references missing resources.
class ConfigError : public Error {
    using Error::Error;
};

}  // namespace steklov
