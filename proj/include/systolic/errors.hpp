#pragma once

#include <stdexcept>
#include <string>

namespace systolic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Side lengths that cannot be realized by a nondegenerate flat triangle.
class InvalidGeometry : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

/// A modulus that is not prime, or a cocycle/matrix built on a different prime.
class InvalidModulus : public Error {
public:
    using Error::Error;
};

/// The cocycle is a coboundary, so no loop has nonzero holonomy.
class TrivialCocycle : public Error {
public:
    using Error::Error;
};

/// A radius that lies on (or too close to) a vertex value of a distance field.
class NonRegularValue : public Error {
public:
    NonRegularValue(const std::string& what, int vertex) : Error(what), vertex_(vertex) {}
    int vertex() const noexcept { return vertex_; }

private:
    int vertex_;
};

/// A path that does not close up or whose steps are not adjacent.
class InvalidPath : public Error {
public:
    using Error::Error;
};

class PreconditionViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SizeCapExceeded : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Too few regular radii below half the systole to sample a profile.
class DegenerateSampling : public Error {
public:
    using Error::Error;
};

}  // namespace systolic
