#pragma once

#include <stdexcept>
#include <string>

namespace osk {

// Base for every error the engine raises on bad input or unsupported requests.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A truth value that does not belong to the carrier of the algebra in use.
class CarrierError : public Error {
public:
    using Error::Error;
};

// Tensor, matrix or signature dimensions that do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Operation that needs a structural property the algebra lacks (e.g. divisibility).
class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

// A name (sign, component, vertex, set, diagram...) that cannot be resolved.
class ReferenceError : public Error {
public:
    using Error::Error;
};

// Precondition failures with a concrete witness in the message.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Evaluation would exceed the configured cell budget.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Malformed specification files.
class InputError : public Error {
public:
    using Error::Error;
};

// Semantic clash while merging semiotics; message names the offending sign or label.
class IntegrationError : public Error {
public:
    using Error::Error;
};

}  // namespace osk
