#pragma once

#include <stdexcept>
#include <string>

namespace crt {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class SizeMismatch : public Error {
public:
    using Error::Error;
};

class ForestConstraintViolated : public Error {
public:
    using Error::Error;
};

class OrderViolation : public Error {
public:
    using Error::Error;
};

class MalformedPath : public Error {
public:
    using Error::Error;
};

class CapExceeded : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class NotAGood : public Error {
public:
    using Error::Error;
};

class NotInClass : public Error {
public:
    using Error::Error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

}  // namespace crt
