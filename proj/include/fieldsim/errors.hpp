#pragma once

#include <stdexcept>
#include <string>

namespace fieldsim {

// Base for every error raised by the library. The CLI maps these to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

// Target lies outside the positioner's patrol annulus.
class OutOfReach : public Error {
public:
    using Error::Error;
};

class InvalidSampleCount : public Error {
public:
    using Error::Error;
};

// Cover area is zero while a conflict or collision area is not.
class DegenerateCover : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class ZeroVariance : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

}  // namespace fieldsim
