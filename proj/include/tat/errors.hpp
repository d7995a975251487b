#pragma once

#include <stdexcept>
#include <string>

namespace tat {

// Error categories. Everything derives from std::exception so callers that
// only care about the message can catch std::exception.

class InvalidArgument : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class DegeneratePolynomial : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

class ShapeMismatch : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

class EmptyRegion : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what)
{
    if (!cond)
        throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace tat
