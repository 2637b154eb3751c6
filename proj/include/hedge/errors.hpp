#pragma once

#include <stdexcept>
#include <string>

namespace hedge
{

/// Bad input data or parameters (malformed grids, measures, configs).
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerically degenerate instance, e.g. a singular KKT system.
class NumericalFailure : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace hedge
