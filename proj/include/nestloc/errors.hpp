#ifndef NESTLOC_ERRORS_HPP
#define NESTLOC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nestloc
{

// Base of every error raised by the library. The name() tag is what the
// harness echoes as a diagnostic.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
    virtual const char *name() const noexcept
    {
        return "Error";
    }
    // Mathematical failures (identity violated, degenerate fixed locus) as
    // opposed to bad input.
    virtual bool is_mathematical() const noexcept
    {
        return false;
    }
};

class invalid_argument_error : public error
{
public:
    using error::error;
    const char *name() const noexcept override
    {
        return "InvalidArgument";
    }
};

class index_mismatch_error : public error
{
public:
    using error::error;
    const char *name() const noexcept override
    {
        return "IndexMismatch";
    }
};

class truncation_overflow_error : public error
{
public:
    using error::error;
    const char *name() const noexcept override
    {
        return "TruncationOverflow";
    }
};

class zero_weight_error : public error
{
public:
    using error::error;
    const char *name() const noexcept override
    {
        return "ZeroWeight";
    }
    bool is_mathematical() const noexcept override
    {
        return true;
    }
};

class non_generic_spec_error : public error
{
public:
    using error::error;
    const char *name() const noexcept override
    {
        return "NonGenericSpec";
    }
    bool is_mathematical() const noexcept override
    {
        return true;
    }
};

class degree_mismatch_error : public error
{
public:
    using error::error;
    const char *name() const noexcept override
    {
        return "DegreeMismatch";
    }
    bool is_mathematical() const noexcept override
    {
        return true;
    }
};

class spec_dependence_error : public error
{
public:
    using error::error;
    const char *name() const noexcept override
    {
        return "SpecDependence";
    }
    bool is_mathematical() const noexcept override
    {
        return true;
    }
};

class config_error : public error
{
public:
    using error::error;
    const char *name() const noexcept override
    {
        return "ConfigError";
    }
};

} // namespace nestloc

#endif
