#pragma once

#include <stdexcept>
#include <string>

namespace esgport {

/// Base of every error raised by the toolkit. `kind()` is the stable,
/// machine-readable name written into CLI error reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

    /// Input errors map to exit code 2, everything else to exit code 1.
    virtual bool is_input_error() const noexcept { return false; }

private:
    std::string kind_;
};

class InputError : public Error {
public:
    using Error::Error;
    bool is_input_error() const noexcept override { return true; }
};

class ParseError : public InputError {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& msg)
        : InputError("ParseError", path + ":" + std::to_string(line) + ": " + msg),
          path_(path), line_(line) {}
    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

#define ESGPORT_DEFINE_ERROR(Name, Base)                                      \
    class Name : public Base {                                                 \
    public:                                                                    \
        explicit Name(const std::string& what) : Base(#Name, what) {}          \
    };

ESGPORT_DEFINE_ERROR(FileError, InputError)
ESGPORT_DEFINE_ERROR(CalendarError, InputError)
ESGPORT_DEFINE_ERROR(DomainError, InputError)
ESGPORT_DEFINE_ERROR(NoScoreError, InputError)
ESGPORT_DEFINE_ERROR(ShapeError, InputError)
ESGPORT_DEFINE_ERROR(AlignmentError, InputError)
ESGPORT_DEFINE_ERROR(WindowTooShort, InputError)
ESGPORT_DEFINE_ERROR(SampleTooSmall, InputError)
ESGPORT_DEFINE_ERROR(ConfigError, InputError)

ESGPORT_DEFINE_ERROR(FitError, Error)
ESGPORT_DEFINE_ERROR(SingularError, Error)
ESGPORT_DEFINE_ERROR(ZeroDenominator, Error)
ESGPORT_DEFINE_ERROR(OutOfBounds, Error)
ESGPORT_DEFINE_ERROR(NoConvergence, Error)
ESGPORT_DEFINE_ERROR(NoTangent, Error)
ESGPORT_DEFINE_ERROR(CholeskyError, Error)
ESGPORT_DEFINE_ERROR(SingularSystem, Error)

#undef ESGPORT_DEFINE_ERROR

/// Raised when the spot lies outside the convex hull of discounted terminal
/// prices, so no strictly positive martingale measure exists.
class InfeasibleMartingale : public Error {
public:
    InfeasibleMartingale(double spot, double lo, double hi)
        : Error("InfeasibleMartingale",
                "spot " + std::to_string(spot) + " outside discounted price hull [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "]"),
          spot_(spot), lo_(lo), hi_(hi) {}
    double spot() const noexcept { return spot_; }
    double hull_min() const noexcept { return lo_; }
    double hull_max() const noexcept { return hi_; }

private:
    double spot_, lo_, hi_;
};

}  // namespace esgport
