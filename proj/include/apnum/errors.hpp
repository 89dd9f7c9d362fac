#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace apnum {

/// Raised when one of the structural hypotheses fails (unstable spectrum,
/// contraction constant >= 1). Carries the offending value.
class hypothesis_violation : public std::runtime_error {
public:
    hypothesis_violation(const std::string& what, double value)
        : std::runtime_error(what), value_(value) {}

    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Raised when a fixed-point iteration hits its iteration cap. The residual
/// trace is preserved so callers can still report it.
class non_convergence : public std::runtime_error {
public:
    non_convergence(const std::string& what, std::vector<double> residuals)
        : std::runtime_error(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Text parse failure with the byte offset of the offending token.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t offset)
        : std::runtime_error(what), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace apnum
