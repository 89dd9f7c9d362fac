#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>

namespace apnum {

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Compensated (Kahan) accumulator for long quadrature sums.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline double sqr(double x) { return x * x; }

}  // namespace apnum
