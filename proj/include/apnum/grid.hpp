#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace apnum {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Uniform time grid. Point i is t_min + i*step, always computed
// multiplicatively: horizons up to 1e4 would otherwise accumulate visible
// drift under repeated addition.
class TimeGrid {
public:
    TimeGrid(double t_min, double t_max, double step);

    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    double step() const { return step_; }
    std::size_t n_points() const { return n_points_; }

    double point(std::size_t i) const { return t_min_ + static_cast<double>(i) * step_; }

    /// Last actual grid point; equals t_max when the span is a multiple of step.
    double last_point() const { return point(n_points_ - 1); }

    bool operator==(const TimeGrid& o) const {
        return t_min_ == o.t_min_ && t_max_ == o.t_max_ && step_ == o.step_;
    }

private:
    double t_min_, t_max_, step_;
    std::size_t n_points_;
};

TimeGrid make_grid(double t_min, double t_max, double step);

// ---------------------------------------------------------------------------
// Closed-form function specifications.
//
// An Expr is a scalar expression tree over time and (optionally) state
// coordinates. The primitive set is deliberately small: it is closed under
// the combinators needed for quasi-periodic forcings with integrable
// perturbations, and every node evaluates deterministically for every real t.

enum class ExprKind {
    Constant,  // a
    Sin,       // sin(a*t + b)
    Cos,       // cos(a*t + b)
    ExpAbs,    // exp(-a*|t|), a >= 0
    Rational,  // 1 / (1 + t^2)
    CoordU,    // current-state coordinate [index]
    CoordV,    // delayed-state coordinate [index]
    Sum,       // children summed
    Product,   // children multiplied
    Scale,     // a * child
    SinOf,     // sin(child)
    CosOf,     // cos(child)
    Shift,     // child evaluated at t - a
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    double a = 0.0;
    double b = 0.0;
    int index = 0;
    std::vector<ExprPtr> children;
};

/// Evaluation context: time plus optional state slots. Expressions that
/// reference a coordinate require the corresponding slot to be present.
struct EvalContext {
    double t = 0.0;
    std::span<const double> u{};
    std::span<const double> v{};
};

double eval_expr(const Expr& e, const EvalContext& ctx);

// Builders.
namespace fn {
ExprPtr constant(double c);
ExprPtr sin_wave(double omega, double phase = 0.0);
ExprPtr cos_wave(double omega, double phase = 0.0);
ExprPtr exp_abs(double rate);
ExprPtr rational();
ExprPtr coord_u(int index);
ExprPtr coord_v(int index);
ExprPtr sum(std::vector<ExprPtr> terms);
ExprPtr product(std::vector<ExprPtr> factors);
ExprPtr scale(double c, ExprPtr e);
ExprPtr sin_of(ExprPtr e);
ExprPtr cos_of(ExprPtr e);
ExprPtr shift(double c, ExprPtr e);
}  // namespace fn

// ---------------------------------------------------------------------------
// FnSpec: a vector-valued function of time (and optionally state), one Expr
// per output component. Immutable after construction.
class FnSpec {
public:
    FnSpec() = default;
    explicit FnSpec(ExprPtr scalar);
    explicit FnSpec(std::vector<ExprPtr> components);

    std::size_t dim() const { return components_.size(); }
    const std::vector<ExprPtr>& components() const { return components_; }

    /// True if any component references a state coordinate; such specs cannot
    /// be evaluated as pure functions of time.
    bool uses_state() const { return uses_state_; }

    void eval(double t, std::span<double> out) const;
    Vec operator()(double t) const;

    void eval_state(double t, std::span<const double> u, std::span<const double> v,
                    std::span<double> out) const;

    /// Angular frequencies of all sin/cos primitives reachable in the tree
    /// (signed pairs +-omega), used for quadrature step selection and
    /// frequency-resolution diagnostics. Frequencies generated indirectly by
    /// sinof/cosof combinators are not enumerated.
    std::vector<double> trig_frequencies() const;
    double max_trig_frequency() const;

    /// Canonical prefix-syntax serialization; parse(to_text()) reproduces the
    /// tree and to_text() of the result is byte-identical.
    std::string to_text() const;
    static FnSpec parse(const std::string& text);

private:
    std::vector<ExprPtr> components_;
    bool uses_state_ = false;
};

// ---------------------------------------------------------------------------
// SampledPath: values of a state-space path on a uniform grid plus an
// interpolation scheme for off-grid (delayed) evaluation. No extrapolation:
// evaluation outside the grid throws, callers extend the grid instead.

enum class InterpScheme { Linear, Cubic };

class SampledPath {
public:
    SampledPath(TimeGrid grid, std::size_t dim, std::vector<double> data,
                InterpScheme scheme = InterpScheme::Cubic);

    static SampledPath zeros(const TimeGrid& grid, std::size_t dim,
                             InterpScheme scheme = InterpScheme::Cubic);

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    InterpScheme scheme() const { return scheme_; }
    const std::vector<double>& data() const { return data_; }

    std::span<const double> at_index(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }

    /// Interpolated value; exact (the stored value) at grid points.
    /// Throws std::out_of_range outside [t_min, last_point].
    void eval_at(double t, std::span<double> out) const;
    Vec operator()(double t) const;

private:
    TimeGrid grid_;
    std::size_t dim_;
    std::vector<double> data_;
    InterpScheme scheme_;
};

FnSpec parse_fnspec(const std::string& text);
SampledPath sample_fnspec(const FnSpec& f, const TimeGrid& grid,
                          InterpScheme scheme = InterpScheme::Cubic);

// ---------------------------------------------------------------------------
// TimeFunction: the common evaluable interface the estimators consume.
// FnSpec-backed functions are total on R; path-backed ones carry a domain.
class TimeFunction {
public:
    virtual ~TimeFunction() = default;

    virtual std::size_t dim() const = 0;
    virtual void eval(double t, std::span<double> out) const = 0;

    /// nullopt means defined on all of R.
    virtual std::optional<std::pair<double, double>> domain() const { return std::nullopt; }

    virtual std::vector<double> trig_frequencies() const { return {}; }
    virtual double max_trig_frequency() const { return 0.0; }

    Vec operator()(double t) const;
};

class FnSpecFunction final : public TimeFunction {
public:
    explicit FnSpecFunction(FnSpec spec);
    std::size_t dim() const override { return spec_.dim(); }
    void eval(double t, std::span<double> out) const override { spec_.eval(t, out); }
    std::vector<double> trig_frequencies() const override { return spec_.trig_frequencies(); }
    double max_trig_frequency() const override { return spec_.max_trig_frequency(); }
    const FnSpec& spec() const { return spec_; }

private:
    FnSpec spec_;
};

/// Non-owning view of a SampledPath.
class PathFunction final : public TimeFunction {
public:
    explicit PathFunction(const SampledPath& path) : path_(&path) {}
    std::size_t dim() const override { return path_->dim(); }
    void eval(double t, std::span<double> out) const override { path_->eval_at(t, out); }
    std::optional<std::pair<double, double>> domain() const override {
        return std::make_pair(path_->grid().t_min(), path_->grid().last_point());
    }

private:
    const SampledPath* path_;
};

/// f(t + h), non-owning.
class ShiftedFunction final : public TimeFunction {
public:
    ShiftedFunction(const TimeFunction& f, double h) : f_(&f), h_(h) {}
    std::size_t dim() const override { return f_->dim(); }
    void eval(double t, std::span<double> out) const override { f_->eval(t + h_, out); }
    std::optional<std::pair<double, double>> domain() const override;
    std::vector<double> trig_frequencies() const override { return f_->trig_frequencies(); }
    double max_trig_frequency() const override { return f_->max_trig_frequency(); }

private:
    const TimeFunction* f_;
    double h_;
};

/// f(t + h1) - f(t + h2), non-owning. The workhorse behind translation
/// distances and the Bochner pairwise metric.
class TranslateDifference final : public TimeFunction {
public:
    TranslateDifference(const TimeFunction& f, double h1, double h2 = 0.0)
        : f_(&f), h1_(h1), h2_(h2) {}
    std::size_t dim() const override { return f_->dim(); }
    void eval(double t, std::span<double> out) const override;
    std::optional<std::pair<double, double>> domain() const override;
    std::vector<double> trig_frequencies() const override { return f_->trig_frequencies(); }
    double max_trig_frequency() const override { return f_->max_trig_frequency(); }

private:
    const TimeFunction* f_;
    double h1_, h2_;
};

}  // namespace apnum
