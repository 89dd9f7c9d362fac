#include "apnum/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "apnum/errors.hpp"
#include "apnum/util.hpp"

namespace apnum {

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid::TimeGrid(double t_min, double t_max, double step)
    : t_min_(t_min), t_max_(t_max), step_(step) {
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument("TimeGrid: step must be positive and finite");
    if (!(t_max > t_min) || !std::isfinite(t_min) || !std::isfinite(t_max))
        throw std::invalid_argument("TimeGrid: need finite t_max > t_min");
    // Small forward tolerance so spans that are exact multiples of step up to
    // rounding get the intended count.
    double ratio = (t_max - t_min) / step;
    n_points_ = static_cast<std::size_t>(std::floor(ratio + 1e-9)) + 1;
}

TimeGrid make_grid(double t_min, double t_max, double step) {
    return TimeGrid(t_min, t_max, step);
}

// ---------------------------------------------------------------------------
// Expr evaluation

double eval_expr(const Expr& e, const EvalContext& ctx) {
    switch (e.kind) {
        case ExprKind::Constant:
            return e.a;
        case ExprKind::Sin:
            return std::sin(e.a * ctx.t + e.b);
        case ExprKind::Cos:
            return std::cos(e.a * ctx.t + e.b);
        case ExprKind::ExpAbs:
            return std::exp(-e.a * std::fabs(ctx.t));
        case ExprKind::Rational:
            return 1.0 / (1.0 + ctx.t * ctx.t);
        case ExprKind::CoordU:
            if (static_cast<std::size_t>(e.index) >= ctx.u.size())
                throw std::invalid_argument(
                    "Expr: state coordinate u referenced outside a state context");
            return ctx.u[static_cast<std::size_t>(e.index)];
        case ExprKind::CoordV:
            if (static_cast<std::size_t>(e.index) >= ctx.v.size())
                throw std::invalid_argument(
                    "Expr: state coordinate v referenced outside a state context");
            return ctx.v[static_cast<std::size_t>(e.index)];
        case ExprKind::Sum: {
            double s = 0.0;
            for (const auto& c : e.children) s += eval_expr(*c, ctx);
            return s;
        }
        case ExprKind::Product: {
            double p = 1.0;
            for (const auto& c : e.children) p *= eval_expr(*c, ctx);
            return p;
        }
        case ExprKind::Scale:
            return e.a * eval_expr(*e.children[0], ctx);
        case ExprKind::SinOf:
            return std::sin(eval_expr(*e.children[0], ctx));
        case ExprKind::CosOf:
            return std::cos(eval_expr(*e.children[0], ctx));
        case ExprKind::Shift: {
            EvalContext shifted{ctx.t - e.a, ctx.u, ctx.v};
            return eval_expr(*e.children[0], shifted);
        }
    }
    throw std::logic_error("Expr: unknown node kind");
}

namespace fn {

namespace {
ExprPtr node(ExprKind k, double a = 0.0, double b = 0.0, int index = 0,
             std::vector<ExprPtr> children = {}) {
    for (const auto& c : children)
        if (!c) throw std::invalid_argument("Expr: null child");
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->a = a;
    e->b = b;
    e->index = index;
    e->children = std::move(children);
    return e;
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string("Expr: non-finite ") + what);
}
}  // namespace

ExprPtr constant(double c) {
    require_finite(c, "constant");
    return node(ExprKind::Constant, c);
}
ExprPtr sin_wave(double omega, double phase) {
    require_finite(omega, "frequency");
    require_finite(phase, "phase");
    return node(ExprKind::Sin, omega, phase);
}
ExprPtr cos_wave(double omega, double phase) {
    require_finite(omega, "frequency");
    require_finite(phase, "phase");
    return node(ExprKind::Cos, omega, phase);
}
ExprPtr exp_abs(double rate) {
    require_finite(rate, "decay rate");
    if (rate < 0.0) throw std::invalid_argument("Expr: exp_abs rate must be >= 0");
    return node(ExprKind::ExpAbs, rate);
}
ExprPtr rational() { return node(ExprKind::Rational); }
ExprPtr coord_u(int index) {
    if (index < 0) throw std::invalid_argument("Expr: negative coordinate index");
    return node(ExprKind::CoordU, 0, 0, index);
}
ExprPtr coord_v(int index) {
    if (index < 0) throw std::invalid_argument("Expr: negative coordinate index");
    return node(ExprKind::CoordV, 0, 0, index);
}
ExprPtr sum(std::vector<ExprPtr> terms) {
    if (terms.empty()) throw std::invalid_argument("Expr: empty sum");
    return node(ExprKind::Sum, 0, 0, 0, std::move(terms));
}
ExprPtr product(std::vector<ExprPtr> factors) {
    if (factors.empty()) throw std::invalid_argument("Expr: empty product");
    return node(ExprKind::Product, 0, 0, 0, std::move(factors));
}
ExprPtr scale(double c, ExprPtr e) {
    require_finite(c, "scale factor");
    return node(ExprKind::Scale, c, 0, 0, {std::move(e)});
}
ExprPtr sin_of(ExprPtr e) { return node(ExprKind::SinOf, 0, 0, 0, {std::move(e)}); }
ExprPtr cos_of(ExprPtr e) { return node(ExprKind::CosOf, 0, 0, 0, {std::move(e)}); }
ExprPtr shift(double c, ExprPtr e) {
    require_finite(c, "shift amount");
    return node(ExprKind::Shift, c, 0, 0, {std::move(e)});
}

}  // namespace fn

// ---------------------------------------------------------------------------
// FnSpec

namespace {

bool expr_uses_state(const Expr& e) {
    if (e.kind == ExprKind::CoordU || e.kind == ExprKind::CoordV) return true;
    for (const auto& c : e.children)
        if (expr_uses_state(*c)) return true;
    return false;
}

void collect_frequencies(const Expr& e, std::vector<double>& out) {
    if (e.kind == ExprKind::Sin || e.kind == ExprKind::Cos) {
        out.push_back(e.a);
        out.push_back(-e.a);
    }
    for (const auto& c : e.children) collect_frequencies(*c, out);
}

}  // namespace

FnSpec::FnSpec(ExprPtr scalar) : FnSpec(std::vector<ExprPtr>{std::move(scalar)}) {}

FnSpec::FnSpec(std::vector<ExprPtr> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("FnSpec: no components");
    for (const auto& c : components_) {
        if (!c) throw std::invalid_argument("FnSpec: null component");
        if (expr_uses_state(*c)) uses_state_ = true;
    }
}

void FnSpec::eval(double t, std::span<double> out) const {
    if (out.size() != dim()) throw std::invalid_argument("FnSpec::eval: output size mismatch");
    EvalContext ctx{t, {}, {}};
    for (std::size_t i = 0; i < components_.size(); ++i)
        out[i] = eval_expr(*components_[i], ctx);
}

Vec FnSpec::operator()(double t) const {
    Vec out(dim());
    eval(t, out);
    return out;
}

void FnSpec::eval_state(double t, std::span<const double> u, std::span<const double> v,
                        std::span<double> out) const {
    if (out.size() != dim()) throw std::invalid_argument("FnSpec::eval_state: output size mismatch");
    EvalContext ctx{t, u, v};
    for (std::size_t i = 0; i < components_.size(); ++i)
        out[i] = eval_expr(*components_[i], ctx);
}

std::vector<double> FnSpec::trig_frequencies() const {
    std::vector<double> freqs;
    for (const auto& c : components_) collect_frequencies(*c, freqs);
    std::sort(freqs.begin(), freqs.end());
    freqs.erase(std::unique(freqs.begin(), freqs.end()), freqs.end());
    return freqs;
}

double FnSpec::max_trig_frequency() const {
    double m = 0.0;
    for (double w : trig_frequencies()) m = std::max(m, std::fabs(w));
    return m;
}

// ---------------------------------------------------------------------------
// FnSpec text form. Prefix syntax, canonical printing via shortest
// round-tripping decimals. Grammar (EBNF) is documented in the README.

namespace {

void print_expr(const Expr& e, std::string& out) {
    switch (e.kind) {
        case ExprKind::Constant:
            out += format_double(e.a);
            return;
        case ExprKind::Sin:
            out += "(sin " + format_double(e.a) + " " + format_double(e.b) + ")";
            return;
        case ExprKind::Cos:
            out += "(cos " + format_double(e.a) + " " + format_double(e.b) + ")";
            return;
        case ExprKind::ExpAbs:
            out += "(expabs " + format_double(e.a) + ")";
            return;
        case ExprKind::Rational:
            out += "(rational)";
            return;
        case ExprKind::CoordU:
            out += "(u " + std::to_string(e.index) + ")";
            return;
        case ExprKind::CoordV:
            out += "(v " + std::to_string(e.index) + ")";
            return;
        case ExprKind::Sum:
        case ExprKind::Product:
            out += e.kind == ExprKind::Sum ? "(sum" : "(prod";
            for (const auto& c : e.children) {
                out += ' ';
                print_expr(*c, out);
            }
            out += ')';
            return;
        case ExprKind::Scale:
            out += "(scale " + format_double(e.a) + " ";
            print_expr(*e.children[0], out);
            out += ')';
            return;
        case ExprKind::SinOf:
        case ExprKind::CosOf:
            out += e.kind == ExprKind::SinOf ? "(sinof " : "(cosof ";
            print_expr(*e.children[0], out);
            out += ')';
            return;
        case ExprKind::Shift:
            out += "(shift " + format_double(e.a) + " ";
            print_expr(*e.children[0], out);
            out += ')';
            return;
    }
}

class FnSpecParser {
public:
    explicit FnSpecParser(const std::string& text) : text_(text) {}

    FnSpec parse() {
        skip_ws();
        std::vector<ExprPtr> components;
        if (peek() == '(' && keyword_ahead("vec")) {
            expect('(');
            token();  // consume "vec"
            while (true) {
                skip_ws();
                if (peek() == ')') break;
                components.push_back(parse_expr());
            }
            expect(')');
        } else {
            components.push_back(parse_expr());
        }
        skip_ws();
        if (pos_ != text_.size())
            fail("trailing input after expression");
        return FnSpec(std::move(components));
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error("FnSpec parse error at offset " + std::to_string(pos_) + ": " + msg,
                          pos_);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool keyword_ahead(const std::string& kw) const {
        std::size_t p = pos_ + 1;  // past '('
        while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        return text_.compare(p, kw.size(), kw) == 0 &&
               (p + kw.size() == text_.size() ||
                !std::isalnum(static_cast<unsigned char>(text_[p + kw.size()])));
    }

    std::string token() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')')
            ++pos_;
        if (pos_ == start) fail("expected a token");
        return text_.substr(start, pos_ - start);
    }

    double number() {
        skip_ws();
        std::size_t here = pos_;
        std::string tok = token();
        const char* begin = tok.c_str();
        char* end = nullptr;
        double value = std::strtod(begin, &end);
        if (end != begin + tok.size()) {
            pos_ = here;
            fail("expected a number, got '" + tok + "'");
        }
        return value;
    }

    int integer() {
        skip_ws();
        std::size_t here = pos_;
        std::string tok = token();
        try {
            std::size_t used = 0;
            int value = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument("");
            return value;
        } catch (const std::exception&) {
            pos_ = here;
            fail("expected an integer, got '" + tok + "'");
        }
    }

    ExprPtr parse_expr() {
        skip_ws();
        if (peek() != '(') {
            return fn::constant(number());
        }
        std::size_t open_at = pos_;
        expect('(');
        std::string op = token();
        ExprPtr result;
        try {
            if (op == "const") {
                result = fn::constant(number());
            } else if (op == "sin") {
                double w = number(), p = number();
                result = fn::sin_wave(w, p);
            } else if (op == "cos") {
                double w = number(), p = number();
                result = fn::cos_wave(w, p);
            } else if (op == "expabs") {
                result = fn::exp_abs(number());
            } else if (op == "rational") {
                result = fn::rational();
            } else if (op == "u") {
                result = fn::coord_u(integer());
            } else if (op == "v") {
                result = fn::coord_v(integer());
            } else if (op == "sum" || op == "prod") {
                std::vector<ExprPtr> children;
                while (true) {
                    skip_ws();
                    if (peek() == ')' || peek() == '\0') break;
                    children.push_back(parse_expr());
                }
                result = op == "sum" ? fn::sum(std::move(children))
                                     : fn::product(std::move(children));
            } else if (op == "scale") {
                double c = number();
                result = fn::scale(c, parse_expr());
            } else if (op == "sinof") {
                result = fn::sin_of(parse_expr());
            } else if (op == "cosof") {
                result = fn::cos_of(parse_expr());
            } else if (op == "shift") {
                double c = number();
                result = fn::shift(c, parse_expr());
            } else {
                pos_ = open_at;
                fail("unknown operator '" + op + "'");
            }
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        expect(')');
        return result;
    }
};

}  // namespace

std::string FnSpec::to_text() const {
    std::string out;
    if (dim() == 1) {
        print_expr(*components_[0], out);
    } else {
        out += "(vec";
        for (const auto& c : components_) {
            out += ' ';
            print_expr(*c, out);
        }
        out += ')';
    }
    return out;
}

FnSpec FnSpec::parse(const std::string& text) { return FnSpecParser(text).parse(); }

FnSpec parse_fnspec(const std::string& text) { return FnSpec::parse(text); }

// ---------------------------------------------------------------------------
// SampledPath

SampledPath::SampledPath(TimeGrid grid, std::size_t dim, std::vector<double> data,
                         InterpScheme scheme)
    : grid_(grid), dim_(dim), data_(std::move(data)), scheme_(scheme) {
    if (dim_ == 0) throw std::invalid_argument("SampledPath: dimension must be >= 1");
    if (data_.size() != grid_.n_points() * dim_)
        throw std::invalid_argument("SampledPath: data size does not match grid x dim");
    for (double x : data_)
        if (!std::isfinite(x)) throw std::invalid_argument("SampledPath: non-finite sample");
}

SampledPath SampledPath::zeros(const TimeGrid& grid, std::size_t dim, InterpScheme scheme) {
    return SampledPath(grid, dim, std::vector<double>(grid.n_points() * dim, 0.0), scheme);
}

void SampledPath::eval_at(double t, std::span<double> out) const {
    if (out.size() != dim_) throw std::invalid_argument("SampledPath::eval_at: bad output size");
    const double lo = grid_.t_min();
    const double hi = grid_.last_point();
    // Tolerate a couple of ulps at the boundary; delayed arguments routinely
    // land there after floating subtraction.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::fabs(lo), std::fabs(hi)});
    if (t < lo - slack || t > hi + slack) {
        std::ostringstream msg;
        msg << "SampledPath::eval_at: t=" << t << " outside [" << lo << ", " << hi
            << "]; extend the grid, extrapolation is not performed";
        throw std::out_of_range(msg.str());
    }
    double clamped = std::clamp(t, lo, hi);
    double u = (clamped - lo) / grid_.step();
    std::size_t n = grid_.n_points();

    std::size_t nearest = static_cast<std::size_t>(std::llround(u));
    if (nearest < n && grid_.point(nearest) == t) {
        auto row = at_index(nearest);
        std::copy(row.begin(), row.end(), out.begin());
        return;
    }

    // Off-grid evaluation needs a full stencil.
    std::size_t min_points = scheme_ == InterpScheme::Cubic ? 4 : 2;
    if (n < min_points)
        throw std::invalid_argument("SampledPath: grid too short for the interpolation scheme");

    if (scheme_ == InterpScheme::Linear) {
        std::size_t i0 = std::min(static_cast<std::size_t>(std::floor(u)), n - 2);
        double theta = u - static_cast<double>(i0);
        auto a = at_index(i0);
        auto b = at_index(i0 + 1);
        for (std::size_t k = 0; k < dim_; ++k) out[k] = (1.0 - theta) * a[k] + theta * b[k];
        return;
    }

    // Cubic: 4-point Lagrange on the nearest stencil, clamped at the ends.
    // Reproduces degree <= 3 exactly; O(h^4) error on smooth data.
    std::size_t i0 = std::min(static_cast<std::size_t>(std::floor(u)), n - 2);
    std::size_t s = i0 == 0 ? 0 : std::min(i0 - 1, n - 4);
    double x = u - static_cast<double>(s);
    double w0 = -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0;
    double w1 = x * (x - 2.0) * (x - 3.0) / 2.0;
    double w2 = -x * (x - 1.0) * (x - 3.0) / 2.0;
    double w3 = x * (x - 1.0) * (x - 2.0) / 6.0;
    auto p0 = at_index(s);
    auto p1 = at_index(s + 1);
    auto p2 = at_index(s + 2);
    auto p3 = at_index(s + 3);
    for (std::size_t k = 0; k < dim_; ++k)
        out[k] = w0 * p0[k] + w1 * p1[k] + w2 * p2[k] + w3 * p3[k];
}

Vec SampledPath::operator()(double t) const {
    Vec out(dim_);
    eval_at(t, out);
    return out;
}

SampledPath sample_fnspec(const FnSpec& f, const TimeGrid& grid, InterpScheme scheme) {
    if (f.uses_state())
        throw std::invalid_argument(
            "sample_fnspec: spec references state coordinates and is not a function of time");
    std::size_t d = f.dim();
    std::vector<double> data(grid.n_points() * d);
    for (std::size_t i = 0; i < grid.n_points(); ++i)
        f.eval(grid.point(i), {data.data() + i * d, d});
    return SampledPath(grid, d, std::move(data), scheme);
}

// ---------------------------------------------------------------------------
// TimeFunction adapters

Vec TimeFunction::operator()(double t) const {
    Vec out(dim());
    eval(t, out);
    return out;
}

FnSpecFunction::FnSpecFunction(FnSpec spec) : spec_(std::move(spec)) {
    if (spec_.uses_state())
        throw std::invalid_argument("FnSpecFunction: spec references state coordinates");
}

std::optional<std::pair<double, double>> ShiftedFunction::domain() const {
    auto d = f_->domain();
    if (!d) return std::nullopt;
    return std::make_pair(d->first - h_, d->second - h_);
}

void TranslateDifference::eval(double t, std::span<double> out) const {
    std::size_t d = f_->dim();
    double buf[8];
    std::vector<double> heap;
    std::span<double> tmp;
    if (d <= 8) {
        tmp = {buf, d};
    } else {
        heap.resize(d);
        tmp = heap;
    }
    f_->eval(t + h1_, out);
    f_->eval(t + h2_, tmp);
    for (std::size_t k = 0; k < d; ++k) out[k] -= tmp[k];
}

std::optional<std::pair<double, double>> TranslateDifference::domain() const {
    auto d = f_->domain();
    if (!d) return std::nullopt;
    double lo = d->first - std::min(h1_, h2_);
    double hi = d->second - std::max(h1_, h2_);
    return std::make_pair(lo, hi);
}

}  // namespace apnum
