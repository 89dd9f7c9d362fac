#include "apnum/heatdelay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "apnum/seminorm.hpp"

namespace apnum {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

// Pseudospectral sine-basis transform pair on interior nodes
// x_j = (j+1) pi / (M+1). With weights pi/(M+1) the discrete projection is
// exact on sine polynomials of order <= M, so analyze(synthesize(c)) = c for
// K <= M and the transform pair is an isometry on that range.
class SineCollocation {
public:
    SineCollocation(std::size_t K, std::size_t M) : K_(K), M_(M), table_(K * M) {
        const double pi = std::numbers::pi;
        basis_scale_ = std::sqrt(2.0 / pi);
        weight_ = pi / static_cast<double>(M + 1);
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t j = 0; j < M; ++j) {
                double x = static_cast<double>(j + 1) * pi / static_cast<double>(M + 1);
                table_[k * M + j] = std::sin(static_cast<double>(k + 1) * x);
            }
    }

    void synthesize(std::span<const double> coeffs, std::span<double> values) const {
        for (std::size_t j = 0; j < M_; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < K_; ++k) s += coeffs[k] * table_[k * M_ + j];
            values[j] = basis_scale_ * s;
        }
    }

    void analyze(std::span<const double> values, std::span<double> coeffs) const {
        for (std::size_t k = 0; k < K_; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < M_; ++j) s += values[j] * table_[k * M_ + j];
            coeffs[k] = weight_ * basis_scale_ * s;
        }
    }

private:
    std::size_t K_, M_;
    double basis_scale_, weight_;
    std::vector<double> table_;
};

class HeatNonlinearity final : public Nonlinearity {
public:
    HeatNonlinearity(std::size_t K, std::size_t M)
        : K_(K), M_(M), transform_(K, M), g_(example_forcing_factor()) {}

    std::size_t dim() const override { return K_; }

    void eval(double t, std::span<const double> u, std::span<const double> v,
              std::span<double> out) const override {
        thread_local std::vector<double> un, vn, fn;
        un.resize(M_);
        vn.resize(M_);
        fn.resize(M_);
        transform_.synthesize(u, un);
        transform_.synthesize(v, vn);
        double g_val[1];
        g_.eval(t, {g_val, 1});
        double factor = g_val[0] / 60.0;
        for (std::size_t j = 0; j < M_; ++j)
            fn[j] = factor * (std::sin(un[j]) + 3.0 * std::sin(vn[j]));
        transform_.analyze(fn, out);
    }

    double max_trig_frequency() const override { return kSqrt5; }

private:
    std::size_t K_, M_;
    SineCollocation transform_;
    FnSpec g_;
};

}  // namespace

void HeatDelayConfig::validate() const {
    if (K < 1) throw std::invalid_argument("HeatDelayConfig: K must be >= 1");
    if (nodes() < 4 * K)
        throw std::invalid_argument(
            "HeatDelayConfig: x_quad_points must be >= 4K to resolve the nonlinearity");
}

FnSpec example_forcing_factor() {
    return FnSpec(fn::sum({fn::cos_wave(1.0, 0.0), fn::scale(2.0, fn::cos_wave(kSqrt5, 0.0)),
                           fn::scale(4.0, fn::exp_abs(1.0)),
                           fn::scale(-3.0, fn::rational())}));
}

FnSpec example_delay() {
    return FnSpec(fn::sum({fn::constant(3.0), fn::scale(-1.0, fn::sin_wave(kSqrt3, 0.0))}));
}

DelaySystem build_example(const HeatDelayConfig& cfg) {
    cfg.validate();
    std::vector<double> eigenvalues(cfg.K);
    for (std::size_t k = 0; k < cfg.K; ++k) {
        double kk = static_cast<double>(k + 1);
        eigenvalues[k] = -kk * kk;
    }
    DelaySystem sys;
    sys.semigroup = diagonal_semigroup(std::move(eigenvalues));
    sys.F = std::make_shared<HeatNonlinearity>(cfg.K, cfg.nodes());
    sys.tau = example_delay();
    sys.tau_bar = 4.0;  // sup of 3 - sin(sqrt3 t); sin attains -1
    sys.L1 = 1.0 / 6.0;
    sys.L2 = 1.0 / 2.0;
    sys.validate(/*require_zero_at_origin=*/true);
    return sys;
}

Vec project_nonlinearity(std::span<const double> u_coeffs, std::span<const double> v_coeffs,
                         double t, const HeatDelayConfig& cfg) {
    cfg.validate();
    if (u_coeffs.size() != cfg.K || v_coeffs.size() != cfg.K)
        throw std::invalid_argument("project_nonlinearity: coefficient vectors must have length K");
    HeatNonlinearity F(cfg.K, cfg.nodes());
    Vec out(cfg.K);
    F.eval(t, u_coeffs, v_coeffs, out);
    return out;
}

TranslationReport verify_solution_almost_periodicity(const SolveReport& report, double epsilon,
                                                     std::pair<double, double> scan_range) {
    if (!report.converged)
        throw std::invalid_argument("verify_solution_almost_periodicity: report not converged");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("verify_solution_almost_periodicity: epsilon must be positive");
    if (!(scan_range.second > scan_range.first))
        throw std::invalid_argument("verify_solution_almost_periodicity: empty scan range");

    const SampledPath& path = report.extended_solution;
    PathFunction f(path);

    // Assessment windows shrink as tau grows; require a usable remainder.
    double span = path.grid().last_point() - path.grid().t_min();
    double min_window = std::max(10.0 * path.grid().step(), 1.0);
    if (scan_range.second + min_window > span)
        throw std::out_of_range(
            "verify_solution_almost_periodicity: scan range exceeds the sampled path; "
            "solve on a longer window");

    SeminormConfig cfg;
    cfg.n_sweeps = 4;
    cfg.tail_window = 2;
    cfg.quad_step = std::max(path.grid().step(), (scan_range.second - scan_range.first) / 4096.0);

    double scan_step = std::max((scan_range.second - scan_range.first) / 400.0,
                                path.grid().step());
    TranslationReport tr = find_translation_numbers(f, epsilon, scan_range, scan_step, cfg);

    // Candidate simultaneous near-periods of the driving frequencies: cheap
    // closed-form score, then real distances at the best few.
    const double freqs[3] = {1.0, kSqrt5, kSqrt3};
    std::vector<std::pair<double, double>> scored;  // (score, tau)
    const int n_probe = 4000;
    for (int i = 1; i <= n_probe; ++i) {
        double tau = scan_range.first +
                     (scan_range.second - scan_range.first) * static_cast<double>(i) / n_probe;
        double score = 0.0;
        for (double w : freqs) score = std::max(score, std::fabs(std::sin(0.5 * w * tau)));
        scored.emplace_back(score, tau);
    }
    std::sort(scored.begin(), scored.end());
    for (std::size_t c = 0; c < 5 && c < scored.size(); ++c) {
        double tau = scored[c].second;
        double d = translation_distance(f, tau, cfg);
        tr.scan.emplace_back(tau, d);
        if (d < epsilon) tr.accepted.emplace_back(tau, d);
    }
    std::sort(tr.accepted.begin(), tr.accepted.end());
    std::sort(tr.scan.begin(), tr.scan.end());
    auto last = std::unique(tr.accepted.begin(), tr.accepted.end(),
                            [&](const auto& a, const auto& b) {
                                return std::fabs(a.first - b.first) < 1e-9 * scan_step;
                            });
    tr.accepted.erase(last, tr.accepted.end());
    return tr;
}

}  // namespace apnum
