#include "fpspec/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fpspec/errors.hpp"
#include "fpspec/parallel.hpp"

namespace fpspec {

SpectralState propagate(const std::vector<GeneratorBlock>& blocks, const SpectralState& state,
                        double t_target) {
    if (!(t_target >= state.t)) throw InputError("propagate: target time precedes the state time");
    const int top = state.coeffs.max_order();
    if (top > state.truncation)
        throw ConfigurationError("propagate: coefficients exceed the state truncation");
    if (top > static_cast<int>(blocks.size())) {
        std::ostringstream os;
        os << "propagate: no generator block for order " << top;
        throw ConfigurationError(os.str());
    }
    SpectralState out{t_target, CoeffVector(state.coeffs.dim()), state.truncation};
    const double dt = t_target - state.t;
    const int d = state.coeffs.dim();
    out.coeffs.set(MultiIndex::zero(d), state.coeffs[MultiIndex::zero(d)]);
    for (int m = 1; m <= top; ++m) {
        const auto& block = blocks[static_cast<std::size_t>(m - 1)];
        if (block.order != m || block.dim() != d)
            throw ConfigurationError("propagate: generator block does not match the state");
        const auto values = state.coeffs.block(m);
        const Eigen::Map<const Vector> v(values.data(), static_cast<Eigen::Index>(values.size()));
        if (v.isZero(0.0)) continue;
        const Vector next = dt == 0.0 ? Vector(v) : Vector(block_exponential(block, dt) * v);
        out.coeffs.set_block(m, std::span<const double>(next.data(), static_cast<std::size_t>(next.size())));
    }
    return out;
}

SpectralSolver::SpectralSolver(ModelSpec model, int truncation, int threads)
    : model_(std::move(model)), truncation_(truncation) {
    if (truncation < 0) throw InputError("SpectralSolver: truncation must be >= 0");
    blocks_ = build_blocks(model_, truncation_, threads);
}

SpectralSolver::SpectralSolver(ModelSpec model, int truncation)
    : SpectralSolver(std::move(model), truncation, default_thread_count()) {}

const GeneratorBlock& SpectralSolver::block(int m) const {
    if (m < 1 || m > truncation_) throw ConfigurationError("SpectralSolver: block order out of range");
    return blocks_[static_cast<std::size_t>(m - 1)];
}

SpectralState SpectralSolver::initial_state(CoeffVector f0) const {
    if (f0.dim() != model_.dim()) throw InputError("initial data dimension does not match the model");
    if (f0.max_order() > truncation_) {
        std::ostringstream os;
        os << "initial data has order " << f0.max_order() << " above truncation " << truncation_;
        throw ConfigurationError(os.str());
    }
    return SpectralState{0.0, std::move(f0), truncation_};
}

SpectralState SpectralSolver::propagate(const SpectralState& state, double t_target) const {
    return fpspec::propagate(blocks_, state, t_target);
}

std::vector<CoeffVector> flux_J(const SpectralState& state) {
    std::vector<CoeffVector> out;
    for (int j = 0; j < state.coeffs.dim(); ++j) out.push_back(gradient_shift(state.coeffs, j));
    return out;
}

int lyapunov_steps(double t) {
    return std::max(16, static_cast<int>(std::ceil(kLyapunovStepsPerUnitTime * t)));
}

namespace {

Matrix lyapunov_rhs(const Matrix& c, const Matrix& two_d, const Matrix& w) {
    return two_d - c * w - w * c.transpose();
}

void check_psd(const Matrix& w, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -1e-10) {
        std::ostringstream os;
        os << "Lyapunov covariance lost positivity at t = " << t << " (eigenvalue " << lo
           << "); reduce the step size";
        throw NumericalError(os.str());
    }
}

template <typename Visit>
Matrix integrate_lyapunov(const ModelSpec& model, double t, int steps, Visit&& visit) {
    if (!(t >= 0.0)) throw InputError("solve_lyapunov: t must be nonnegative");
    if (steps < 1) throw InputError("solve_lyapunov: steps must be >= 1");
    const int d = model.dim();
    const Matrix& c = model.drift();
    const Matrix two_d = 2.0 * model.diffusion();
    const double h = t / steps;
    Matrix w = Matrix::Zero(d, d);
    visit(0.0, w);
    if (t == 0.0) return w;
    for (int k = 0; k < steps; ++k) {
        const Matrix k1 = lyapunov_rhs(c, two_d, w);
        const Matrix k2 = lyapunov_rhs(c, two_d, w + 0.5 * h * k1);
        const Matrix k3 = lyapunov_rhs(c, two_d, w + 0.5 * h * k2);
        const Matrix k4 = lyapunov_rhs(c, two_d, w + h * k3);
        w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        w = 0.5 * (w + w.transpose()).eval();
        const double tk = (k + 1 == steps) ? t : h * (k + 1);
        check_psd(w, tk);
        visit(tk, w);
    }
    return w;
}

} // namespace

LyapunovCovariance solve_lyapunov(const ModelSpec& model, double t, int steps) {
    return {t, integrate_lyapunov(model, t, steps, [](double, const Matrix&) {})};
}

std::vector<LyapunovCovariance> lyapunov_trajectory(const ModelSpec& model, double t, int steps) {
    std::vector<LyapunovCovariance> out;
    integrate_lyapunov(model, t, steps, [&](double tk, const Matrix& w) { out.push_back({tk, w}); });
    return out;
}

namespace {

struct Conditioning {
    double condition;
    double determinant;
};

Conditioning conditioning(const Matrix& w) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(w, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double lo = ev.minCoeff(), hi = ev.maxCoeff();
    double det = 1.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) det *= ev(i);
    return {lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity(), det};
}

bool passes_guard(const ModelSpec& model, double t, const GreensOptions& options) {
    if (!(t > 0.0)) return false;
    const int steps = std::max(16, static_cast<int>(std::ceil(options.steps_per_unit_time * t)));
    const auto c = conditioning(solve_lyapunov(model, t, steps).W);
    return c.condition <= options.max_condition && c.determinant > options.min_determinant;
}

} // namespace

double smallest_safe_time(const ModelSpec& model, const GreensOptions& options) {
    double hi = 1e-12;
    while (!passes_guard(model, hi, options)) {
        hi *= 2.0;
        if (hi > 1e6) throw NumericalError("no time up to 1e6 passes the Green's kernel guard");
    }
    double lo = hi / 2.0;
    if (hi == 1e-12) return hi;
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (passes_guard(model, mid, options)) hi = mid;
        else lo = mid;
    }
    return hi;
}

GreensKernel::GreensKernel(const ModelSpec& model, double t, GreensOptions options)
    : t_(t), options_(options) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("GreensKernel: t must be finite and nonnegative");
    if (options_.quad_order < 1) throw InputError("GreensKernel: quadrature order must be >= 1");
    const int d = model.dim();
    auto refuse = [&](const std::string& why) {
        const double safe = smallest_safe_time(model, options_);
        std::ostringstream os;
        os << "Green's kernel degenerate at t = " << t << " (" << why << "); smallest safe t = " << safe;
        throw DegenerateTimeError(os.str(), safe);
    };
    if (t == 0.0) refuse("t = 0");
    const int steps = std::max(16, static_cast<int>(std::ceil(options_.steps_per_unit_time * t)));
    w_ = solve_lyapunov(model, t, steps).W;
    const auto c = conditioning(w_);
    condition_ = c.condition;
    if (!(c.condition <= options_.max_condition)) {
        std::ostringstream os;
        os << "cond W = " << c.condition;
        refuse(os.str());
    }
    if (!(c.determinant > options_.min_determinant)) refuse("det W below threshold");

    // y ~ N(0, I), x = E y + xi with xi ~ N(0, W):  x ~ N(0, S), S = W + E E^T, and
    // y | x ~ N(E^T S^{-1} x, I - E^T S^{-1} E).
    const Matrix e = matrix_exponential(model.drift(), t);
    const Matrix s = w_ + e * e.transpose();
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) throw NumericalError("GreensKernel: W + E E^T is not positive definite");
    s_inverse_ = llt.solve(Matrix::Identity(d, d));
    transfer_ = e.transpose() * s_inverse_;
    Matrix cond_cov = Matrix::Identity(d, d) - transfer_ * e;
    cond_cov = 0.5 * (cond_cov + cond_cov.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(cond_cov);
    cond_root_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                 es.eigenvectors().transpose();
    double log_det_s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) log_det_s += 2.0 * std::log(llt.matrixL()(i, i));
    log_norm_ = -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_s;
    rule_ = gauss_hermite(options_.quad_order);
}

bool GreensKernel::accuracy_warning(const CoeffVector& f0) const {
    const int degree = std::max(0, f0.max_order());
    return options_.quad_order < degree / 2 + 1;
}

double GreensKernel::evaluate(const CoeffVector& f0, std::span<const double> x) const {
    const auto d = static_cast<Eigen::Index>(x.size());
    if (d != w_.rows() || f0.dim() != d) throw InputError("GreensKernel: dimension mismatch");
    const Eigen::Map<const Vector> xv(x.data(), d);
    const Vector mean = transfer_ * xv;
    const double density = std::exp(log_norm_ - 0.5 * xv.dot(s_inverse_ * xv));
    Vector y(d);
    const double expectation =
        integrate_standard_normal(rule_, static_cast<int>(d), [&](std::span<const double> z) {
            y = mean + cond_root_ * Eigen::Map<const Vector>(z.data(), d);
            const std::span<const double> ys(y.data(), static_cast<std::size_t>(d));
            double p = 0.0;
            for (const auto& [alpha, v] : f0) p += v * hermite_value(alpha, ys);
            return p;
        });
    return density * expectation;
}

GreensValue greens_evaluate(const ModelSpec& model, const CoeffVector& f0, std::span<const double> x,
                            double t, int quad_order) {
    GreensOptions opts;
    opts.quad_order = quad_order;
    const GreensKernel kernel(model, t, opts);
    return {kernel.evaluate(f0, x), kernel.accuracy_warning(f0)};
}

std::vector<std::vector<double>> uniform_grid(int dim, int per_axis, double lo, double hi) {
    if (dim < 1 || per_axis < 1) throw InputError("uniform_grid: bad shape");
    std::vector<double> axis(static_cast<std::size_t>(per_axis));
    for (int i = 0; i < per_axis; ++i)
        axis[static_cast<std::size_t>(i)] = per_axis == 1 ? lo : lo + (hi - lo) * i / (per_axis - 1);
    std::vector<std::vector<double>> grid;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    while (true) {
        std::vector<double> p(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k) p[static_cast<std::size_t>(k)] = axis[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
        grid.push_back(std::move(p));
        int k = 0;
        for (; k < dim; ++k) {
            if (++idx[static_cast<std::size_t>(k)] < per_axis) break;
            idx[static_cast<std::size_t>(k)] = 0;
        }
        if (k == dim) break;
    }
    return grid;
}

double max_greens_discrepancy(const SpectralSolver& solver, const CoeffVector& f0, double t,
                              const std::vector<std::vector<double>>& grid, GreensOptions options) {
    const GreensKernel kernel(solver.model(), t, options);
    const auto state = solver.propagate(solver.initial_state(f0), t);
    double worst = 0.0;
    for (const auto& x : grid)
        worst = std::max(worst, std::abs(reconstruct(state.coeffs, x) - kernel.evaluate(f0, x)));
    return worst;
}

} // namespace fpspec
