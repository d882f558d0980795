#pragma once

#include <span>
#include <vector>

#include "fpspec/generator.hpp"
#include "fpspec/hermite.hpp"
#include "fpspec/model.hpp"
#include "fpspec/quadrature.hpp"

namespace fpspec {

/// Coefficients of f(t) together with the truncation order they are carried to.
struct SpectralState {
    double t = 0.0;
    CoeffVector coeffs;
    int truncation = 0;
};

/// Advances each V_m block by exp(-B_m (t_target - t)); d_0 is untouched.
/// Throws ConfigurationError if the state has support at an order without a block.
SpectralState propagate(const std::vector<GeneratorBlock>& blocks, const SpectralState& state,
                        double t_target);

/// Owns a model and its generator blocks up to a truncation order.
class SpectralSolver {
public:
    SpectralSolver(ModelSpec model, int truncation, int threads);
    SpectralSolver(ModelSpec model, int truncation);

    const ModelSpec& model() const noexcept { return model_; }
    int truncation() const noexcept { return truncation_; }
    const std::vector<GeneratorBlock>& blocks() const noexcept { return blocks_; }
    const GeneratorBlock& block(int m) const;

    /// State at time 0; throws ConfigurationError if f0 exceeds the truncation.
    SpectralState initial_state(CoeffVector f0) const;
    SpectralState propagate(const SpectralState& state, double t_target) const;

private:
    ModelSpec model_;
    int truncation_;
    std::vector<GeneratorBlock> blocks_;
};

/// Coefficients of J_j = d_j f + x_j f for j = 1..d.
std::vector<CoeffVector> flux_J(const SpectralState& state);

struct LyapunovCovariance {
    double t = 0.0;
    Matrix W;
};

/// Default RK4 resolution for the Lyapunov flow.
inline constexpr int kLyapunovStepsPerUnitTime = 1000;
/// RK4 steps for horizon t at the default resolution (at least 16).
int lyapunov_steps(double t);

/// W(t) = 2 int_0^t exp(-Cs) D exp(-C^T s) ds from W' = 2D - CW - WC^T, W(0) = 0,
/// by classical RK4 with `steps` uniform steps. Throws NumericalError if W
/// acquires an eigenvalue below -1e-10.
LyapunovCovariance solve_lyapunov(const ModelSpec& model, double t, int steps);

/// Every RK4 iterate, starting with W(0) = 0.
std::vector<LyapunovCovariance> lyapunov_trajectory(const ModelSpec& model, double t, int steps);

struct GreensOptions {
    int quad_order = 40;
    int steps_per_unit_time = kLyapunovStepsPerUnitTime;
    double max_condition = 1e12;
    double min_determinant = 1e-300;
};

/// Solution operator f0 -> f(., t) via the Gaussian kernel with covariance W(t).
/// The Gaussian factors of the kernel and of f0 = P f_inf are combined in closed
/// form, so the tensor Gauss-Hermite rule only has to integrate the polynomial P
/// against the conditional law of the starting point y given x.
class GreensKernel {
public:
    /// Throws DegenerateTimeError when cond W(t) or det W(t) fails the guard.
    GreensKernel(const ModelSpec& model, double t, GreensOptions options = {});

    double t() const noexcept { return t_; }
    const Matrix& covariance() const noexcept { return w_; }
    double condition() const noexcept { return condition_; }
    int quad_order() const noexcept { return options_.quad_order; }

    double evaluate(const CoeffVector& f0, std::span<const double> x) const;
    /// True when the rule is too short to integrate P exactly.
    bool accuracy_warning(const CoeffVector& f0) const;

private:
    double t_;
    GreensOptions options_;
    Matrix w_;
    double condition_ = 0.0;
    Matrix transfer_;        // E^T S^{-1}, maps x to the conditional mean of y
    Matrix cond_root_;       // square root of the conditional covariance of y
    Matrix s_inverse_;       // (W + E E^T)^{-1}
    double log_norm_ = 0.0;  // log of (2 pi)^{-d/2} det(S)^{-1/2}
    GaussHermiteRule rule_;
};

/// Smallest t at which the Green's kernel passes its degeneracy guard
/// (bisection on cond W(t)); throws NumericalError if none up to t = 1e6.
double smallest_safe_time(const ModelSpec& model, const GreensOptions& options = {});

struct GreensValue {
    double value = 0.0;
    bool accuracy_warning = false;
};

GreensValue greens_evaluate(const ModelSpec& model, const CoeffVector& f0, std::span<const double> x,
                            double t, int quad_order);

/// Uniform tensor grid with `per_axis` points per coordinate on [lo, hi].
std::vector<std::vector<double>> uniform_grid(int dim, int per_axis, double lo, double hi);

/// max over the grid of |reconstruct(spectral f(t)) - Green's f(t)|.
double max_greens_discrepancy(const SpectralSolver& solver, const CoeffVector& f0, double t,
                              const std::vector<std::vector<double>>& grid, GreensOptions options = {});

} // namespace fpspec
