#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fpspec {

/// Gauss-Hermite rule for the standard normal weight: sum w_i g(x_i)
/// approximates the expectation of g under N(0, 1) and is exact for
/// polynomials of degree <= 2n - 1. Weights sum to one.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch on the symmetric Jacobi matrix with off-diagonal sqrt(k).
GaussHermiteRule gauss_hermite(int n);

/// Tensor-product expectation of g over N(0, I_dim).
double integrate_standard_normal(const GaussHermiteRule& rule, int dim,
                                 const std::function<double(std::span<const double>)>& g);

} // namespace fpspec
