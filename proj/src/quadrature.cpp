#include "fpspec/quadrature.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "fpspec/errors.hpp"

namespace fpspec {

GaussHermiteRule gauss_hermite(int n) {
    if (n < 1) throw InputError("gauss_hermite: order must be >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    if (es.info() != Eigen::Success) throw NumericalError("gauss_hermite: eigen solver failed");
    GaussHermiteRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
    }
    // Symmetrize: the rule is exactly symmetric about zero.
    for (int i = 0; i < n / 2; ++i) {
        const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(n - 1 - i);
        const double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
        const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
        rule.nodes[a] = -x;
        rule.nodes[b] = x;
        rule.weights[a] = rule.weights[b] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

double integrate_standard_normal(const GaussHermiteRule& rule, int dim,
                                 const std::function<double(std::span<const double>)>& g) {
    const auto n = rule.nodes.size();
    const auto d = static_cast<std::size_t>(dim);
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> point(d);
    double sum = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            point[i] = rule.nodes[idx[i]];
            w *= rule.weights[idx[i]];
        }
        sum += w * g(point);
        std::size_t i = 0;
        for (; i < d; ++i) {
            if (++idx[i] < n) break;
            idx[i] = 0;
        }
        if (i == d) break;
    }
    return sum;
}

} // namespace fpspec
