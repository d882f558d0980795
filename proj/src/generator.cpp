#include "fpspec/generator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <sstream>

#include "fpspec/errors.hpp"

namespace fpspec {

namespace {

// Image of H_alpha under the pieces of -L, with -L(P f_inf) = Q f_inf and
//   Q = sum_i D_ii (d_i^2 P - x_i d_i P) + sum_{i<j} A_ij (x_j d_i P - x_i d_j P),
// A = (C - C^T)/2. Each piece maps V_m into itself with integer coefficients.
ExactPolynomial diffusion_piece(const ExactPolynomial& p, int i) {
    const auto dp = p.derivative(i);
    return dp.derivative(i) - dp.times_x(i);
}

ExactPolynomial rotation_piece(const ExactPolynomial& p, int i, int j) {
    return p.derivative(i).times_x(j) - p.derivative(j).times_x(i);
}

void accumulate(const ExactCoeffs& image, double weight, int m, const std::vector<MultiIndex>& basis,
                Eigen::Ref<Vector> column) {
    for (const auto& [beta, value] : image) {
        if (beta.order() != m) {
            std::ostringstream os;
            os << "generator image of V_" << m << " has a component at " << beta << " (order "
               << beta.order() << ")";
            throw ConsistencyError(os.str());
        }
        const auto it = std::lower_bound(basis.begin(), basis.end(), beta);
        column(it - basis.begin()) += weight * static_cast<double>(value);
    }
}

} // namespace

GeneratorBlock build_block(const ModelSpec& model, int m, int cap) {
    if (m < 1) throw InputError("build_block: order must be >= 1");
    const int d = model.dim();
    const auto side = block_size(d, m);
    if (side > cap) {
        std::ostringstream os;
        os << "block V_" << m << " has side " << side << " exceeding cap " << cap;
        throw SizeError(os.str());
    }
    GeneratorBlock block;
    block.order = m;
    block.basis = enumerate_indices(d, m);
    const auto n = static_cast<Eigen::Index>(block.basis.size());
    block.matrix = Matrix::Zero(n, n);

    const Matrix& c = model.drift();
    const Matrix& diff = model.diffusion();
    for (Eigen::Index col = 0; col < n; ++col) {
        const auto p = hermite_polynomial(block.basis[static_cast<std::size_t>(col)]);
        Vector image = Vector::Zero(n);
        for (int i = 0; i < d; ++i) {
            const auto e = expand_exact(diffusion_piece(p, i));
            accumulate(e, diff(i, i), m, block.basis, image);
        }
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                const auto e = expand_exact(rotation_piece(p, i, j));
                accumulate(e, 0.5 * (c(i, j) - c(j, i)), m, block.basis, image);
            }
        block.matrix.col(col) = -image;
    }
    return block;
}

std::vector<GeneratorBlock> build_blocks(const ModelSpec& model, int max_order, int threads, int cap) {
    if (max_order < 0) throw InputError("build_blocks: negative truncation");
    std::vector<GeneratorBlock> blocks(static_cast<std::size_t>(max_order));
    const int workers = std::max(1, std::min(threads, max_order));
    if (workers <= 1) {
        for (int m = 1; m <= max_order; ++m) blocks[static_cast<std::size_t>(m - 1)] = build_block(model, m, cap);
        return blocks;
    }
    // Each block is written by exactly one task, so results do not depend on scheduling.
    std::vector<std::future<void>> tasks;
    for (int w = 0; w < workers; ++w) {
        tasks.push_back(std::async(std::launch::async, [&, w] {
            for (int m = 1 + w; m <= max_order; m += workers)
                blocks[static_cast<std::size_t>(m - 1)] = build_block(model, m, cap);
        }));
    }
    for (auto& t : tasks) t.get();
    return blocks;
}

std::vector<std::complex<double>> block_eigenvalues(const GeneratorBlock& block) {
    if (block.size() <= kExtendedEigenLimit) return detail::extended_eigenvalues(block.matrix);
    Eigen::EigenSolver<Matrix> es(block.matrix, false);
    if (es.info() != Eigen::Success) throw NumericalError("block eigenvalue solver did not converge");
    std::vector<std::complex<double>> raw(es.eigenvalues().data(),
                                          es.eigenvalues().data() + es.eigenvalues().size());
    std::vector<std::complex<double>> out;
    out.reserve(raw.size());
    for (const auto& c : cluster_values(raw, kEigenClusterTolerance))
        for (int k = 0; k < c.count; ++k) out.push_back(c.mean);
    return out;
}

std::vector<std::complex<double>> predicted_block_spectrum(const GeneratorBlock& block,
                                                           const SpectralSummary& summary) {
    if (static_cast<int>(summary.eigenvalues.size()) != block.dim())
        throw InputError("verify_spectrum: summary and block dimensions differ");
    std::vector<std::complex<double>> out;
    out.reserve(block.basis.size());
    for (const auto& alpha : block.basis) {
        std::complex<double> s = 0.0;
        for (int i = 0; i < alpha.dim(); ++i) s += static_cast<double>(alpha[i]) * summary.eigenvalues[static_cast<std::size_t>(i)];
        out.push_back(s);
    }
    return out;
}

double verify_spectrum(const GeneratorBlock& block, const SpectralSummary& summary) {
    return bottleneck_distance(block_eigenvalues(block), predicted_block_spectrum(block, summary));
}

double bottleneck_distance(const std::vector<std::complex<double>>& a,
                           const std::vector<std::complex<double>>& b) {
    if (a.size() != b.size()) throw InputError("bottleneck_distance: sizes differ");
    const std::size_t n = a.size();
    if (n == 0) return 0.0;
    std::vector<double> dist(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = std::abs(a[i] - b[j]);
    std::vector<double> levels(dist);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    // Perfect matching using only pairs with distance <= threshold (Kuhn's algorithm).
    auto feasible = [&](double threshold) {
        std::vector<long> match(n, -1);
        std::vector<char> seen(n);
        std::function<bool(std::size_t)> augment = [&](std::size_t i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (dist[i * n + j] > threshold || seen[j]) continue;
                seen[j] = 1;
                if (match[j] < 0 || augment(static_cast<std::size_t>(match[j]))) {
                    match[j] = static_cast<long>(i);
                    return true;
                }
            }
            return false;
        };
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(seen.begin(), seen.end(), 0);
            if (!augment(i)) return false;
        }
        return true;
    };
    std::size_t lo = 0, hi = levels.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (feasible(levels[mid])) hi = mid;
        else lo = mid + 1;
    }
    return levels[lo];
}

Matrix block_exponential(const GeneratorBlock& block, double t) { return matrix_exponential(block.matrix, t); }

double weighted_operator_norm(const GeneratorBlock& block, double t) {
    const auto n = static_cast<Eigen::Index>(block.basis.size());
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = std::sqrt(block.basis[static_cast<std::size_t>(i)].factorial());
    const Matrix e = block_exponential(block, t);
    const Matrix scaled = w.asDiagonal() * e * w.cwiseInverse().asDiagonal();
    return spectral_norm(scaled);
}

CoeffVector symmetric_power(const Vector& v, int m) {
    const int d = static_cast<int>(v.size());
    if (m < 0) throw InputError("symmetric_power: negative order");
    double mfact = 1.0;
    for (int k = 2; k <= m; ++k) mfact *= k;
    CoeffVector out(d);
    for (const auto& alpha : enumerate_indices(d, m)) {
        double term = mfact / alpha.factorial();
        for (int i = 0; i < d; ++i) term *= std::pow(v(i), alpha[i]);
        out.set(alpha, term);
    }
    return out;
}

} // namespace fpspec
