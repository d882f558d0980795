#pragma once

#include <vector>

#include "fpspec/hermite.hpp"
#include "fpspec/model.hpp"

namespace fpspec {

inline constexpr int kDefaultBlockCap = 500;

/// Matrix of the Fokker-Planck operator restricted to V_m: the coefficients
/// d of the order-m Hermite functions (in `basis` order) evolve by d' = -B d.
/// With this convention B_1 = C.
struct GeneratorBlock {
    int order = 0;
    std::vector<MultiIndex> basis;
    Matrix matrix;

    int dim() const { return basis.empty() ? 0 : basis.front().dim(); }
    Eigen::Index size() const { return matrix.rows(); }
};

/// Applies -L to every h_alpha with |alpha| = m by exact polynomial calculus and
/// re-expands the image in the Hermite basis. Throws ConsistencyError if any
/// image component falls outside V_m, SizeError if the block exceeds `cap`.
GeneratorBlock build_block(const ModelSpec& model, int m, int cap = kDefaultBlockCap);

/// Blocks 1..max_order, built concurrently on up to `threads` workers.
/// Element k of the result holds the block of order k + 1.
std::vector<GeneratorBlock> build_blocks(const ModelSpec& model, int max_order, int threads,
                                         int cap = kDefaultBlockCap);

/// Bottleneck (max-min over optimal pairings) distance between eig(B_m) and the
/// multiset {sum alpha_i lambda_i : |alpha| = m}.
double verify_spectrum(const GeneratorBlock& block, const SpectralSummary& summary);

/// Blocks up to this side have their eigenvalues computed in 50-digit arithmetic.
/// Jordan blocks of size k perturb eigenvalues by ~eps^{1/k}, which in double
/// precision already exceeds 1e-4 for k = 4.
inline constexpr Eigen::Index kExtendedEigenLimit = 64;

/// Eigenvalues of B_m: extended precision for small blocks, otherwise double
/// precision with each value replaced by the mean of its cluster.
std::vector<std::complex<double>> block_eigenvalues(const GeneratorBlock& block);

namespace detail {
std::vector<std::complex<double>> extended_eigenvalues(const Matrix& a);
}

/// {sum alpha_i lambda_i} over the block basis.
std::vector<std::complex<double>> predicted_block_spectrum(const GeneratorBlock& block,
                                                           const SpectralSummary& summary);

/// exp(-B_m t).
Matrix block_exponential(const GeneratorBlock& block, double t);

/// Operator norm of exp(-B_m t) in the alpha!-weighted coefficient inner product.
double weighted_operator_norm(const GeneratorBlock& block, double t);

/// Coefficients c_alpha = (m!/alpha!) v^alpha for |alpha| = m, i.e. of (-v.grad)^m f_inf.
CoeffVector symmetric_power(const Vector& v, int m);

/// Smallest max-distance achievable by a perfect pairing of two equally sized sets.
double bottleneck_distance(const std::vector<std::complex<double>>& a,
                           const std::vector<std::complex<double>>& b);

} // namespace fpspec
