#include "fpspec/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "fpspec/errors.hpp"

namespace fpspec {

namespace {

bool all_finite(const Matrix& a) { return a.allFinite(); }

double rank_threshold(double sigma_max, double tol) { return tol * std::max(1.0, sigma_max); }

template <typename Mat>
int numerical_rank(const Mat& a, double tol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    const double thr = rank_threshold(s(0), tol);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > thr) ++r;
    return r;
}

// Orthonormal basis of the null space of `a` (columns).
Matrix null_space(const Matrix& a, double tol) {
    const Eigen::Index n = a.cols();
    if (a.rows() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double thr = rank_threshold(s.size() ? s(0) : 0.0, tol);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > thr) ++r;
    return svd.matrixV().rightCols(n - r);
}

std::string format_complex(std::complex<double> z) {
    std::ostringstream os;
    os.precision(12);
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

void check_shapes(const Matrix& drift, const Matrix& diffusion) {
    if (drift.rows() == 0 || drift.rows() != drift.cols())
        throw InputError("drift matrix C must be square and non-empty");
    if (diffusion.rows() != diffusion.cols())
        throw InputError("diffusion matrix D must be square");
    if (drift.rows() != diffusion.rows())
        throw InputError("C and D must have the same dimension");
    if (!all_finite(drift) || !all_finite(diffusion))
        throw InputError("C and D must have finite entries");
}

std::vector<std::complex<double>> raw_eigenvalues(const Matrix& c) {
    Eigen::EigenSolver<Matrix> es(c, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
    const ComplexMatrix v = es.eigenvectors();
    const Eigen::VectorXcd lambda = es.eigenvalues();
    const ComplexMatrix residual = c.cast<std::complex<double>>() * v - v * lambda.asDiagonal();
    const double scale = std::max(1.0, spectral_norm(c));
    const double res = residual.norm() / scale;
    if (!(res <= 1e-8 * static_cast<double>(c.rows()))) {
        std::ostringstream os;
        os << "eigenvalue solver residual too large: " << res;
        throw NumericalError(os.str());
    }
    return {lambda.data(), lambda.data() + lambda.size()};
}

bool complex_less(std::complex<double> a, std::complex<double> b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

} // namespace

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

Matrix invariant_kernel_subspace(const Matrix& drift, const Matrix& diffusion, int* iterations) {
    const Eigen::Index d = drift.rows();
    Matrix basis = null_space(diffusion, kRankTolerance);
    const Matrix ct = drift.transpose();
    int steps = 0;
    while (basis.cols() > 0) {
        // x = K z lies in the preimage iff C^T K z has no component outside span(K).
        const Matrix outside = (Matrix::Identity(d, d) - basis * basis.transpose()) * ct * basis;
        const Matrix keep = null_space(outside, kRankTolerance);
        if (keep.cols() == basis.cols()) break;
        basis = basis * keep;
        ++steps;
    }
    if (iterations) *iterations = steps;
    return basis;
}

int kalman_rank(const Matrix& drift, const Matrix& diffusion) {
    const Eigen::Index d = drift.rows();
    const Matrix root = diffusion.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    Matrix ctrb(d, d * d);
    Matrix block = root;
    for (Eigen::Index k = 0; k < d; ++k) {
        ctrb.middleCols(k * d, d) = block;
        block = drift.transpose() * block;
    }
    return numerical_rank(ctrb, kRankTolerance);
}

ValidationResult validate(const Matrix& drift, const Matrix& diffusion) {
    check_shapes(drift, diffusion);
    const Eigen::Index d = drift.rows();
    ValidationResult result;
    auto fail = [&](std::string cond, std::string detail) {
        result.violations.push_back({std::move(cond), std::move(detail)});
    };

    // (A)
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i != j && std::abs(diffusion(i, j)) > kNormalizationTolerance) {
                std::ostringstream os;
                os << "D is not diagonal: D(" << i << "," << j << ") = " << diffusion(i, j);
                fail("A", os.str());
            }
        }
        if (diffusion(i, i) < -kNormalizationTolerance) {
            std::ostringstream os;
            os << "D has a negative diagonal entry D(" << i << "," << i << ") = " << diffusion(i, i);
            fail("A", os.str());
        }
    }
    const int rank = numerical_rank(diffusion, kRankTolerance);
    if (rank < 1) fail("A", "rank(D) = 0; at least one diffusive direction is required");

    // Normalized form.
    const Matrix sym = 0.5 * (drift + drift.transpose());
    const double mismatch = (diffusion - sym).cwiseAbs().maxCoeff();
    if (mismatch > kNormalizationTolerance) {
        std::ostringstream os;
        os << "D differs from (C + C^T)/2 by " << mismatch << " (max entry)";
        fail("normalized", os.str());
    }

    // (B)
    for (const auto& lambda : raw_eigenvalues(drift)) {
        if (!(lambda.real() > 0.0)) fail("B", "eigenvalue " + format_complex(lambda) + " of C has non-positive real part");
    }

    // (C)
    const Matrix inv = invariant_kernel_subspace(drift, diffusion);
    if (inv.cols() > 0) {
        std::ostringstream os;
        os.precision(12);
        os << "ker D contains a C^T-invariant subspace of dimension " << inv.cols() << ", basis:";
        for (Eigen::Index k = 0; k < inv.cols(); ++k) {
            os << " [";
            for (Eigen::Index i = 0; i < d; ++i) os << (i ? ", " : "") << inv(i, k);
            os << "]";
        }
        fail("C", os.str());
    }

    if (result.violations.empty()) result.model = ModelSpec(drift, diffusion, rank);
    return result;
}

ModelSpec ModelSpec::from(const Matrix& drift, const Matrix& diffusion) {
    auto r = validate(drift, diffusion);
    if (r.ok()) return *r.model;
    std::string msg = "invalid model:";
    for (const auto& v : r.violations) msg += " [" + v.condition + "] " + v.detail + ";";
    throw InputError(msg);
}

std::vector<ValueCluster> cluster_values(const std::vector<std::complex<double>>& values, double tol) {
    const auto n = values.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(values[i] - values[j]) <= tol * std::max(1.0, std::abs(values[i])))
                parent[find(j)] = find(i);

    std::vector<ValueCluster> out;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(out.size());
            out.emplace_back();
        }
        auto& c = out[static_cast<std::size_t>(slot[r])];
        c.mean += values[i];
        ++c.count;
    }
    for (auto& c : out) c.mean /= static_cast<double>(c.count);
    return out;
}

SpectralSummary spectral_summary(const ModelSpec& model) {
    const Matrix& c = model.drift();
    const Eigen::Index d = c.rows();
    auto raw = raw_eigenvalues(c);
    std::sort(raw.begin(), raw.end(), complex_less);

    const auto groups = cluster_values(raw, kEigenClusterTolerance);

    SpectralSummary out;
    const double cnorm = std::max(1.0, spectral_norm(c));
    for (const auto& g : groups) {
        const auto mean = g.mean;
        EigenCluster cl;
        cl.value = mean;
        cl.algebraic = g.count;

        // Largest Jordan block: first k with rank (C - lambda I)^k = d - algebraic.
        const ComplexMatrix shifted =
            c.cast<std::complex<double>>() - mean * ComplexMatrix::Identity(d, d);
        ComplexMatrix power = ComplexMatrix::Identity(d, d);
        cl.largest_block = cl.algebraic;
        for (int k = 1; k <= cl.algebraic; ++k) {
            power = power * shifted;
            Eigen::JacobiSVD<ComplexMatrix> svd(power);
            const auto& s = svd.singularValues();
            const double thr = kJordanRankTolerance * std::pow(cnorm, k);
            int rank = 0;
            for (Eigen::Index i = 0; i < s.size(); ++i)
                if (s(i) > thr) ++rank;
            if (rank <= d - cl.algebraic) {
                cl.largest_block = k;
                break;
            }
        }
        out.clusters.push_back(cl);
        for (int k = 0; k < cl.algebraic; ++k) out.eigenvalues.push_back(mean);
    }
    std::sort(out.clusters.begin(), out.clusters.end(),
              [](const EigenCluster& a, const EigenCluster& b) { return complex_less(a.value, b.value); });
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), complex_less);

    out.mu = out.clusters.front().value.real();
    for (const auto& cl : out.clusters) out.mu = std::min(out.mu, cl.value.real());
    if (!(out.mu > 0.0)) throw NumericalError("spectral gap is not positive for a validated model");
    out.defect = 0;
    for (const auto& cl : out.clusters)
        if (std::abs(cl.value.real() - out.mu) <= kSpectralGapTie)
            out.defect = std::max(out.defect, cl.largest_block - 1);
    return out;
}

Matrix matrix_exponential(const Matrix& a, double t) {
    if (a.rows() != a.cols()) throw InputError("matrix_exponential: matrix must be square");
    if (!a.allFinite() || !std::isfinite(t)) throw InputError("matrix_exponential: non-finite input");
    if (t < 0.0) throw InputError("matrix_exponential: t must be nonnegative");
    if (t == 0.0) return Matrix::Identity(a.rows(), a.cols());
    const Matrix scaled = -t * a;
    return scaled.exp();
}

double exp_norm(const ModelSpec& model, double t) {
    if (t == 0.0) return 1.0;
    return spectral_norm(matrix_exponential(model.drift(), t));
}

double envelope(const SpectralSummary& summary, int m, double t, double cm) {
    if (m < 1) throw InputError("envelope: m must be >= 1");
    if (!(t >= 0.0)) throw InputError("envelope: t must be nonnegative");
    if (!(cm > 0.0)) throw InputError("envelope: Cm must be positive");
    const double power = 2.0 * summary.defect * m;
    return cm * std::pow(1.0 + t, power) * std::exp(-2.0 * m * summary.mu * t);
}

double envelope(const ModelSpec& model, int m, double t, double cm) {
    return envelope(spectral_summary(model), m, t, cm);
}

} // namespace fpspec
