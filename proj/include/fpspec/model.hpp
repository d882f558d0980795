#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fpspec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Singular values at or below this (relative to max(1, sigma_max)) count as zero
/// in the hypoellipticity and Kalman rank decisions.
inline constexpr double kRankTolerance = 1e-10;
/// Rank tolerance for the (C - lambda I)^k staircase that determines Jordan structure.
inline constexpr double kJordanRankTolerance = 1e-8;
/// Eigenvalues whose real part is within this of mu are treated as attaining mu.
inline constexpr double kSpectralGapTie = 1e-9;
/// Eigenvalues closer than this (scaled by max(1, |lambda|)) are grouped into one cluster.
inline constexpr double kEigenClusterTolerance = 1e-5;
/// Allowed entrywise mismatch between D and the symmetric part of C.
inline constexpr double kNormalizationTolerance = 1e-12;

struct ValidationResult;
ValidationResult validate(const Matrix& drift, const Matrix& diffusion);

/// A drift/diffusion pair (C, D) in normalized form: D diagonal, D = (C + C^T)/2,
/// C positive stable, and no C^T-invariant subspace inside ker D.
/// Instances exist only after passing validate().
class ModelSpec {
public:
    int dim() const noexcept { return static_cast<int>(drift_.rows()); }
    const Matrix& drift() const noexcept { return drift_; }
    const Matrix& diffusion() const noexcept { return diffusion_; }
    int diffusion_rank() const noexcept { return rank_; }

    /// Validates and returns the model; throws InputError listing every violation.
    static ModelSpec from(const Matrix& drift, const Matrix& diffusion);

private:
    friend ValidationResult validate(const Matrix& drift, const Matrix& diffusion);

    ModelSpec(Matrix drift, Matrix diffusion, int rank)
        : drift_(std::move(drift)), diffusion_(std::move(diffusion)), rank_(rank) {}

    Matrix drift_;
    Matrix diffusion_;
    int rank_;
};

struct Violation {
    std::string condition;  // "A", "B", "C" or "normalized"
    std::string detail;
};

struct ValidationResult {
    std::optional<ModelSpec> model;
    std::vector<Violation> violations;

    bool ok() const noexcept { return model.has_value(); }
};

/// Checks conditions (A)-(C) and the normalized form. Shape and finiteness
/// problems throw InputError; condition failures are collected, not thrown.
ValidationResult validate(const Matrix& drift, const Matrix& diffusion);

/// Orthonormal basis (d x k) of the largest C^T-invariant subspace contained in
/// ker D, computed by the preimage iteration K_{i+1} = K_i ∩ (C^T)^{-1}(K_i).
/// `iterations`, when non-null, receives the number of refinement steps taken.
Matrix invariant_kernel_subspace(const Matrix& drift, const Matrix& diffusion,
                                 int* iterations = nullptr);

/// rank [sqrt(D), C^T sqrt(D), ..., (C^T)^{d-1} sqrt(D)].
int kalman_rank(const Matrix& drift, const Matrix& diffusion);

struct EigenCluster {
    std::complex<double> value;  // mean of the clustered eigenvalues
    int algebraic = 0;
    int largest_block = 0;       // size of the largest Jordan block
};

struct SpectralSummary {
    std::vector<std::complex<double>> eigenvalues;  // repeated by algebraic multiplicity
    std::vector<EigenCluster> clusters;
    double mu = 0.0;
    int defect = 0;
};

SpectralSummary spectral_summary(const ModelSpec& model);

struct ValueCluster {
    std::complex<double> mean;
    int count = 0;
};

/// Single-linkage grouping of values closer than tol * max(1, |z|); the group
/// mean is much better conditioned than the members of a perturbed Jordan block.
std::vector<ValueCluster> cluster_values(const std::vector<std::complex<double>>& values, double tol);

/// Returns exp(-A t).
Matrix matrix_exponential(const Matrix& a, double t);

double spectral_norm(const Matrix& a);

/// ||exp(-C t)||_2.
double exp_norm(const ModelSpec& model, double t);

/// Cm (1+t)^{2nm} exp(-2 m mu t).
double envelope(const SpectralSummary& summary, int m, double t, double cm);
double envelope(const ModelSpec& model, int m, double t, double cm);

} // namespace fpspec
