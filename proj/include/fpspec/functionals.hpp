#pragma once

#include <optional>
#include <vector>

#include "fpspec/evolution.hpp"
#include "fpspec/hermite.hpp"
#include "fpspec/model.hpp"

namespace fpspec {

/// Relative slack allowed when checking fisher <= bound <= envelope.
inline constexpr double kBoundSlack = 1e-9;

enum class MassConvention { UnitMass, Deviation };

/// e_2(f | f_inf) = 1/2 sum_{|alpha| >= 1} alpha! d_alpha^2. The convention states
/// whether f carries unit mass (d_0 = 1) or is a pure deviation (d_0 = 0).
double entropy_e2(const CoeffVector& f, MassConvention convention = MassConvention::UnitMass);

/// I_2(f | f_inf) = sum_k k sum_{|alpha| = k} alpha! d_alpha^2.
double fisher_I2(const CoeffVector& f);

/// Same quantity through the flux: sum_j ||J_j||^2 with J_j = gradient_shift(f, j).
double fisher_I2_flux(const CoeffVector& f);

/// I_2^P = sum_{ij} P_ij <J_i, J_j>_w for symmetric positive definite P.
double fisher_IP(const CoeffVector& f, const Matrix& p);

/// Multi-indices with 0 < |alpha| < m carrying a nonzero coefficient.
std::vector<MultiIndex> vanishing_moment_violations(const CoeffVector& f0, int m);

struct DecayReport {
    int m = 1;
    double mu = 0.0;
    int defect = 0;
    double fitted_cm = 1.0;
    double fisher0 = 0.0;
    std::vector<double> times;
    std::vector<double> fisher;
    std::vector<double> bound;
    std::vector<double> envelope;

    /// First sample with fisher > bound (1 + kBoundSlack), if any.
    std::optional<std::size_t> first_bound_violation() const;
    /// First sample with bound > envelope (1 + kBoundSlack), if any.
    std::optional<std::size_t> first_envelope_violation() const;
};

/// Propagates f0 to each sample time and records I_2 against the sharp bound
/// ||exp(-Ct)||^{2m} I_2(f0) and the envelope with the fitted constant C_m.
/// Throws InputError listing the offending indices if f0 has moments below m.
DecayReport decay_experiment(const SpectralSolver& solver, const CoeffVector& f0, int m,
                             const std::vector<double>& times);
DecayReport decay_experiment(const ModelSpec& model, const CoeffVector& f0, int m,
                             const std::vector<double>& times);

struct SharpnessWitness {
    CoeffVector f0;
    Vector direction;      // top right singular vector of exp(-C t_star)
    double singular_gap;   // sigma_1 - sigma_2 (infinity when d = 1)
    bool unique;           // false when the gap is below 1e-12
};

/// f0 = f_inf + sum_{|alpha| = m} (m!/alpha!) v^alpha h_alpha; the flow maps the
/// order-m part to the same construction on exp(-Ct) v, so the Fisher ratio at
/// t_star equals ||exp(-C t_star)||^{2m}.
SharpnessWitness sharpness_witness(const ModelSpec& model, int m, double t_star);

} // namespace fpspec
