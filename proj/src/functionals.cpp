#include "fpspec/functionals.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fpspec/errors.hpp"
#include "fpspec/generator.hpp"

namespace fpspec {

double entropy_e2(const CoeffVector& f, MassConvention convention) {
    const double mass = f[MultiIndex::zero(f.dim())];
    const double expected = convention == MassConvention::UnitMass ? 1.0 : 0.0;
    if (std::abs(mass - expected) > 1e-12) {
        std::ostringstream os;
        os << "entropy_e2: d_0 = " << mass << " but the "
           << (convention == MassConvention::UnitMass ? "unit-mass" : "deviation") << " convention requires "
           << expected;
        throw InputError(os.str());
    }
    double s = 0.0;
    for (const auto& [alpha, v] : f)
        if (alpha.order() >= 1) s += alpha.factorial() * v * v;
    return 0.5 * s;
}

double fisher_I2(const CoeffVector& f) {
    double s = 0.0;
    for (const auto& [alpha, v] : f) s += alpha.order() * alpha.factorial() * v * v;
    return s;
}

double fisher_I2_flux(const CoeffVector& f) {
    double s = 0.0;
    for (int j = 0; j < f.dim(); ++j) s += gradient_shift(f, j).weighted_norm2();
    return s;
}

double fisher_IP(const CoeffVector& f, const Matrix& p) {
    const int d = f.dim();
    if (p.rows() != d || p.cols() != d) throw InputError("fisher_IP: P has the wrong shape");
    if (!p.allFinite()) throw InputError("fisher_IP: P has non-finite entries");
    if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, p.cwiseAbs().maxCoeff()))
        throw InputError("fisher_IP: P is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(p, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0)) throw InputError("fisher_IP: P is not positive definite");

    std::vector<CoeffVector> flux;
    for (int j = 0; j < d; ++j) flux.push_back(gradient_shift(f, j));
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (p(i, j) != 0.0)
                s += p(i, j) * flux[static_cast<std::size_t>(i)].weighted_dot(flux[static_cast<std::size_t>(j)]);
    return s;
}

std::vector<MultiIndex> vanishing_moment_violations(const CoeffVector& f0, int m) {
    std::vector<MultiIndex> out;
    for (const auto& [alpha, v] : f0)
        if (alpha.order() > 0 && alpha.order() < m) out.push_back(alpha);
    return out;
}

std::optional<std::size_t> DecayReport::first_bound_violation() const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (fisher[i] > bound[i] * (1.0 + kBoundSlack)) return i;
    return std::nullopt;
}

std::optional<std::size_t> DecayReport::first_envelope_violation() const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (bound[i] > envelope[i] * (1.0 + kBoundSlack)) return i;
    return std::nullopt;
}

DecayReport decay_experiment(const SpectralSolver& solver, const CoeffVector& f0, int m,
                             const std::vector<double>& times) {
    if (m < 1) throw InputError("decay_experiment: m must be >= 1");
    if (const auto bad = vanishing_moment_violations(f0, m); !bad.empty()) {
        std::ostringstream os;
        os << "initial data is not orthogonal to V_1..V_" << (m - 1) << "; nonzero coefficients at";
        for (const auto& a : bad) os << ' ' << a;
        throw InputError(os.str());
    }
    for (double t : times)
        if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("decay_experiment: sample times must be finite and >= 0");

    const auto summary = spectral_summary(solver.model());
    DecayReport r;
    r.m = m;
    r.mu = summary.mu;
    r.defect = summary.defect;
    r.times = times;
    r.fisher0 = fisher_I2(f0);

    const auto start = solver.initial_state(f0);
    std::vector<double> factor(times.size());
    double cm = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        r.fisher.push_back(fisher_I2(solver.propagate(start, t).coeffs));
        factor[i] = std::pow(exp_norm(solver.model(), t), 2.0 * m);
        r.bound.push_back(factor[i] * r.fisher0);
        cm = std::max(cm, factor[i] / envelope(summary, m, t, 1.0));
    }
    r.fitted_cm = cm > 0.0 ? cm : 1.0;
    for (double t : times) r.envelope.push_back(envelope(summary, m, t, r.fitted_cm) * r.fisher0);
    return r;
}

DecayReport decay_experiment(const ModelSpec& model, const CoeffVector& f0, int m,
                             const std::vector<double>& times) {
    const SpectralSolver solver(model, std::max(1, f0.max_order()));
    return decay_experiment(solver, f0, m, times);
}

SharpnessWitness sharpness_witness(const ModelSpec& model, int m, double t_star) {
    if (m < 1) throw InputError("sharpness_witness: m must be >= 1");
    if (!(t_star > 0.0)) throw InputError("sharpness_witness: t_star must be positive");
    const Matrix e = matrix_exponential(model.drift(), t_star);
    Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Vector v = svd.matrixV().col(0);
    Eigen::Index lead = 0;
    v.cwiseAbs().maxCoeff(&lead);
    if (v(lead) < 0.0) v = -v;

    SharpnessWitness w{CoeffVector::equilibrium(model.dim()), v,
                       s.size() > 1 ? s(0) - s(1) : std::numeric_limits<double>::infinity(), true};
    w.unique = w.singular_gap >= 1e-12;
    w.f0 += symmetric_power(v, m);
    return w;
}

} // namespace fpspec
