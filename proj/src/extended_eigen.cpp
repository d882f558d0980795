// Eigenvalues in 50-digit arithmetic. Kept in its own translation unit because
// instantiating Eigen over boost::multiprecision is slow to compile.
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "fpspec/errors.hpp"
#include "fpspec/model.hpp"

namespace fpspec::detail {

std::vector<std::complex<double>> extended_eigenvalues(const Matrix& a) {
    using Real = boost::multiprecision::cpp_bin_float_50;
    using WideMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    const WideMatrix wide = a.cast<Real>();
    Eigen::EigenSolver<WideMatrix> es(wide, false);
    if (es.info() != Eigen::Success) throw NumericalError("extended-precision eigenvalue solver did not converge");
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const auto& z = es.eigenvalues()(i);
        out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    }
    return out;
}

} // namespace fpspec::detail
