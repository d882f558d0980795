#include "fpspec/multi_index.hpp"

#include <numeric>

#include "fpspec/errors.hpp"

namespace fpspec {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    for (int a : entries_)
        if (a < 0) throw InputError("multi-index entries must be nonnegative");
    order_ = std::accumulate(entries_.begin(), entries_.end(), 0);
}

MultiIndex MultiIndex::unit(int dim, int j) {
    auto e = zero(dim);
    return e.plus_unit(j);
}

double MultiIndex::factorial() const {
    double f = 1.0;
    for (int a : entries_)
        for (int k = 2; k <= a; ++k) f *= k;
    return f;
}

MultiIndex MultiIndex::plus_unit(int j) const {
    MultiIndex r = *this;
    ++r.entries_.at(static_cast<std::size_t>(j));
    ++r.order_;
    return r;
}

MultiIndex MultiIndex::minus_unit(int j) const {
    MultiIndex r = *this;
    auto& e = r.entries_.at(static_cast<std::size_t>(j));
    if (e == 0) throw InputError("minus_unit on a zero entry");
    --e;
    --r.order_;
    return r;
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.order_ <=> b.order_; c != 0) return c;
    if (auto c = a.entries_.size() <=> b.entries_.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.entries_.size(); ++i)
        if (a.entries_[i] != b.entries_[i]) return b.entries_[i] <=> a.entries_[i];
    return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& alpha) {
    os << '(';
    for (int i = 0; i < alpha.dim(); ++i) os << (i ? "," : "") << alpha[i];
    return os << ')';
}

namespace {

void enumerate_rec(int remaining_dims, int m, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
    if (remaining_dims == 1) {
        prefix.push_back(m);
        out.emplace_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int first = m; first >= 0; --first) {
        prefix.push_back(first);
        enumerate_rec(remaining_dims - 1, m - first, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

std::vector<MultiIndex> enumerate_indices(int dim, int m) {
    if (dim < 1) throw InputError("enumerate_indices: dimension must be >= 1");
    if (m < 0) throw InputError("enumerate_indices: order must be >= 0");
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(block_size(dim, m)));
    std::vector<int> prefix;
    enumerate_rec(dim, m, prefix, out);
    return out;
}

std::int64_t block_size(int dim, int m) {
    // binomial(m + d - 1, d - 1), computed incrementally to stay exact.
    std::int64_t r = 1;
    for (int k = 1; k <= dim - 1; ++k) r = r * (m + k) / k;
    return r;
}

double inner_product(const MultiIndex& alpha, const MultiIndex& beta) {
    if (alpha.dim() != beta.dim()) throw InputError("inner_product: dimension mismatch");
    return alpha == beta ? alpha.factorial() : 0.0;
}

} // namespace fpspec
