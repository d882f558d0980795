#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <vector>

namespace fpspec {

/// alpha in N_0^d. Ordered gradedly: by order |alpha| first, then
/// lexicographically descending, so (2,0) < (1,1) < (0,2).
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> entries);
    MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

    static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(dim), 0)); }
    static MultiIndex unit(int dim, int j);

    int dim() const noexcept { return static_cast<int>(entries_.size()); }
    int order() const noexcept { return order_; }
    int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& entries() const noexcept { return entries_; }

    /// alpha! = prod alpha_i!
    double factorial() const;

    MultiIndex plus_unit(int j) const;
    /// Requires entry j >= 1.
    MultiIndex minus_unit(int j) const;

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.entries_ == b.entries_; }
    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);

private:
    std::vector<int> entries_;
    int order_ = 0;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& alpha);

/// All alpha with |alpha| = m, in graded lexicographic order.
std::vector<MultiIndex> enumerate_indices(int dim, int m);

/// binomial(m + d - 1, d - 1)
std::int64_t block_size(int dim, int m);

/// <h_alpha, h_beta> in L^2(f_inf^{-1}) = alpha! delta_{alpha,beta}.
double inner_product(const MultiIndex& alpha, const MultiIndex& beta);

} // namespace fpspec
