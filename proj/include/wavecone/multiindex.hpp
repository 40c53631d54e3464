#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "wavecone/errors.hpp"

namespace wavecone {

/// Multi-index alpha = (alpha_1,...,alpha_d) of non-negative integers.
/// Ordered lexicographically; the ordering fixes the canonical serialization
/// of operator specs and polynomials.
struct MultiIndex {
    std::vector<int> entries;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {
        for (int a : entries)
            if (a < 0) throw validation_error("multi-index entries must be non-negative");
    }

    int dim() const { return static_cast<int>(entries.size()); }
    int modulus() const { return std::accumulate(entries.begin(), entries.end(), 0); }
    int operator[](int i) const { return entries[static_cast<size_t>(i)]; }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;
    friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) {
        return a.entries <=> b.entries;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        if (dim() != o.dim()) throw validation_error("multi-index dimension mismatch");
        std::vector<int> e(entries);
        for (size_t i = 0; i < e.size(); ++i) e[i] += o.entries[i];
        return MultiIndex(std::move(e));
    }
};

/// All multi-indices in dimension d with modulus exactly k, in lex order.
inline std::vector<MultiIndex> multi_indices_of_modulus(int d, int k) {
    if (d < 1 || k < 0) throw validation_error("multi_indices_of_modulus: need d >= 1, k >= 0");
    std::vector<MultiIndex> out;
    std::vector<int> cur(static_cast<size_t>(d), 0);
    // Ascending depth-first emits lex order directly.
    auto rec = [&](auto&& self, int pos, int rem) -> void {
        if (pos == d - 1) {
            cur[static_cast<size_t>(pos)] = rem;
            out.emplace_back(cur);
            return;
        }
        for (int a = 0; a <= rem; ++a) {
            cur[static_cast<size_t>(pos)] = a;
            self(self, pos + 1, rem - a);
        }
    };
    rec(rec, 0, k);
    return out;
}

/// xi^alpha for a real vector xi.
inline double monomial_eval(const MultiIndex& alpha, const std::vector<double>& xi) {
    double p = 1.0;
    for (int i = 0; i < alpha.dim(); ++i)
        for (int j = 0; j < alpha[i]; ++j) p *= xi[static_cast<size_t>(i)];
    return p;
}

} // namespace wavecone
