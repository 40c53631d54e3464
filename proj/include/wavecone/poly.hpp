#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavecone/multiindex.hpp"
#include "wavecone/rational.hpp"

namespace wavecone {

/// Multivariate polynomial with exact rational coefficients.
/// Terms are kept in canonical lex order; zero coefficients are never stored.
class Poly {
public:
    Poly() = default;
    explicit Poly(int d) : d_(d) {
        if (d < 1) throw validation_error("poly: d must be >= 1");
    }
    Poly(int d, const Rational& c) : Poly(d) {
        if (c != 0) terms_.emplace(MultiIndex(std::vector<int>(static_cast<size_t>(d), 0)), c);
    }
    /// Single monomial c * xi^alpha.
    Poly(const MultiIndex& alpha, const Rational& c) : d_(alpha.dim()) {
        if (c != 0) terms_.emplace(alpha, c);
    }

    int dim() const { return d_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<MultiIndex, Rational>& terms() const { return terms_; }

    /// Total degree of the polynomial (-1 for the zero polynomial).
    int degree() const;
    /// Common degree when every term has it, nullopt otherwise.
    std::optional<int> homogeneous_degree() const;

    void add_term(const MultiIndex& alpha, const Rational& c);

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator-() const;
    Poly operator*(const Rational& c) const;
    friend bool operator==(const Poly& a, const Poly& b) = default;

    double eval(const std::vector<double>& xi) const;
    Rational eval_exact(const std::vector<Rational>& xi) const;

    /// Exact quotient this / g. Throws precondition_error when g does not
    /// divide exactly (used by fraction-free elimination where divisibility
    /// is guaranteed).
    Poly divide_exact(const Poly& g) const;

    std::string str(const std::vector<std::string>& var_names = {}) const;

private:
    void check_dim(const Poly& o) const {
        if (d_ != o.d_) throw validation_error("poly: mixed variable counts");
    }
    int d_ = 1;
    std::map<MultiIndex, Rational> terms_;
};

} // namespace wavecone
