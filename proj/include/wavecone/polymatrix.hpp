#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavecone/operator_spec.hpp"
#include "wavecone/poly.hpp"

namespace wavecone {

/// Matrix of multivariate polynomials with exact rational coefficients.
class PolyMatrix {
public:
    PolyMatrix() = default;
    PolyMatrix(int rows, int cols, int d)
        : rows_(rows), cols_(cols), d_(d),
          entries_(static_cast<size_t>(rows) * cols, Poly(d)) {
        if (rows < 1 || cols < 1) throw validation_error("polymatrix: empty shape");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int dim() const { return d_; }

    Poly& at(int i, int j) { return entries_[static_cast<size_t>(i) * cols_ + j]; }
    const Poly& at(int i, int j) const { return entries_[static_cast<size_t>(i) * cols_ + j]; }

    bool is_zero() const;
    PolyMatrix transpose() const;
    PolyMatrix operator*(const PolyMatrix& o) const;
    PolyMatrix operator-(const PolyMatrix& o) const;
    /// Scales every entry by a polynomial.
    PolyMatrix scaled(const Poly& p) const;
    friend bool operator==(const PolyMatrix&, const PolyMatrix&) = default;

    static PolyMatrix identity(int n, int d);

    MatrixXd eval(const std::vector<double>& xi) const;

    /// Common homogeneity degree of all nonzero entries (per-term audit),
    /// nullopt when entries are inhomogeneous or of mixed degree.
    std::optional<int> homogeneity() const;

    std::string to_json() const;
    static PolyMatrix from_json(const std::string& text);

private:
    int rows_ = 0, cols_ = 0, d_ = 1;
    std::vector<Poly> entries_;
};

/// Reduced symbol of an operator as an exact polynomial matrix.
PolyMatrix reduced_symbol_matrix(const OperatorSpec& op);

/// Exact determinant. Fraction-free Bareiss elimination over the polynomial
/// ring for sizes 5..8, cofactor (minor) expansion for sizes <= 4.
/// Throws on non-square input or size > 8.
Poly poly_det(const PolyMatrix& m);

/// Adjugate: transpose of the cofactor matrix. The identity
/// adj(M) * M = det(M) * I is verified exactly before returning.
PolyMatrix poly_adjugate(const PolyMatrix& m);

/// Reduced symbol of the generalized Laplacian B^T B; homogeneous of
/// degree 2k and symmetric. With the reduced-symbol convention the formal
/// adjoint acts as a plain transpose at the polynomial level: the
/// (2 pi i)^k factors of B* and B multiply to the positive real (2 pi)^{2k},
/// so B* B carries no scalar factor over the rationals.
PolyMatrix laplacian_symbol(const OperatorSpec& opB);

struct Annihilator {
    OperatorSpec op;      ///< reconstructed operator, order 2k*dimU
    PolyMatrix symbol;    ///< det(B^T B) I - B adj(B^T B) B^T
    int order = 0;
};

/// Adjugate annihilator of an elliptic operator B. The returned symbol A
/// satisfies A * B = 0 as an exact polynomial identity (checked), and
/// ker A(xi) = im B(xi) for xi != 0. Requires B elliptic (verified on a
/// frequency sample) and the size budget dim U <= 4, 2k*dimU <= 24.
Annihilator annihilator(const OperatorSpec& opB);

/// [A^T A]^(2^(r-1)) as an exact polynomial matrix; r = 1 returns A^T A.
/// The kernel at every xi != 0 equals ker A(xi).
PolyMatrix iterated_laplacian(const OperatorSpec& opA, int r);

/// Smallest r with 2^r * k > d: iterating that many times lifts the order
/// of the square above the dimension.
int minimal_iteration_order(int k, int d);

/// Rebuilds an OperatorSpec from a polynomial symbol matrix, reading off
/// one coefficient matrix per monomial. Requires a homogeneous symbol.
OperatorSpec operator_from_symbol(const PolyMatrix& symbol);

} // namespace wavecone
