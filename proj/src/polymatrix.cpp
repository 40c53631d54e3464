#include "wavecone/polymatrix.hpp"

#include <json.hpp>

#include "wavecone/cone_analysis.hpp"
#include "wavecone/errors.hpp"

namespace wavecone {

using nlohmann::json;
using nlohmann::ordered_json;

bool PolyMatrix::is_zero() const {
    for (const auto& p : entries_)
        if (!p.is_zero()) return false;
    return true;
}

PolyMatrix PolyMatrix::transpose() const {
    PolyMatrix t(cols_, rows_, d_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
    return t;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const {
    if (cols_ != o.rows_ || d_ != o.d_) throw validation_error("polymatrix: product shape mismatch");
    PolyMatrix r(rows_, o.cols_, d_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < o.cols_; ++j) {
            Poly s(d_);
            for (int l = 0; l < cols_; ++l) s = s + at(i, l) * o.at(l, j);
            r.at(i, j) = s;
        }
    return r;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || d_ != o.d_)
        throw validation_error("polymatrix: difference shape mismatch");
    PolyMatrix r(rows_, cols_, d_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(i, j) = at(i, j) - o.at(i, j);
    return r;
}

PolyMatrix PolyMatrix::scaled(const Poly& p) const {
    PolyMatrix r(rows_, cols_, d_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(i, j) = at(i, j) * p;
    return r;
}

PolyMatrix PolyMatrix::identity(int n, int d) {
    PolyMatrix r(n, n, d);
    for (int i = 0; i < n; ++i) r.at(i, i) = Poly(d, Rational(1));
    return r;
}

MatrixXd PolyMatrix::eval(const std::vector<double>& xi) const {
    MatrixXd m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(i, j) = at(i, j).eval(xi);
    return m;
}

std::optional<int> PolyMatrix::homogeneity() const {
    std::optional<int> deg;
    for (const auto& p : entries_) {
        if (p.is_zero()) continue;
        auto h = p.homogeneous_degree();
        if (!h) return std::nullopt;
        if (!deg) deg = h;
        else if (*deg != *h) return std::nullopt;
    }
    return deg;
}

std::string PolyMatrix::to_json() const {
    ordered_json j;
    j["rows"] = rows_;
    j["cols"] = cols_;
    j["d"] = d_;
    j["entries"] = ordered_json::array();
    for (int i = 0; i < rows_; ++i)
        for (int c = 0; c < cols_; ++c) {
            if (at(i, c).is_zero()) continue;
            ordered_json e;
            e["row"] = i;
            e["col"] = c;
            e["terms"] = ordered_json::array();
            for (const auto& [a, coef] : at(i, c).terms()) {
                ordered_json t;
                t["alpha"] = a.entries;
                t["coeff"] = format_rational(coef);
                e["terms"].push_back(t);
            }
            j["entries"].push_back(e);
        }
    return j.dump(2);
}

PolyMatrix PolyMatrix::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw validation_error(std::string("polymatrix JSON parse error: ") + e.what());
    }
    try {
        PolyMatrix m(j.at("rows").get<int>(), j.at("cols").get<int>(), j.at("d").get<int>());
        for (const auto& e : j.at("entries")) {
            Poly p(m.dim());
            for (const auto& t : e.at("terms"))
                p.add_term(MultiIndex(t.at("alpha").get<std::vector<int>>()),
                           parse_rational(t.at("coeff").get<std::string>()));
            m.at(e.at("row").get<int>(), e.at("col").get<int>()) = p;
        }
        return m;
    } catch (const validation_error&) {
        throw;
    } catch (const std::exception& e) {
        throw validation_error(std::string("polymatrix JSON: ") + e.what());
    }
}

PolyMatrix reduced_symbol_matrix(const OperatorSpec& op) {
    PolyMatrix m(op.dimW, op.dimV, op.d);
    for (const auto& [alpha, mat] : op.coeffs)
        for (int i = 0; i < op.dimW; ++i)
            for (int j = 0; j < op.dimV; ++j)
                if (mat.at(i, j) != 0) m.at(i, j).add_term(alpha, mat.at(i, j));
    return m;
}

// ---- determinant / adjugate -------------------------------------------------

namespace {

Poly det_minor_expansion(const PolyMatrix& m, std::vector<int> rows, std::vector<int> cols) {
    const int n = static_cast<int>(rows.size());
    if (n == 1) return m.at(rows[0], cols[0]);
    Poly s(m.dim());
    for (int j = 0; j < n; ++j) {
        const Poly& pivot = m.at(rows[0], cols[static_cast<size_t>(j)]);
        if (pivot.is_zero()) continue;
        std::vector<int> sub_rows(rows.begin() + 1, rows.end());
        std::vector<int> sub_cols;
        for (int l = 0; l < n; ++l)
            if (l != j) sub_cols.push_back(cols[static_cast<size_t>(l)]);
        Poly minor = det_minor_expansion(m, sub_rows, sub_cols);
        s = (j % 2 == 0) ? s + pivot * minor : s - pivot * minor;
    }
    return s;
}

Poly det_bareiss(const PolyMatrix& m) {
    const int n = m.rows();
    std::vector<Poly> a(static_cast<size_t>(n) * n, Poly(m.dim()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] = m.at(i, j);
    auto at = [&](int i, int j) -> Poly& { return a[static_cast<size_t>(i) * n + j]; };

    Poly prev(m.dim(), Rational(1));
    int sign = 1;
    for (int p = 0; p < n - 1; ++p) {
        if (at(p, p).is_zero()) {
            int swap_row = -1;
            for (int i = p + 1; i < n; ++i)
                if (!at(i, p).is_zero()) { swap_row = i; break; }
            if (swap_row < 0) return Poly(m.dim());  // zero column below: singular
            for (int j = 0; j < n; ++j) std::swap(at(p, j), at(swap_row, j));
            sign = -sign;
        }
        // One-step fraction-free elimination; divisions are exact in the
        // polynomial ring.
        for (int i = p + 1; i < n; ++i)
            for (int j = p + 1; j < n; ++j)
                at(i, j) = (at(i, j) * at(p, p) - at(i, p) * at(p, j)).divide_exact(prev);
        prev = at(p, p);
    }
    Poly det = at(n - 1, n - 1);
    return sign == 1 ? det : -det;
}

} // namespace

Poly poly_det(const PolyMatrix& m) {
    if (m.rows() != m.cols()) throw precondition_error("poly_det: non-square matrix");
    if (m.rows() > 8) throw precondition_error("poly_det: size > 8 exceeds the combinatorial budget");
    std::vector<int> idx(static_cast<size_t>(m.rows()));
    for (int i = 0; i < m.rows(); ++i) idx[static_cast<size_t>(i)] = i;
    if (m.rows() <= 4) return det_minor_expansion(m, idx, idx);
    return det_bareiss(m);
}

PolyMatrix poly_adjugate(const PolyMatrix& m) {
    if (m.rows() != m.cols()) throw precondition_error("poly_adjugate: non-square matrix");
    if (m.rows() > 8) throw precondition_error("poly_adjugate: size > 8 exceeds the combinatorial budget");
    const int n = m.rows();
    PolyMatrix adj(n, n, m.dim());
    if (n == 1) {
        adj.at(0, 0) = Poly(m.dim(), Rational(1));  // empty minor convention
        return adj;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<int> rows, cols;
            for (int l = 0; l < n; ++l) {
                if (l != i) rows.push_back(l);
                if (l != j) cols.push_back(l);
            }
            Poly cof = det_minor_expansion(m, rows, cols);
            adj.at(j, i) = ((i + j) % 2 == 0) ? cof : -cof;  // transpose of cofactors
        }
    // adj(M) M = det(M) I must hold exactly.
    Poly det = poly_det(m);
    PolyMatrix check = adj * m - PolyMatrix::identity(n, m.dim()).scaled(det);
    if (!check.is_zero()) throw error("poly_adjugate: adjugate identity failed");
    return adj;
}

PolyMatrix laplacian_symbol(const OperatorSpec& opB) {
    PolyMatrix b = reduced_symbol_matrix(opB);
    return b.transpose() * b;
}

Annihilator annihilator(const OperatorSpec& opB) {
    const int dimU = opB.dimV;
    if (dimU > 4)
        throw precondition_error("annihilator: dim U > 4 exceeds the det/adj budget");
    if (2 * opB.k * dimU > 24)
        throw precondition_error("annihilator: symbol degree 2k*dimU > 24 exceeds the term budget");
    // Ellipticity gate: the adjugate formula needs B^T B invertible off 0.
    SphereSample sph = sphere_sample(opB.d, std::max(50, 4 * opB.d), 20240501);
    for (const auto& xi : sph.points)
        if (!kernel_basis(opB, xi).empty())
            throw precondition_error(
                "annihilator: operator is not elliptic (symbol has nontrivial kernel); "
                "the adjugate construction requires an elliptic operator");

    PolyMatrix b = reduced_symbol_matrix(opB);
    PolyMatrix q = b.transpose() * b;          // dimU x dimU, degree 2k
    Poly det = poly_det(q);                    // degree 2k*dimU
    PolyMatrix adj = poly_adjugate(q);         // degree 2k*(dimU-1)
    PolyMatrix sym =
        PolyMatrix::identity(opB.dimW, opB.d).scaled(det) - b * adj * b.transpose();

    if (!(sym * b).is_zero())
        throw error("annihilator: symbolic annihilation A*B != 0");  // unreachable: adjugate identity

    Annihilator out;
    out.symbol = sym;
    out.order = 2 * opB.k * dimU;
    out.op = operator_from_symbol(sym);
    if (out.op.k != out.order) throw error("annihilator: order bookkeeping mismatch");
    return out;
}

PolyMatrix iterated_laplacian(const OperatorSpec& opA, int r) {
    if (r < 1) throw precondition_error("iterated_laplacian: r must be >= 1");
    // result degree k*2^r; keep the exact arithmetic within a sane budget
    if (opA.k * (1 << r) > 32)
        throw precondition_error("iterated_laplacian: degree k*2^r > 32 exceeds the term budget");
    PolyMatrix a = reduced_symbol_matrix(opA);
    PolyMatrix m = a.transpose() * a;
    PolyMatrix acc = m;
    for (int i = 1; i < (1 << (r - 1)); ++i) acc = acc * m;
    return acc;
}

int minimal_iteration_order(int k, int d) {
    if (k < 1 || d < 1) throw validation_error("minimal_iteration_order: need k, d >= 1");
    int r = 1;
    while ((static_cast<long long>(k) << r) <= d) ++r;
    return r;
}

OperatorSpec operator_from_symbol(const PolyMatrix& symbol) {
    auto deg = symbol.homogeneity();
    if (!deg || *deg < 1)
        throw precondition_error("operator_from_symbol: symbol must be homogeneous of degree >= 1");
    std::map<MultiIndex, RatMatrix> coeffs;
    for (int i = 0; i < symbol.rows(); ++i)
        for (int j = 0; j < symbol.cols(); ++j)
            for (const auto& [alpha, c] : symbol.at(i, j).terms()) {
                auto [it, fresh] =
                    coeffs.try_emplace(alpha, RatMatrix(symbol.rows(), symbol.cols()));
                it->second.at(i, j) = c;
            }
    return OperatorSpec(symbol.dim(), *deg, symbol.cols(), symbol.rows(), std::move(coeffs));
}

} // namespace wavecone
