#include "wavecone/poly.hpp"

#include <sstream>

namespace wavecone {

int Poly::degree() const {
    int deg = -1;
    for (const auto& [a, c] : terms_) deg = std::max(deg, a.modulus());
    return deg;
}

std::optional<int> Poly::homogeneous_degree() const {
    std::optional<int> deg;
    for (const auto& [a, c] : terms_) {
        if (!deg) deg = a.modulus();
        else if (*deg != a.modulus()) return std::nullopt;
    }
    return deg;
}

void Poly::add_term(const MultiIndex& alpha, const Rational& c) {
    if (alpha.dim() != d_) throw validation_error("poly: term dimension mismatch");
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(alpha, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly Poly::operator+(const Poly& o) const {
    check_dim(o);
    Poly r = *this;
    for (const auto& [a, c] : o.terms_) r.add_term(a, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    check_dim(o);
    Poly r = *this;
    for (const auto& [a, c] : o.terms_) r.add_term(a, -c);
    return r;
}

Poly Poly::operator-() const {
    Poly r(d_);
    for (const auto& [a, c] : terms_) r.terms_.emplace(a, -c);
    return r;
}

Poly Poly::operator*(const Rational& s) const {
    Poly r(d_);
    if (s == 0) return r;
    for (const auto& [a, c] : terms_) r.terms_.emplace(a, c * s);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    check_dim(o);
    Poly r(d_);
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : o.terms_) r.add_term(a + b, ca * cb);
    return r;
}

double Poly::eval(const std::vector<double>& xi) const {
    double s = 0.0;
    for (const auto& [a, c] : terms_) s += to_double(c) * monomial_eval(a, xi);
    return s;
}

Rational Poly::eval_exact(const std::vector<Rational>& xi) const {
    Rational s = 0;
    for (const auto& [a, c] : terms_) {
        Rational m = c;
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a[i]; ++j) m *= xi[static_cast<size_t>(i)];
        s += m;
    }
    return s;
}

Poly Poly::divide_exact(const Poly& g) const {
    check_dim(g);
    if (g.is_zero()) throw precondition_error("poly: division by zero polynomial");
    // Lex leading-term division. When g | f each step peels off one term of
    // the quotient: LT(f) = LT(q) LT(g) because lex order is multiplicative.
    Poly f = *this;
    Poly q(d_);
    const auto& glead = *g.terms_.rbegin();
    while (!f.is_zero()) {
        const auto& flead = *f.terms_.rbegin();
        std::vector<int> diff(static_cast<size_t>(d_));
        for (int i = 0; i < d_; ++i) {
            diff[static_cast<size_t>(i)] = flead.first[i] - glead.first[i];
            if (diff[static_cast<size_t>(i)] < 0)
                throw precondition_error("poly: inexact division");
        }
        MultiIndex t(std::move(diff));
        Rational c = flead.second / glead.second;
        q.add_term(t, c);
        f = f - g * Poly(t, c);
    }
    return q;
}

std::string Poly::str(const std::vector<std::string>& var_names) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [a, c] = *it;
        if (!first) os << " + ";
        first = false;
        os << format_rational(c);
        for (int i = 0; i < d_; ++i) {
            if (a[i] == 0) continue;
            std::string v = i < static_cast<int>(var_names.size())
                                ? var_names[static_cast<size_t>(i)]
                                : "x" + std::to_string(i + 1);
            os << "*" << v;
            if (a[i] > 1) os << "^" << a[i];
        }
    }
    return os.str();
}

} // namespace wavecone
