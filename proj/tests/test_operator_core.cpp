#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <wavecone/operator_spec.hpp>
#include <wavecone/rng.hpp>

using namespace wavecone;

namespace {

VectorXd vec2(double a, double b) {
    VectorXd v(2);
    v << a, b;
    return v;
}

OperatorSpec random_operator(int d, int k, int dimV, int dimW, Rng& rng) {
    std::map<MultiIndex, RatMatrix> coeffs;
    for (const auto& alpha : multi_indices_of_modulus(d, k)) {
        RatMatrix m(dimW, dimV);
        for (auto& e : m.data) e = Rational(static_cast<long>(rng.below(7)) - 3);
        if (!m.is_zero()) coeffs.emplace(alpha, std::move(m));
    }
    if (coeffs.empty()) {
        RatMatrix m(dimW, dimV);
        m.at(0, 0) = 1;
        coeffs.emplace(multi_indices_of_modulus(d, k)[0], std::move(m));
    }
    return OperatorSpec(d, k, dimV, dimW, std::move(coeffs));
}

} // namespace

TEST_CASE("multi-index enumeration is lex ordered and complete") {
    auto idx = multi_indices_of_modulus(3, 2);
    CHECK(idx.size() == 6);  // C(3+2-1, 2)
    for (size_t i = 0; i + 1 < idx.size(); ++i) CHECK(idx[i] < idx[i + 1]);
    for (const auto& a : idx) CHECK(a.modulus() == 2);
}

TEST_CASE("symbol_eval: gradient column at (1,0)") {
    auto grad = builtin_operator("gradient", 2, 1);
    CHECK(grad.d == 2);
    CHECK(grad.k == 1);
    CHECK(grad.dimV == 1);
    CHECK(grad.dimW == 2);
    auto sv = symbol_eval(grad, vec2(1, 0), true);
    CHECK(sv.matrix(0, 0).real() == doctest::Approx(1.0));
    CHECK(sv.matrix(1, 0).real() == doctest::Approx(0.0));
}

TEST_CASE("symbol_eval: zero frequency gives the zero matrix") {
    auto div = builtin_operator("divergence_rows", 2);
    auto sv = symbol_eval(div, vec2(0, 0), false);
    CHECK(sv.matrix.norm() == 0.0);
}

TEST_CASE("symbol_eval: divergence of rows is M xi") {
    auto div = builtin_operator("divergence_rows", 2);
    MatrixXd sym = div.reduced_symbol(vec2(0, 1));
    Eigen::Vector4d m_flat(1, 2, 3, 4);  // [[1,2],[3,4]] row-major
    VectorXd out = sym * m_flat;
    CHECK(out(0) == doctest::Approx(2.0));
    CHECK(out(1) == doctest::Approx(4.0));
}

TEST_CASE("full symbol carries (2 pi i)^k") {
    auto grad = builtin_operator("gradient", 2, 1);
    auto sv = symbol_eval(grad, vec2(1, 0), false);
    CHECK(sv.matrix(0, 0).real() == doctest::Approx(0.0));
    CHECK(sv.matrix(0, 0).imag() == doctest::Approx(2.0 * M_PI));
}

TEST_CASE("adjoint: gradient becomes a row, involution, self-adjoint laplacian") {
    auto grad = builtin_operator("gradient", 2, 1);
    auto adj = adjoint(grad);
    CHECK(adj.dimV == 2);
    CHECK(adj.dimW == 1);
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        VectorXd xi = vec2(rng.gaussian(), rng.gaussian());
        MatrixXd a = adj.reduced_symbol(xi);
        MatrixXd g = grad.reduced_symbol(xi);
        CHECK((a - g.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    }
    CHECK(adjoint(adj).coeffs == grad.coeffs);

    auto lap = builtin_operator("laplacian", 3, 2);
    CHECK(adjoint(lap).coeffs == lap.coeffs);
}

TEST_CASE("adjoint full symbols are conjugate transposes up to the (-1)^k parity") {
    Rng rng(17);
    for (int k : {2, 3}) {
        auto op = random_operator(2, k, 2, 3, rng);
        auto adj = adjoint(op);
        double parity = (k % 2 == 0) ? 1.0 : -1.0;
        for (int trial = 0; trial < 10; ++trial) {
            VectorXd xi = vec2(rng.gaussian(), rng.gaussian());
            MatrixXc a = adj.full_symbol(xi);
            MatrixXc b = op.full_symbol(xi);
            CHECK((a - parity * b.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + b.norm()));
        }
    }
}

TEST_CASE("compose: divergence of gradient is the laplacian symbol") {
    auto div = builtin_operator("divergence_rows", 2);
    auto grad = builtin_operator("gradient", 2, 2);
    auto comp = compose(div, grad);
    CHECK(comp.k == 2);
    CHECK(comp.dimV == 2);
    CHECK(comp.dimW == 2);
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        VectorXd xi = vec2(rng.gaussian(), rng.gaussian());
        MatrixXd got = comp.reduced_symbol(xi);
        MatrixXd want = xi.squaredNorm() * MatrixXd::Identity(2, 2);
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + want.norm()));
    }
}

TEST_CASE("compose: symbol product at 50 random frequencies") {
    Rng rng(11);
    auto outer = random_operator(2, 2, 3, 2, rng);
    auto inner = random_operator(2, 1, 2, 3, rng);
    auto comp = compose(outer, inner);
    for (int trial = 0; trial < 50; ++trial) {
        VectorXd xi = vec2(rng.gaussian(), rng.gaussian());
        MatrixXd got = comp.reduced_symbol(xi);
        MatrixXd want = outer.reduced_symbol(xi) * inner.reduced_symbol(xi);
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("compose rejects dimension mismatch; order-0 specs cannot exist") {
    auto div = builtin_operator("divergence_rows", 2);
    auto grad = builtin_operator("gradient", 2, 1);  // target dim 2 != div source dim 4
    CHECK_THROWS_AS(compose(div, grad), validation_error);
    // homogeneous order >= 1 is enforced at construction: no identity lift
    std::map<MultiIndex, RatMatrix> c;
    RatMatrix m(1, 1);
    m.at(0, 0) = 1;
    c.emplace(MultiIndex(std::vector<int>{0, 0}), std::move(m));
    CHECK_THROWS_AS(OperatorSpec(2, 0, 1, 1, std::move(c)), validation_error);
}

TEST_CASE("k-homogeneity of symbols") {
    Rng rng(23);
    std::vector<OperatorSpec> ops = {
        builtin_operator("gradient", 2, 1), builtin_operator("divergence_rows", 3),
        builtin_operator("curl", 2, 2), builtin_operator("symmetric_gradient", 2),
        builtin_operator("laplacian", 2, 1), random_operator(3, 2, 2, 2, rng)};
    for (const auto& op : ops) {
        for (int trial = 0; trial < 10; ++trial) {
            VectorXd xi(op.d);
            for (int i = 0; i < op.d; ++i) xi(i) = rng.gaussian();
            double t = 0.25 + 2.0 * rng.uniform();
            MatrixXd a = op.reduced_symbol((t * xi).eval());
            MatrixXd b = std::pow(t, op.k) * op.reduced_symbol(xi);
            CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + b.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("builtin catalog shapes") {
    auto div3 = builtin_operator("divergence_rows", 3);
    CHECK(div3.dimV == 9);
    CHECK(div3.dimW == 3);
    CHECK(div3.k == 1);

    auto sg = builtin_operator("symmetric_gradient", 2);
    CHECK(sg.dimV == 2);
    CHECK(sg.dimW == 4);
    Rng rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        VectorXd xi = vec2(rng.gaussian(), rng.gaussian());
        VectorXd a = vec2(rng.gaussian(), rng.gaussian());
        VectorXd out = sg.reduced_symbol(xi) * a;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(out(i * 2 + j) ==
                      doctest::Approx(0.5 * (a(i) * xi(j) + a(j) * xi(i))).epsilon(1e-12));
    }

    auto hess = builtin_operator("hessian_k", 2, 1, 2);
    CHECK(hess.k == 2);
    CHECK(hess.dimW == 3);  // multi-indices of modulus 2 in d = 2

    CHECK_THROWS_AS(builtin_operator("no_such_op", 2), validation_error);
    CHECK_THROWS_AS(builtin_operator("gradient", 0), validation_error);
}

TEST_CASE("curl kernel at (1,0) is the first axis") {
    auto curl = builtin_operator("curl", 2, 1);
    MatrixXd sym = curl.reduced_symbol(vec2(1, 0));
    // kernel is span{(1,0)}: symbol kills e1, not e2
    CHECK((sym * vec2(1, 0)).norm() <= 1e-14);
    CHECK((sym * vec2(0, 1)).norm() > 0.5);
}

TEST_CASE("builtin references parse") {
    auto op = parse_builtin_ref("builtin:gradient?d=2&m=1");
    CHECK(op.dimW == 2);
    auto h = parse_builtin_ref("builtin:hessian_k?d=3&m=2&k=2");
    CHECK(h.k == 2);
    CHECK_THROWS_AS(parse_builtin_ref("builtin:gradient"), validation_error);
    CHECK_THROWS_AS(parse_builtin_ref("builtin:gradient?d=two"), validation_error);
}

TEST_CASE("operator JSON round-trips canonically") {
    Rng rng(37);
    auto op = random_operator(2, 2, 2, 3, rng);
    auto back = operator_from_json(op.to_json());
    CHECK(back.d == op.d);
    CHECK(back.k == op.k);
    CHECK(back.coeffs == op.coeffs);
    CHECK(back.hash() == op.hash());
    CHECK(back.to_json() == op.to_json());

    CHECK_THROWS_AS(operator_from_json("{not json"), validation_error);
    CHECK_THROWS_AS(operator_from_json(R"({"d":2,"k":1,"dimV":1,"dimW":2,"coeffs":[]})"),
                    validation_error);  // zero operator rejected at load
}

TEST_CASE("gradient symbol is injective away from zero") {
    auto grad = builtin_operator("gradient", 2, 1);
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        VectorXd xi = vec2(rng.gaussian(), rng.gaussian());
        if (xi.norm() < 1e-6) continue;
        MatrixXd sym = grad.reduced_symbol(xi);
        CHECK(sym.jacobiSvd().singularValues().minCoeff() > 1e-8 * xi.norm());
    }
}
