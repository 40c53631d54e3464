#include "wavecone/spectral.hpp"

#include <Eigen/Cholesky>

#include <cmath>

#include "wavecone/errors.hpp"
#include "wavecone/rng.hpp"

namespace wavecone {

namespace {

bool is_zero_freq(const std::vector<int>& zeta) {
    for (int z : zeta) if (z != 0) return false;
    return true;
}

std::vector<int> lattice_freq(const TorusGrid& g, size_t flat) {
    auto idx = g.unflat(flat);
    std::vector<int> zeta(static_cast<size_t>(g.d));
    for (int i = 0; i < g.d; ++i) zeta[static_cast<size_t>(i)] = g.freq_of_index(idx[static_cast<size_t>(i)]);
    return zeta;
}

double lattice_norm2(const std::vector<int>& zeta) {
    double s = 0.0;
    for (int z : zeta) s += static_cast<double>(z) * z;
    return s;
}

} // namespace

TorusField apply_multiplier(const TorusField& f, const MultiplierFn& m) {
    if (m.dimV != f.dimV) throw validation_error("apply_multiplier: dimV mismatch");
    TorusField spec = forward_fft(f);
    TorusField out_spec(f.grid, m.dimW);
    Eigen::VectorXcd in(f.dimV), out(m.dimW);
    const int nyquist = -f.grid.n / 2;
    for (size_t site = 0; site < f.grid.sites(); ++site) {
        auto zeta = lattice_freq(f.grid, site);
        if (m.zero_nyquist) {
            bool on_ring = false;
            for (int z : zeta) on_ring = on_ring || z == nyquist;
            if (on_ring) continue;  // out_spec stays zero there
        }
        MatrixXc mat;
        if (is_zero_freq(zeta)) {
            switch (m.zero_mode) {
                case MultiplierFn::ZeroMode::identity:
                    if (m.dimV != m.dimW)
                        throw validation_error("apply_multiplier: identity zero mode needs dimV == dimW");
                    mat = MatrixXc::Identity(m.dimW, m.dimV);
                    break;
                case MultiplierFn::ZeroMode::zero:
                    mat = MatrixXc::Zero(m.dimW, m.dimV);
                    break;
                case MultiplierFn::ZeroMode::custom:
                    mat = m.zero_matrix;
                    break;
            }
        } else {
            mat = m.evaluator(zeta);
            if (!mat.allFinite())
                throw error("apply_multiplier: non-finite multiplier value at a needed frequency");
        }
        for (int c = 0; c < f.dimV; ++c) in(c) = spec.at(site, c);
        out = mat * in;
        for (int c = 0; c < m.dimW; ++c) out_spec.at(site, c) = out(c);
    }
    return backward_fft(out_spec);
}

TorusField apply_operator(const OperatorSpec& op, const TorusField& f) {
    if (op.dimV != f.dimV) throw validation_error("apply_operator: field dimV != operator dimV");
    MultiplierFn m;
    m.dimV = op.dimV;
    m.dimW = op.dimW;
    m.zero_mode = MultiplierFn::ZeroMode::custom;
    m.zero_matrix = MatrixXc::Zero(op.dimW, op.dimV);  // k >= 1 homogeneous: symbol vanishes at 0
    m.zero_nyquist = true;
    m.evaluator = [&op](const std::vector<int>& zeta) {
        VectorXd xi(zeta.size());
        for (size_t i = 0; i < zeta.size(); ++i) xi(static_cast<Eigen::Index>(i)) = zeta[i];
        return op.full_symbol(xi);
    };
    return apply_multiplier(f, m);
}

double bessel_norm(const TorusField& f, double s, double q) {
    if (!(q > 1.0) || !std::isfinite(q)) throw precondition_error("bessel_norm: q must lie in (1, inf)");
    MultiplierFn m;
    m.dimV = m.dimW = f.dimV;
    m.zero_mode = MultiplierFn::ZeroMode::custom;
    m.zero_matrix = MatrixXc::Identity(f.dimV, f.dimV);  // (1 + 0)^{s/2}
    m.evaluator = [s, dim = f.dimV](const std::vector<int>& zeta) {
        double w = std::pow(1.0 + 4.0 * M_PI * M_PI * lattice_norm2(zeta), s / 2.0);
        return (w * MatrixXc::Identity(dim, dim)).eval();
    };
    return lq_norm(apply_multiplier(f, m), q);
}

TorusField riesz_potential(const TorusField& f, double s) {
    if (s <= 0.0 || s >= f.grid.d) throw precondition_error("riesz_potential: s must lie in (0, d)");
    MultiplierFn m;
    m.dimV = m.dimW = f.dimV;
    m.zero_mode = MultiplierFn::ZeroMode::zero;
    m.evaluator = [s, dim = f.dimV](const std::vector<int>& zeta) {
        double w = std::pow(4.0 * M_PI * M_PI * lattice_norm2(zeta), -s / 2.0);
        return (w * MatrixXc::Identity(dim, dim)).eval();
    };
    return apply_multiplier(f, m);
}

TorusField solve_laplace(const OperatorSpec& opB, const TorusField& f) {
    if (opB.dimV != f.dimV) throw validation_error("solve_laplace: field dimV != operator source dim");
    MultiplierFn m;
    m.dimV = m.dimW = opB.dimV;
    m.zero_mode = MultiplierFn::ZeroMode::identity;  // (Id + 0)^{-1}
    m.evaluator = [&opB](const std::vector<int>& zeta) {
        VectorXd xi(zeta.size());
        for (size_t i = 0; i < zeta.size(); ++i) xi(static_cast<Eigen::Index>(i)) = zeta[i];
        // B^* B = (2 pi)^{2k} P^T P with P the reduced symbol: real SPD + Id.
        MatrixXd p = opB.reduced_symbol(xi);
        MatrixXd mat = MatrixXd::Identity(opB.dimV, opB.dimV) +
                       std::pow(2.0 * M_PI, 2 * opB.k) * (p.transpose() * p);
        return MatrixXc(mat.llt().solve(MatrixXd::Identity(opB.dimV, opB.dimV)).cast<Complex>());
    };
    return apply_multiplier(f, m);
}

TorusField spectral_derivative(const TorusField& f, const MultiIndex& alpha) {
    if (alpha.dim() != f.grid.d) throw validation_error("spectral_derivative: multi-index dim mismatch");
    MultiplierFn m;
    m.dimV = m.dimW = f.dimV;
    m.zero_mode = (alpha.modulus() == 0) ? MultiplierFn::ZeroMode::identity
                                         : MultiplierFn::ZeroMode::zero;
    m.zero_nyquist = true;
    m.evaluator = [alpha, dim = f.dimV](const std::vector<int>& zeta) {
        Complex w(1.0, 0.0);
        const Complex two_pi_i(0.0, 2.0 * M_PI);
        for (int i = 0; i < alpha.dim(); ++i)
            for (int j = 0; j < alpha[i]; ++j) w *= two_pi_i * static_cast<double>(zeta[static_cast<size_t>(i)]);
        return (w * MatrixXc::Identity(dim, dim)).eval();
    };
    return apply_multiplier(f, m);
}

double Perturbation::sup_norm() const {
    double m = 0.0;
    for (const auto& [alpha, field] : coeffs)
        for (size_t site = 0; site < field.grid.sites(); ++site) {
            // spectral norm bound via Frobenius norm of the site matrix
            double fro = field.value_norm(site);
            m = std::max(m, fro);
        }
    return m;
}

namespace {

/// R[u] = sum_alpha R_alpha(x) d^alpha u, derivatives spectral, products pointwise.
TorusField apply_perturbation(const Perturbation& R, const TorusField& u) {
    TorusField acc(u.grid, u.dimV);
    for (const auto& [alpha, coef] : R.coeffs) {
        if (coef.dimV != u.dimV * u.dimV)
            throw validation_error("perturbation: coefficient field must hold dimU x dimU matrices");
        TorusField du = spectral_derivative(u, alpha);
        for (size_t site = 0; site < u.grid.sites(); ++site)
            for (int i = 0; i < u.dimV; ++i) {
                Complex s(0.0, 0.0);
                for (int j = 0; j < u.dimV; ++j) s += coef.at(site, i * u.dimV + j) * du.at(site, j);
                acc.at(site, i) += s;
            }
    }
    return acc;
}

double l2_norm(const TorusField& f) { return lq_norm(f, 2.0); }

} // namespace

PerturbedSolution solve_perturbed(const OperatorSpec& opB, const Perturbation& R,
                                  const TorusField& f, double tol, int max_iter) {
    for (const auto& [alpha, coef] : R.coeffs)
        if (alpha.modulus() != 2 * opB.k)
            throw validation_error("solve_perturbed: perturbation coefficients must have |alpha| = 2k");

    PerturbedSolution sol;
    TorusField u = solve_laplace(opB, f);
    sol.iterations = 1;
    double f_norm = l2_norm(f);
    double u0_norm = l2_norm(u);
    double prev_diff = 0.0;
    if (!R.coeffs.empty()) {
        for (int it = 0; it < max_iter; ++it) {
            TorusField rhs = f;
            rhs += apply_perturbation(R, u);
            TorusField next = solve_laplace(opB, rhs);
            double diff = l2_norm(next - u);
            ++sol.iterations;
            if (prev_diff > 0.0) sol.contraction = diff / prev_diff;
            prev_diff = diff;
            u = next;
            if (diff <= tol) break;
            if (l2_norm(u) > 2.0 * std::max(u0_norm, 1e-300)) {
                double c = sol.contraction > 0.0 ? sol.contraction : 2.0;
                throw divergence_error(
                    "solve_perturbed: iteration diverged (measured contraction " +
                        std::to_string(c) + " >= 1); the coefficient smallness condition fails",
                    c);
            }
        }
    }
    // residual of the full equation
    TorusField lhs = u;
    {
        // (Id + B^*B) u  computed spectrally
        MultiplierFn m;
        m.dimV = m.dimW = opB.dimV;
        m.zero_mode = MultiplierFn::ZeroMode::identity;
        m.evaluator = [&opB](const std::vector<int>& zeta) {
            VectorXd xi(zeta.size());
            for (size_t i = 0; i < zeta.size(); ++i) xi(static_cast<Eigen::Index>(i)) = zeta[i];
            MatrixXd p = opB.reduced_symbol(xi);
            MatrixXd mat = MatrixXd::Identity(opB.dimV, opB.dimV) +
                           std::pow(2.0 * M_PI, 2 * opB.k) * (p.transpose() * p);
            return MatrixXc(mat.cast<Complex>());
        };
        lhs = apply_multiplier(u, m);
    }
    if (!R.coeffs.empty()) lhs = lhs - apply_perturbation(R, u);
    sol.residual = l2_norm(lhs - f);
    sol.relative_residual = f_norm > 0.0 ? sol.residual / f_norm : sol.residual;
    sol.u = std::move(u);
    return sol;
}

MultiplierFn projection_multiplier(const OperatorSpec& op, double rank_tol) {
    MultiplierFn m;
    m.dimV = m.dimW = op.dimV;
    m.zero_mode = MultiplierFn::ZeroMode::identity;
    m.evaluator = [&op, rank_tol](const std::vector<int>& zeta) {
        VectorXd xi(zeta.size());
        for (size_t i = 0; i < zeta.size(); ++i) xi(static_cast<Eigen::Index>(i)) = zeta[i];
        return MatrixXc(projection_symbol(op, xi, rank_tol).cast<Complex>());
    };
    return m;
}

Representative a_representative(const OperatorSpec& op, const TorusField& u, double rank_tol) {
    Representative rep;
    rep.constant_rank = rank_profile(op, sphere_sample(op.d, std::max(40, 4 * op.d), 7), rank_tol)
                            .is_constant_rank;
    rep.field = apply_multiplier(u, projection_multiplier(op, rank_tol));
    return rep;
}

// ---- fundamental kernel -------------------------------------------------------

namespace {

/// Quintic taper: 1 on [0, a], 0 on [b, inf), C^2 in between.
double smooth_cutoff(double rho, double a, double b) {
    if (rho <= a) return 1.0;
    if (rho >= b) return 0.0;
    double s = (rho - a) / (b - a);
    return 1.0 - (10.0 * s * s * s - 15.0 * s * s * s * s + 6.0 * s * s * s * s * s);
}

} // namespace

MatrixXd KernelEval::matrix_at(const std::vector<double>& x) const {
    const TorusGrid& g = samples.grid;
    std::vector<int> idx(static_cast<size_t>(g.d));
    for (int i = 0; i < g.d; ++i) {
        double xi = x[static_cast<size_t>(i)];
        // centered box coordinate -> grid index (fftshift convention)
        long raw = std::lround(xi * g.n);
        idx[static_cast<size_t>(i)] = static_cast<int>(((raw % g.n) + g.n) % g.n);
    }
    size_t site = g.flat(idx);
    MatrixXd m(dimV, dimW);
    for (int v = 0; v < dimV; ++v)
        for (int w = 0; w < dimW; ++w) m(v, w) = samples.at(site, v * dimW + w).real();
    return m;
}

KernelEval kernel_eval(const OperatorSpec& op, int box_n, double cutoff_start, double rank_tol) {
    TorusGrid g(op.d, box_n);
    // constant-rank gate on the evaluation lattice (escalated to an error)
    {
        int rank = -1;
        Rng rng(11);
        for (int probe = 0; probe < 64; ++probe) {
            VectorXd xi(op.d);
            for (int i = 0; i < op.d; ++i) xi(i) = std::floor(rng.uniform() * box_n) - box_n / 2;
            if (xi.norm() == 0.0) continue;
            MatrixXd s = op.reduced_symbol(xi);
            Eigen::JacobiSVD<MatrixXd> svd(s);
            int r = 0;
            for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) >= rank_tol * svd.singularValues()(0)) ++r;
            if (rank < 0) rank = r;
            else if (rank != r)
                throw precondition_error("kernel_eval: symbol rank varies on the evaluation lattice");
        }
    }

    KernelEval ke;
    ke.dimV = op.dimV;
    ke.dimW = op.dimW;
    ke.degree = op.k - op.d;
    ke.homogeneity_checked = op.k < op.d;

    TorusField spec(g, op.dimV * op.dimW);
    const double nyquist = box_n / 2.0;
    const double rho0 = cutoff_start * nyquist;
    const double rho1 = 0.95 * nyquist;
    for (size_t site = 0; site < g.sites(); ++site) {
        auto zeta = lattice_freq(g, site);
        if (is_zero_freq(zeta)) continue;
        double rho = std::sqrt(lattice_norm2(zeta));
        double c = smooth_cutoff(rho, rho0, rho1);
        if (c == 0.0) continue;
        VectorXd xi(op.d);
        for (int i = 0; i < op.d; ++i) xi(i) = zeta[static_cast<size_t>(i)];
        MatrixXc kd = c * pseudoinverse_symbol(op, xi, rank_tol);
        for (int v = 0; v < op.dimV; ++v)
            for (int w = 0; w < op.dimW; ++w) spec.at(site, v * op.dimW + w) = kd(v, w);
    }
    TorusField vals = backward_fft(spec);
    vals *= static_cast<double>(g.sites());  // spectral coefficients, not raw sums
    ke.samples = std::move(vals);
    return ke;
}

} // namespace wavecone
