#include "wavecone/cone_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

#include "wavecone/errors.hpp"
#include "wavecone/rng.hpp"

namespace wavecone {

namespace {

MatrixXd stack_columns(const std::vector<VectorXd>& vs) {
    MatrixXd m(vs.empty() ? 0 : vs[0].size(), static_cast<Eigen::Index>(vs.size()));
    for (size_t j = 0; j < vs.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vs[j];
    return m;
}

std::vector<VectorXd> orthonormal_columns(const MatrixXd& m, double tol) {
    std::vector<VectorXd> out;
    if (m.cols() == 0) return out;
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * smax && smax > 0.0) out.push_back(svd.matrixU().col(i));
    return out;
}

/// Nullspace of a (possibly rectangular) real matrix, orthonormal columns.
std::vector<VectorXd> nullspace(const MatrixXd& m, double rank_tol) {
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (smax > 0.0 && sv(i) >= rank_tol * smax) ++rank;
    std::vector<VectorXd> out;
    for (Eigen::Index i = rank; i < m.cols(); ++i) out.push_back(svd.matrixV().col(i));
    return out;
}

/// Intersection of two subspaces given by orthonormal bases: the nullspace
/// of the stacked complementary projectors.
std::vector<VectorXd> intersect_subspaces(const std::vector<VectorXd>& a,
                                          const std::vector<VectorXd>& b, double rank_tol) {
    if (a.empty() || b.empty()) return {};
    const Eigen::Index n = a[0].size();
    MatrixXd pa = stack_columns(a), pb = stack_columns(b);
    MatrixXd stacked(2 * n, n);
    stacked.topRows(n) = MatrixXd::Identity(n, n) - pa * pa.transpose();
    stacked.bottomRows(n) = MatrixXd::Identity(n, n) - pb * pb.transpose();
    // Absolute threshold: the stacked projectors have unit scale by construction.
    Eigen::JacobiSVD<MatrixXd> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    std::vector<VectorXd> out;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) < std::sqrt(rank_tol)) out.push_back(svd.matrixV().col(i));
    // trailing columns beyond sv.size() (wide case) cannot occur: stacked is tall
    return out;
}

int symbol_rank(const OperatorSpec& op, const VectorXd& xi, double rank_tol) {
    MatrixXd s = op.reduced_symbol(xi);
    Eigen::JacobiSVD<MatrixXd> svd(s);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    if (smax == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) >= rank_tol * smax) ++r;
    return r;
}

} // namespace

SphereSample sphere_sample(int d, int N, uint64_t seed) {
    if (d < 1) throw validation_error("sphere_sample: d must be >= 1");
    if (N < 2 * d) throw precondition_error("sphere_sample: N must be at least 2d");
    SphereSample s;
    s.d = d;
    s.seed = seed;
    const double golden = 0.6180339887498948482;
    if (d == 1) {
        s.scheme = "fibonacci";
        for (int i = 0; i < N; ++i) {
            VectorXd p(1);
            p(0) = (i % 2 == 0) ? 1.0 : -1.0;
            s.points.push_back(p);
        }
    } else if (d == 2) {
        s.scheme = "fibonacci";
        for (int i = 0; i < N; ++i) {
            double theta = 2.0 * M_PI * std::fmod((i + 0.5) * golden, 1.0);
            VectorXd p(2);
            p << std::cos(theta), std::sin(theta);
            s.points.push_back(p);
        }
    } else if (d == 3) {
        s.scheme = "fibonacci";
        for (int i = 0; i < N; ++i) {
            double z = 1.0 - (2.0 * i + 1.0) / N;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double theta = 2.0 * M_PI * std::fmod(i * golden, 1.0);
            VectorXd p(3);
            p << r * std::cos(theta), r * std::sin(theta), z;
            s.points.push_back(p);
        }
    } else {
        s.scheme = "gaussian";
        Rng rng(seed);
        for (int i = 0; i < N; ++i) {
            VectorXd p(d);
            do {
                for (int j = 0; j < d; ++j) p(j) = rng.gaussian();
            } while (p.norm() < 1e-8);
            s.points.push_back(p / p.norm());
        }
    }
    for (int j = 0; j < d; ++j) {
        VectorXd p = VectorXd::Zero(d);
        p(j) = 1.0;
        s.points.push_back(p);
        s.points.push_back(-p);
    }
    for (auto& p : s.points) p /= p.norm();
    return s;
}

std::vector<VectorXd> kernel_basis(const OperatorSpec& op, const VectorXd& xi, double rank_tol) {
    if (xi.norm() == 0.0) throw precondition_error("kernel_basis: xi must be nonzero");
    return nullspace(op.reduced_symbol(xi), rank_tol);
}

std::vector<VectorXd> image_basis(const OperatorSpec& op, const VectorXd& xi, double rank_tol) {
    if (xi.norm() == 0.0) throw precondition_error("image_basis: xi must be nonzero");
    MatrixXd s = op.reduced_symbol(xi);
    return orthonormal_columns(s, rank_tol);
}

WaveConeSample wave_cone_sample(const OperatorSpec& op, const SphereSample& sample,
                                double rank_tol, uint64_t seed) {
    WaveConeSample wc;
    wc.rank_tol = rank_tol;
    Rng rng(seed ^ 0x9e2fb31a55c1d0e7ULL);
    for (const auto& xi : sample.points) {
        auto ker = kernel_basis(op, xi, rank_tol);
        if (ker.empty()) continue;
        for (const auto& v : ker) {
            wc.directions.push_back(v);
            wc.generating_freqs.push_back(xi);
        }
        const int extras = 5;
        for (int e = 0; e < extras; ++e) {
            VectorXd v = VectorXd::Zero(op.dimV);
            for (const auto& b : ker) v += rng.gaussian() * b;
            if (v.norm() < 1e-12) continue;
            wc.directions.push_back(v / v.norm());
            wc.generating_freqs.push_back(xi);
        }
    }
    return wc;
}

RankProfile rank_profile(const OperatorSpec& op, const SphereSample& sample, double rank_tol) {
    if (sample.points.empty()) throw precondition_error("rank_profile: empty sample");
    RankProfile rp;
    rp.min_rank = std::numeric_limits<int>::max();
    rp.max_rank = 0;
    std::vector<int> ranks;
    ranks.reserve(sample.points.size());
    for (const auto& xi : sample.points) {
        int r = symbol_rank(op, xi, rank_tol);
        ranks.push_back(r);
        rp.min_rank = std::min(rp.min_rank, r);
        rp.max_rank = std::max(rp.max_rank, r);
    }
    // Refinement near rank transitions: bisect the arc between consecutive
    // sample points of different rank a few times.
    for (size_t i = 0; i + 1 < sample.points.size(); ++i) {
        if (ranks[i] == ranks[i + 1]) continue;
        VectorXd a = sample.points[i], b = sample.points[i + 1];
        for (int step = 0; step < 8; ++step) {
            VectorXd mid = a + b;
            if (mid.norm() < 1e-8) break;  // antipodal pair, no arc midpoint
            mid /= mid.norm();
            int r = symbol_rank(op, mid, rank_tol);
            rp.min_rank = std::min(rp.min_rank, r);
            rp.max_rank = std::max(rp.max_rank, r);
            if (r == ranks[i]) a = mid; else b = mid;
        }
    }
    rp.is_constant_rank = (rp.min_rank == rp.max_rank);
    return rp;
}

SubspaceSpec SubspaceSpec::from_spanning(const std::vector<VectorXd>& span) {
    if (span.empty()) throw validation_error("subspace: empty spanning set");
    auto basis = orthonormal_columns(stack_columns(span), 1e-12);
    if (basis.size() != span.size())
        throw validation_error("subspace: spanning vectors are linearly dependent");
    SubspaceSpec s;
    s.basis = std::move(basis);
    return s;
}

VectorXd SubspaceSpec::project(const VectorXd& v) const {
    VectorXd p = VectorXd::Zero(v.size());
    for (const auto& b : basis) p += b.dot(v) * b;
    return p;
}

ConeSpec::ConeSpec(VectorXd e, SubspaceSpec L, double eps_)
    : axis(std::move(e)), subspace(std::move(L)), eps(eps_) {
    if (eps <= 0.0 || eps >= 1.0) throw validation_error("cone: aperture must lie in (0,1)");
    if (std::abs(axis.norm() - 1.0) > 1e-10) throw validation_error("cone: axis must be a unit vector");
    if ((subspace.project(axis) - axis).norm() > 1e-10)
        throw validation_error("cone: axis must lie in the subspace L");
}

bool ConeSpec::contains(const VectorXd& v, double tol) const {
    double a = axis.dot(v);
    if (a < -tol) return false;
    return (v - a * axis).norm() <= 2.0 * eps * a + tol;
}

double ConeSpec::distance(const VectorXd& v) const {
    // In the (axis, radial) half-plane the cone is {(a,r): a >= 0, r <= 2 eps a};
    // distances reduce to plane geometry with half-angle theta = atan(2 eps).
    double a = axis.dot(v);
    double r = (v - a * axis).norm();
    double denom = std::sqrt(1.0 + 4.0 * eps * eps);
    double cos_t = 1.0 / denom, sin_t = 2.0 * eps / denom;
    if (a >= 0.0 && r <= 2.0 * eps * a) return 0.0;
    double along = a * cos_t + r * sin_t;  // component along the boundary ray
    if (along <= 0.0) return v.norm();     // polar cone: nearest point is the apex
    return r * cos_t - a * sin_t;
}

VectorXd ConeSpec::project(const VectorXd& v) const {
    double a = axis.dot(v);
    VectorXd w = v - a * axis;
    double r = w.norm();
    if (a >= 0.0 && r <= 2.0 * eps * a) return v;
    double denom2 = 1.0 + 4.0 * eps * eps;
    double along = (a + 2.0 * eps * r);  // unnormalized projection onto the boundary ray
    if (along <= 0.0) return VectorXd::Zero(v.size());
    double axial = along / denom2;
    double radial = 2.0 * eps * along / denom2;
    if (r == 0.0) return axial * axis;  // on the negative axis: any radial direction; apex handled above
    return axial * axis + (radial / r) * w;
}

EllipticityDistance ellipticity_distance(const OperatorSpec& op, const SubspaceSpec& L,
                                         const SphereSample& sample, double rank_tol) {
    if (L.dim() == 0) throw precondition_error("ellipticity_distance: L must be nontrivial");
    EllipticityDistance out;
    out.elliptic = true;
    for (const auto& xi : sample.points) {
        auto ker = kernel_basis(op, xi, rank_tol);
        if (ker.empty()) continue;
        out.elliptic = false;
        // min_{unit v in K} |v - P_L v|^2 = lambda_min of B^T (I - P_L) B
        MatrixXd b = stack_columns(ker);
        MatrixXd pl = MatrixXd::Zero(op.dimV, op.dimV);
        for (const auto& e : L.basis) pl += e * e.transpose();
        MatrixXd q = b.transpose() * (MatrixXd::Identity(op.dimV, op.dimV) - pl) * b;
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(q);
        double lmin = std::max(0.0, es.eigenvalues()(0));
        double dist = std::sqrt(lmin);
        if (dist < out.delta) {
            out.delta = dist;
            out.witness_freq = xi;
            out.witness_dir = b * es.eigenvectors().col(0);
        }
    }
    if (out.elliptic) out.delta = std::numeric_limits<double>::infinity();
    else if (out.delta < std::sqrt(rank_tol)) out.delta = 0.0;  // a kernel vector lies in L
    return out;
}

CancelingReport canceling_check(const OperatorSpec& op, const SphereSample& sample,
                                double rank_tol) {
    if (static_cast<int>(sample.points.size()) < 2 * op.d)
        throw precondition_error("canceling_check: sample size must be at least 2d");
    CancelingReport rep;
    std::vector<VectorXd> inter;
    bool first = true;
    for (const auto& xi : sample.points) {
        auto im = image_basis(op, xi, rank_tol);
        if (first) {
            inter = im;
            first = false;
        } else {
            inter = intersect_subspaces(inter, im, rank_tol);
        }
        if (inter.empty()) break;
    }
    rep.intersection_basis = inter;
    rep.intersection_dim = static_cast<int>(inter.size());
    rep.is_canceling = inter.empty();
    return rep;
}

std::vector<VectorXd> kernel_intersection(const OperatorSpec& op, const SphereSample& sample,
                                          double rank_tol) {
    std::vector<VectorXd> inter;
    bool first = true;
    for (const auto& xi : sample.points) {
        auto ker = kernel_basis(op, xi, rank_tol);
        if (first) {
            inter = ker;
            first = false;
        } else {
            inter = intersect_subspaces(inter, ker, rank_tol);
        }
        if (inter.empty()) break;
    }
    return inter;
}

RigidityReport cocanceling_rigidity(const OperatorSpec& op, const ConeSpec& cone,
                                    const SphereSample& sample, double rank_tol) {
    RigidityReport rep;
    auto n_basis = kernel_intersection(op, sample, rank_tol);
    rep.cocanceling_dim = static_cast<int>(n_basis.size());
    if (n_basis.empty()) {
        rep.certificate = true;
        return rep;
    }
    SubspaceSpec N;
    N.basis = n_basis;

    // Alternating projections between the subspace N and the convex cone.
    // Both are convex cones, so the iteration either locks onto a common
    // nonzero direction (witness) or collapses to the apex.
    std::vector<VectorXd> starts;
    starts.push_back(N.project(cone.axis));
    for (const auto& b : n_basis) {
        starts.push_back(b);
        starts.push_back(-b);
    }
    const double tol = 1e-9;
    for (auto v : starts) {
        if (v.norm() < 1e-14) continue;
        v /= v.norm();
        for (int it = 0; it < 400; ++it) {
            VectorXd w = N.project(cone.project(v));
            double nw = w.norm();
            if (nw < 1e-14) { v.setZero(); break; }
            w /= nw;
            if ((w - v).norm() < 1e-14) { v = w; break; }
            v = w;
        }
        if (v.norm() < 0.5) continue;  // collapsed to the apex
        if (cone.distance(v) <= tol && (v - N.project(v)).norm() <= tol) {
            rep.certificate = false;
            rep.witness = v;
            return rep;
        }
    }
    rep.certificate = true;
    return rep;
}

MatrixXc pseudoinverse_symbol(const OperatorSpec& op, const VectorXd& xi, double rank_tol) {
    if (xi.norm() == 0.0) throw precondition_error("pseudoinverse_symbol: xi must be nonzero");
    MatrixXc a = op.full_symbol(xi);
    Eigen::JacobiSVD<MatrixXc> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (smax > 0.0 && sv(i) >= rank_tol * smax) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal().toDenseMatrix().cast<Complex>() *
           svd.matrixU().adjoint();
}

MatrixXd projection_symbol(const OperatorSpec& op, const VectorXd& xi, double rank_tol) {
    if (xi.norm() == 0.0) throw precondition_error("projection_symbol: xi must be nonzero");
    // pi = P^+ P for the reduced symbol; the scalar (2 pi i)^k cancels.
    MatrixXd p = op.reduced_symbol(xi);
    Eigen::JacobiSVD<MatrixXd> svd(p, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    MatrixXd pi = MatrixXd::Zero(op.dimV, op.dimV);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (smax > 0.0 && sv(i) >= rank_tol * smax)
            pi += svd.matrixV().col(i) * svd.matrixV().col(i).transpose();
    return pi;
}

bool is_elliptic_sampled(const OperatorSpec& op, const SphereSample& sample, double rank_tol) {
    for (const auto& xi : sample.points)
        if (!kernel_basis(op, xi, rank_tol).empty()) return false;
    return true;
}

} // namespace wavecone
