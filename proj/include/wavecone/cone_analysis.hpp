#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wavecone/operator_spec.hpp"

namespace wavecone {

constexpr double kDefaultRankTol = 1e-10;

/// Deterministic sample of unit frequencies. Always contains all +-e_i.
struct SphereSample {
    std::vector<VectorXd> points;
    int d = 0;
    uint64_t seed = 0;
    std::string scheme;  // "fibonacci" (d <= 3) or "gaussian"
};

/// Deterministic given (d, N, seed): Fibonacci lattice for d <= 3,
/// normalized seeded Gaussians otherwise; the 2d signed axes are appended.
/// Requires N >= 2d.
SphereSample sphere_sample(int d, int N, uint64_t seed);

/// Orthonormal basis of ker of the reduced symbol at xi (SVD based;
/// singular values below rank_tol * sigma_max count as zero). xi must be
/// nonzero. The kernel is invariant under nonzero scalings of the symbol,
/// so reduced and full symbols give the same answer.
std::vector<VectorXd> kernel_basis(const OperatorSpec& op, const VectorXd& xi,
                                   double rank_tol = kDefaultRankTol);

/// Orthonormal basis of im of the reduced symbol at xi.
std::vector<VectorXd> image_basis(const OperatorSpec& op, const VectorXd& xi,
                                  double rank_tol = kDefaultRankTol);

/// Unit directions in the wave cone with their generating frequencies:
/// kernel basis vectors plus 5 seeded random unit combinations per
/// frequency (distance minimization needs interior points of each kernel).
struct WaveConeSample {
    std::vector<VectorXd> directions;
    std::vector<VectorXd> generating_freqs;
    double rank_tol = kDefaultRankTol;
};

WaveConeSample wave_cone_sample(const OperatorSpec& op, const SphereSample& sample,
                                double rank_tol = kDefaultRankTol, uint64_t seed = 0);

/// Sampled rank statistics. Constant rank is certified on the sample only
/// (plus a bisection refinement between any rank-transition pair); the
/// certificate is labelled "sampled", never "proved".
struct RankProfile {
    int min_rank = 0;
    int max_rank = 0;
    bool is_constant_rank = false;
    std::string certificate = "sampled";
};

RankProfile rank_profile(const OperatorSpec& op, const SphereSample& sample,
                         double rank_tol = kDefaultRankTol);

/// Orthonormalized subspace of V.
struct SubspaceSpec {
    std::vector<VectorXd> basis;  ///< orthonormal
    int dim() const { return static_cast<int>(basis.size()); }

    /// Orthonormalizes (and validates independence of) the given spanning set.
    static SubspaceSpec from_spanning(const std::vector<VectorXd>& span);
    VectorXd project(const VectorXd& v) const;
};

/// Circular convex cone around a unit axis e contained in a subspace L:
///   v in K  <=>  v.e >= 0  and  |v - (v.e) e| <= 2 eps (v.e).
/// The aperture constant 2 eps tracks the working bound eps/sqrt(1-eps^2)
/// <= 2 eps valid for eps <= 1/2; every unit element of K is within 2 eps
/// of L. Convexity is what the mollification closure argument needs.
struct ConeSpec {
    VectorXd axis;
    SubspaceSpec subspace;
    double eps = 0.0;

    ConeSpec() = default;
    ConeSpec(VectorXd e, SubspaceSpec L, double eps_);

    bool contains(const VectorXd& v, double tol = 0.0) const;
    /// Euclidean distance to the cone (exact closed form for circular cones).
    double distance(const VectorXd& v) const;
    /// Orthogonal projection onto the cone.
    VectorXd project(const VectorXd& v) const;
};

/// Minimal distance between sampled unit wave-cone directions and L:
///   delta_L = min over sampled xi of min_{unit v in ker A(xi)} |v - P_L v|.
/// The inner minimum is solved exactly per frequency as the smallest
/// eigenvalue of (I - P_L) restricted to the kernel, which dominates any
/// finite set of sampled directions. Returns +inf with elliptic=true when
/// the sampled wave cone is empty.
struct EllipticityDistance {
    double delta = std::numeric_limits<double>::infinity();
    bool elliptic = false;  ///< empty sampled wave cone
    VectorXd witness_freq;
    VectorXd witness_dir;
};

EllipticityDistance ellipticity_distance(const OperatorSpec& op, const SubspaceSpec& L,
                                         const SphereSample& sample,
                                         double rank_tol = kDefaultRankTol);

/// Intersection of im A(xi) over the sample; canceling when it is {0}.
/// The dimension is non-increasing as frequencies are added.
struct CancelingReport {
    bool is_canceling = false;
    int intersection_dim = 0;
    std::vector<VectorXd> intersection_basis;
};

CancelingReport canceling_check(const OperatorSpec& op, const SphereSample& sample,
                                double rank_tol = kDefaultRankTol);

/// Intersection of ker A(xi) over the sample (the cocanceling subspace).
std::vector<VectorXd> kernel_intersection(const OperatorSpec& op, const SphereSample& sample,
                                          double rank_tol = kDefaultRankTol);

/// Rigidity certificate: true iff N := intersection of ker A(xi) meets the
/// cone only at 0, decided by alternating projections between N and the
/// cone from deterministic starts. When the certificate fails the witness
/// is a unit element of N inside the cone.
struct RigidityReport {
    bool certificate = false;
    int cocanceling_dim = 0;
    std::optional<VectorXd> witness;
};

RigidityReport cocanceling_rigidity(const OperatorSpec& op, const ConeSpec& cone,
                                    const SphereSample& sample,
                                    double rank_tol = kDefaultRankTol);

/// Moore-Penrose inverse of the full symbol at xi != 0 (SVD based).
MatrixXc pseudoinverse_symbol(const OperatorSpec& op, const VectorXd& xi,
                              double rank_tol = kDefaultRankTol);

/// Orthogonal projection pi(xi) = A(xi)^+ A(xi) onto (ker A(xi))^perp.
/// Real, idempotent, symmetric, 0-homogeneous.
MatrixXd projection_symbol(const OperatorSpec& op, const VectorXd& xi,
                           double rank_tol = kDefaultRankTol);

/// True when the sampled symbol has trivial kernel everywhere (elliptic).
bool is_elliptic_sampled(const OperatorSpec& op, const SphereSample& sample,
                         double rank_tol = kDefaultRankTol);

} // namespace wavecone
