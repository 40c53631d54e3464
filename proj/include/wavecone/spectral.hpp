#pragma once

#include <functional>
#include <map>

#include "wavecone/cone_analysis.hpp"
#include "wavecone/grid.hpp"
#include "wavecone/operator_spec.hpp"

namespace wavecone {

/// Fourier multiplier on the integer frequency lattice. The evaluator maps
/// a lattice frequency zeta to a dimW x dimV matrix; the zero mode gets its
/// own policy because homogeneous multipliers are singular there.
struct MultiplierFn {
    enum class ZeroMode { identity, zero, custom };

    std::function<MatrixXc(const std::vector<int>& zeta)> evaluator;
    int dimV = 0, dimW = 0;
    ZeroMode zero_mode = ZeroMode::identity;
    MatrixXc zero_matrix;  // used when zero_mode == custom
    /// Annihilate frequencies with a component on the unpaired Nyquist ring
    /// (zeta_i = -n/2). The asymmetric lattice cannot represent odd-order
    /// symbols of real fields there; operator application switches this on
    /// so that real fields map to real fields and symbol identities hold
    /// exactly on the grid.
    bool zero_nyquist = false;
};

/// F^{-1}[ m(zeta) f^(zeta) ]: forward FFT, per-frequency matrix multiply,
/// inverse FFT. Throws on non-finite multiplier values.
TorusField apply_multiplier(const TorusField& f, const MultiplierFn& m);

/// Applies the operator spectrally with its full symbol at xi = zeta
/// (Nyquist ring annihilated, see MultiplierFn::zero_nyquist).
TorusField apply_operator(const OperatorSpec& op, const TorusField& f);

/// Bessel-potential norm: scalar multiplier (1 + |2 pi zeta|^2)^{s/2}
/// followed by the grid L^q norm. Negative s is the proxy for dual
/// (negative-order) Sobolev norms; only ratios of these proxies on a fixed
/// grid are meaningful, equivalence constants are not tracked.
double bessel_norm(const TorusField& f, double s, double q);

/// Riesz potential of order s in (0, d): multiplier |2 pi zeta|^{-s},
/// zero mode annihilated (periodic analogue of the whole-space convolution;
/// the mean is removed by construction).
TorusField riesz_potential(const TorusField& f, double s);

/// Solves (Id + B^* B) u = f exactly per frequency with the full symbol.
TorusField solve_laplace(const OperatorSpec& opB, const TorusField& f);

/// Variable coefficients R_alpha(x) for |alpha| = 2k, stored as matrix
/// fields (dimU x dimU row-major in the component index).
struct Perturbation {
    std::map<MultiIndex, TorusField> coeffs;
    double sup_norm() const;
};

struct PerturbedSolution {
    TorusField u;
    int iterations = 0;
    double residual = 0.0;           ///< |(Id + B^*B - R)u - f|_2
    double relative_residual = 0.0;  ///< residual / |f|_2
    double contraction = 0.0;        ///< measured successive-difference ratio
};

/// Fixed-point iteration u <- (Id + B^*B)^{-1}(f + R u). Stops when the
/// successive-iterate L2 difference drops below tol; throws
/// divergence_error (carrying the measured contraction) when the iterates
/// blow past twice their initial size, which signals that the coefficient
/// smallness condition is violated.
PerturbedSolution solve_perturbed(const OperatorSpec& opB, const Perturbation& R,
                                  const TorusField& f, double tol = 1e-12,
                                  int max_iter = 64);

/// d^alpha f computed spectrally (full factor (2 pi i zeta)^alpha).
TorusField spectral_derivative(const TorusField& f, const MultiIndex& alpha);

/// A-representative: per-frequency projection pi(zeta) = A(zeta)^+ A(zeta)
/// onto (ker A)^perp; the zero mode passes through unchanged. Warns (via
/// the returned flag) when the symbol rank is not constant on a sample.
struct Representative {
    TorusField field;
    bool constant_rank = true;
};

Representative a_representative(const OperatorSpec& op, const TorusField& u,
                                double rank_tol = kDefaultRankTol);

/// Projection multiplier pi(zeta) with identity zero-mode policy.
MultiplierFn projection_multiplier(const OperatorSpec& op, double rank_tol = kDefaultRankTol);

/// Sampled fundamental kernel on the centered box [-1/2,1/2)^d: inverse FFT
/// of the Moore-Penrose inverse of the full symbol under a smooth radial
/// high-frequency cutoff. In Fourier terms K^ A^ u = pi u^, so K * A u
/// recovers the A-representative of mean-free fields. Entries are
/// Lin(W,V)-valued: component (v, w) of the sample lives at channel
/// v*dimW + w. For k < d the kernel is (k-d)-homogeneous; k >= d switches
/// on logarithmic behavior and the homogeneity check is skipped.
struct KernelEval {
    TorusField samples;        ///< dimV*dimW channels on the box grid
    int dimV = 0, dimW = 0;
    bool homogeneity_checked = false;
    int degree = 0;            ///< k - d when checked

    /// Matrix sample at the box point closest to x in [-1/2,1/2)^d.
    MatrixXd matrix_at(const std::vector<double>& x) const;
};

KernelEval kernel_eval(const OperatorSpec& op, int box_n, double cutoff_start = 0.5,
                       double rank_tol = kDefaultRankTol);

} // namespace wavecone
