#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wavecone/ladder.hpp"
#include "wavecone/measure.hpp"
#include "wavecone/operator_spec.hpp"
#include "wavecone/spectral.hpp"

namespace wavecone {

// ---- higher integrability -----------------------------------------------------

struct ExperimentRow {
    double scale = 0.0;
    double lp_norm = 0.0;    ///< on the observation window
    double tv_mu = 0.0;      ///< total variation of the mollified measure
    double tv_sigma = 0.0;   ///< total variation of sigma = A mu
    double ratio = 0.0;      ///< lp_norm / (tv_mu + tv_sigma), recomputed from the stored columns
    double cone_max_dist = 0.0;
    double M_inf = 0.0;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    uint64_t seed = 0;
    int grid_n = 0;
    uint64_t operator_hash = 0;
    std::string label;
    bool a_free_extended_range = false;  ///< sigma == 0: estimates extend to all p
    bool exploratory = false;            ///< p outside the admissible window, forced
};

/// A measure per mollification scale. The same base measure at every scale
/// reproduces the "fixed measure, shrinking mollifier" setup.
using MeasureFamily = std::function<DiscreteMeasure(double scale)>;

/// For each scale t: mollify, apply the operator, record L^p on the window,
/// total variations and cone diagnostics. The pointwise cone hypothesis is
/// enforced when a cone is given: violations above cone_tol abort with
/// hypothesis_error. p outside the admissible exponent window is rejected
/// unless force = true, which labels the report exploratory.
ExperimentReport higher_integrability_experiment(
    const OperatorSpec& op, const MeasureFamily& family, const std::vector<double>& scales,
    const std::optional<ConeSpec>& cone, const Rational& p, const Box& window,
    bool force = false, double cone_tol = 1e-9, uint64_t seed = 0);

// ---- localized negative-norm experiment -----------------------------------------

struct LocalCancelingResult {
    double neg_norm = 0.0;   ///< Bessel proxy of the W^{-1, d/(d-1)} norm of the cutoff source
    double tv_bound = 0.0;   ///< |mu| + |sigma|
    double ratio = 0.0;
    int grid_n = 0;
};

/// Requires a canceling, constant-rank operator with k < d (gates checked
/// on a sample, refused with hypothesis_error otherwise). Mollifies mu at
/// the given scale, forms sigma = A mu_t, applies a smooth cutoff around
/// the window and reports the negative-norm/total-variation ratio.
std::vector<LocalCancelingResult> local_canceling_experiment(
    const OperatorSpec& op, const std::function<DiscreteMeasure(const TorusGrid&)>& make_mu,
    const std::vector<int>& grid_sizes, double scale, const Box& window);

// ---- swirl counterexample --------------------------------------------------------

/// Radial diagnostics of the swirling-gradient family in d = 2. The Hessian
/// of u_eps splits into I_eps (the log-Hessian part, trace-free) and II_eps
/// (the radial rank-one part); all integrals are radial quadratures.
struct SwirlResult {
    double eps = 0.0;
    double int_I_annulus = 0.0;      ///< integral of |I| over B_1 \ B_eps
    double int_II = 0.0;             ///< integral of |II| over B_1
    double l1_dist_sd2 = 0.0;        ///< integral of dist(hessian, trace-free symmetric)
    double split_consistency = 0.0;  ///< max pointwise |direct - (I + II)| at quadrature nodes
};

SwirlResult swirl_example(double eps, int quad_nodes = 20000);

/// Hessian field export for inspection: channels are the 2x2 matrix
/// entries row-major, evaluated on the grid (the ball is inscribed in the
/// centered unit square, origin at (1/2,1/2)).
TorusField swirl_hessian_field(double eps, const TorusGrid& g);

// ---- laminates ---------------------------------------------------------------------

struct LaminateResult {
    TorusField field;
    double a_freeness_residual = 0.0;      ///< max_zeta |A(zeta) u^(zeta)| / max |u^|
    double l1_dist_to_midpoint = 0.0;      ///< exact value: delta |P| / 2
    std::vector<double> pairing_errors;    ///< |<u_j - midpoint, test_i>| per test function
    double weakstar_slope = 0.0;           ///< fitted log-log decay rate across j (when swept)
};

/// u_j = B0 + delta P phi(j x.xi + shift) with phi the {0,1} square wave.
/// Requires P in ker A(xi) (tolerance 1e-10) and xi with entries in
/// {-1,0,1} so that every active lattice frequency stays parallel to xi
/// under aliasing; j must respect the grid Nyquist bound. The sampling
/// shift of a quarter cell keeps every sample off the jump set.
LaminateResult laminate(const OperatorSpec& op, const std::vector<int>& xi, const VectorXd& P,
                        const VectorXd& B0, double delta, int j, const TorusGrid& g);

/// Runs laminate over several j and fits the weak* pairing decay slope.
struct LaminateSweep {
    std::vector<int> js;
    std::vector<LaminateResult> results;
    double min_slope = 0.0;  ///< smallest fitted decay rate over the test functions
};

LaminateSweep laminate_sweep(const OperatorSpec& op, const std::vector<int>& xi, const VectorXd& P,
                             const VectorXd& B0, double delta, const std::vector<int>& js,
                             const TorusGrid& g);

// ---- conformal coordinates ------------------------------------------------------------

/// (a+, a-) with A v = a+ v + a- conj(v) under R^2 ~ C, and the dilatation
/// a- / conj(a+). The change of coordinates is a linear isometry up to the
/// factor sqrt(2): |A|^2 = 2(|a+|^2 + |a-|^2), and the distance of A to the
/// conformal subspace is exactly sqrt(2) |a-|.
struct ConformalCoords {
    std::complex<double> a_plus{0.0, 0.0};
    std::complex<double> a_minus{0.0, 0.0};
    std::complex<double> dilatation{0.0, 0.0};
    bool dilatation_finite = true;  ///< false when a+ = 0 (pure anticonformal)
    double dist_to_conformal = 0.0;
};

ConformalCoords conformal_coords(const Eigen::Matrix2d& A);
Eigen::Matrix2d from_conformal_coords(std::complex<double> a_plus, std::complex<double> a_minus);

// ---- compensated compactness diagnostics ------------------------------------------------

struct CompactnessDiagnostics {
    /// weak* table: per field, pairings with the fixed trig monomials
    /// |zeta|_inf <= 3 (complex value per mode per component).
    std::vector<std::map<std::vector<int>, std::vector<Complex>>> weakstar_table;
    /// tails[i][m] = integral of |f_i| over {|f_i| > thresholds[m]} on the window
    std::vector<std::vector<double>> tails;
    std::vector<double> thresholds;
    bool equiintegrable = false;  ///< tails at the largest threshold uniformly small
};

CompactnessDiagnostics compactness_diagnostics(const std::vector<TorusField>& fields,
                                               const Box& window,
                                               const std::vector<double>& thresholds);

} // namespace wavecone
