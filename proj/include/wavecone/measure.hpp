#pragma once

#include <optional>
#include <vector>

#include "wavecone/cone_analysis.hpp"
#include "wavecone/grid.hpp"

namespace wavecone {

/// Discretized V-valued measure: an absolutely continuous density sampled
/// on a torus grid plus point atoms. Total variation is the rectangle-rule
/// quadrature of |density| plus the atom masses; summation order is fixed,
/// so the value is reproducible bit-for-bit.
struct DiscreteMeasure {
    TorusGrid grid;
    int dimV = 0;
    std::vector<double> density;  ///< site-major, dimV components per site; may be empty
    struct Atom {
        std::vector<double> location;  ///< in [0,1)^d
        VectorXd weight;
    };
    std::vector<Atom> atoms;
    Box support_box;  ///< descriptor of the region the mass lives in

    DiscreteMeasure() = default;
    DiscreteMeasure(TorusGrid g, int dimV_);

    double density_at(size_t site, int c) const {
        return density.empty() ? 0.0 : density[site * static_cast<size_t>(dimV) + c];
    }
    double& density_ref(size_t site, int c) { return density[site * static_cast<size_t>(dimV) + c]; }

    double total_variation() const;
};

/// Quartic bump mollifier rho_t(x) = t^{-d} c_d (1 - |x/t|^2)^2 restricted
/// to |x| <= t, normalized to unit mass.
double mollifier_value(int d, double t, double r);

/// mu * rho_t on the measure's grid. The density part is convolved
/// spectrally with the sampled kernel (renormalized to exact unit mass, so
/// quadrature mass is preserved to roundoff); atoms are smeared directly.
/// Convexity: every output value is a convex combination of input values,
/// so pointwise cone constraints survive mollification. Requires t >= 2h.
TorusField mollify(const DiscreteMeasure& mu, double t);

/// Pointwise polar decomposition diagnostics against a cone: the polar is
/// split as P0 = proj_L v, P1 = v - P0 and the report carries the sup and
/// mean distances of unit polars to the cone plus sup |P1|/|P0|.
struct PolarDiagnostics {
    double max_dist = 0.0;
    double l1_dist = 0.0;
    double M_inf = 0.0;
    size_t support_sites = 0;
};

PolarDiagnostics polar_diagnostics(const TorusField& f, const ConeSpec& cone,
                                   double support_tol = 1e-12);

// ---- measure generators for experiments -------------------------------------

/// value * indicator of the ball B(center, radius), a constant-polar density.
DiscreteMeasure indicator_ball_measure(const TorusGrid& g, const VectorXd& value,
                                       const std::vector<double>& center, double radius);

/// Line-concentrated measure: value / h on the hyperplane slice
/// {x_axis in [pos, pos + h)}, total variation |value| per unit length.
DiscreteMeasure line_measure(const TorusGrid& g, const VectorXd& value, int axis, double pos);

/// Point-concentration family member at scale t for the gradient of an
/// m-valued bump: density = spectral gradient of u(x) = t^{-1} a w((x-c)/t)
/// with w a fixed C^3 radial bump. Exactly curl-free on the lattice (it is
/// a spectral gradient), values rank-one up to truncation, total variation
/// ~ |a| uniformly in t, L^2 norm ~ 1/t.
DiscreteMeasure gradient_bump_measure(const TorusGrid& g, const VectorXd& a, double t,
                                      const std::vector<double>& center);

/// Atom at the site center with the given weight.
DiscreteMeasure atom_measure(const TorusGrid& g, const VectorXd& weight,
                             const std::vector<double>& location);

} // namespace wavecone
