#include "wavecone/measure.hpp"

#include <cmath>

#include "wavecone/spectral.hpp"

namespace wavecone {

DiscreteMeasure::DiscreteMeasure(TorusGrid g, int dimV_) : grid(g), dimV(dimV_) {
    if (dimV < 1) throw validation_error("measure: dimV must be >= 1");
    density.assign(grid.sites() * static_cast<size_t>(dimV), 0.0);
    support_box.lo.assign(static_cast<size_t>(g.d), 0.0);
    support_box.hi.assign(static_cast<size_t>(g.d), 1.0);
}

double DiscreteMeasure::total_variation() const {
    double tv = 0.0;
    if (!density.empty()) {
        for (size_t site = 0; site < grid.sites(); ++site) {
            double s = 0.0;
            for (int c = 0; c < dimV; ++c) {
                double v = density[site * static_cast<size_t>(dimV) + c];
                s += v * v;
            }
            tv += std::sqrt(s);
        }
        tv *= grid.cell_volume();
    }
    for (const auto& a : atoms) tv += a.weight.norm();
    return tv;
}

double mollifier_value(int d, double t, double r) {
    if (r >= t) return 0.0;
    double s = r / t;
    double base = (1.0 - s * s);
    // unit-mass constants for (1-|y|^2)^2 on the unit ball
    double c;
    switch (d) {
        case 1: c = 15.0 / 16.0; break;
        case 2: c = 3.0 / M_PI; break;
        case 3: c = 105.0 / (32.0 * M_PI); break;
        default: throw precondition_error("mollifier: d > 3 not supported");
    }
    double td = std::pow(t, d);
    return c / td * base * base;
}

namespace {

double torus_dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double diff = std::abs(a[i] - b[i]);
        diff = std::min(diff, 1.0 - diff);
        s += diff * diff;
    }
    return s;
}

} // namespace

TorusField mollify(const DiscreteMeasure& mu, double t) {
    const TorusGrid& g = mu.grid;
    if (t < 2.0 * g.spacing())
        throw precondition_error("mollify: scale t below twice the grid spacing");

    // Sampled kernel, renormalized so the discrete masses match exactly.
    TorusField kernel(g, 1);
    double ksum = 0.0;
    std::vector<double> origin(static_cast<size_t>(g.d), 0.0);
    for (size_t site = 0; site < g.sites(); ++site) {
        double r = std::sqrt(torus_dist2(site_coords(g, site), origin));
        double v = mollifier_value(g.d, t, r);
        kernel.at(site, 0) = v;
        ksum += v;
    }
    if (ksum <= 0.0) throw precondition_error("mollify: kernel not resolved on the grid");
    double norm = 1.0 / (ksum * g.cell_volume());
    for (auto& z : kernel.data) z *= norm;

    TorusField out(g, mu.dimV);
    if (!mu.density.empty()) {
        TorusField dens(g, mu.dimV);
        for (size_t site = 0; site < g.sites(); ++site)
            for (int c = 0; c < mu.dimV; ++c) dens.at(site, c) = mu.density_at(site, c);
        TorusField ks = forward_fft(kernel);
        TorusField ds = forward_fft(dens);
        for (size_t site = 0; site < g.sites(); ++site) {
            Complex kz = ks.at(site, 0) * g.cell_volume();  // quadrature of the convolution integral
            for (int c = 0; c < mu.dimV; ++c) ds.at(site, c) *= kz;
        }
        out = backward_fft(ds);
    }
    for (const auto& atom : mu.atoms) {
        // Per-atom renormalization keeps the discrete mass of each smeared
        // atom exact even when the atom sits off-lattice.
        double asum = 0.0;
        for (size_t site = 0; site < g.sites(); ++site)
            asum += mollifier_value(g.d, t, std::sqrt(torus_dist2(site_coords(g, site), atom.location)));
        if (asum <= 0.0) throw precondition_error("mollify: atom kernel not resolved on the grid");
        double anorm = 1.0 / (asum * g.cell_volume());
        for (size_t site = 0; site < g.sites(); ++site) {
            double r = std::sqrt(torus_dist2(site_coords(g, site), atom.location));
            double v = mollifier_value(g.d, t, r) * anorm;
            if (v == 0.0) continue;
            for (int c = 0; c < mu.dimV; ++c) out.at(site, c) += v * atom.weight(c);
        }
    }
    return out;
}

PolarDiagnostics polar_diagnostics(const TorusField& f, const ConeSpec& cone, double support_tol) {
    PolarDiagnostics diag;
    double scale = f.max_abs();
    double tol = support_tol * std::max(1.0, scale);
    double dist_sum = 0.0;
    for (size_t site = 0; site < f.grid.sites(); ++site) {
        VectorXd v(f.dimV);
        for (int c = 0; c < f.dimV; ++c) v(c) = f.at(site, c).real();
        double nv = v.norm();
        if (nv <= tol) continue;
        ++diag.support_sites;
        VectorXd polar = v / nv;
        double dist = cone.distance(polar);
        diag.max_dist = std::max(diag.max_dist, dist);
        dist_sum += dist;
        VectorXd p0 = cone.subspace.project(v);
        VectorXd p1 = v - p0;
        if (p0.norm() > 0.0) diag.M_inf = std::max(diag.M_inf, p1.norm() / p0.norm());
        else if (p1.norm() > 0.0) diag.M_inf = std::numeric_limits<double>::infinity();
    }
    diag.l1_dist = diag.support_sites ? dist_sum / static_cast<double>(diag.support_sites) : 0.0;
    return diag;
}

// ---- generators ---------------------------------------------------------------

DiscreteMeasure indicator_ball_measure(const TorusGrid& g, const VectorXd& value,
                                       const std::vector<double>& center, double radius) {
    DiscreteMeasure mu(g, static_cast<int>(value.size()));
    for (size_t site = 0; site < g.sites(); ++site) {
        if (torus_dist2(site_coords(g, site), center) > radius * radius) continue;
        for (int c = 0; c < mu.dimV; ++c) mu.density_ref(site, c) = value(c);
    }
    return mu;
}

DiscreteMeasure line_measure(const TorusGrid& g, const VectorXd& value, int axis, double pos) {
    if (axis < 0 || axis >= g.d) throw validation_error("line_measure: bad axis");
    DiscreteMeasure mu(g, static_cast<int>(value.size()));
    int slice = static_cast<int>(std::floor(pos * g.n)) % g.n;
    double h = g.spacing();
    for (size_t site = 0; site < g.sites(); ++site) {
        if (g.unflat(site)[static_cast<size_t>(axis)] != slice) continue;
        for (int c = 0; c < mu.dimV; ++c) mu.density_ref(site, c) = value(c) / h;
    }
    return mu;
}

DiscreteMeasure gradient_bump_measure(const TorusGrid& g, const VectorXd& a, double t,
                                      const std::vector<double>& center) {
    if (t < 4.0 * g.spacing())
        throw precondition_error("gradient_bump_measure: scale below 4 grid cells");
    const int m = static_cast<int>(a.size());
    // scalar profile u0(x) = t^{-1} w(|x - c|/t), w = (1-s^2)^4 (C^3 at the rim)
    TorusField u(g, m);
    for (size_t site = 0; site < g.sites(); ++site) {
        double r = std::sqrt(torus_dist2(site_coords(g, site), center));
        double s = r / t;
        if (s >= 1.0) continue;
        double w = std::pow(1.0 - s * s, 4) / t;
        for (int c = 0; c < m; ++c) u.at(site, c) = w * a(c);
    }
    TorusField grad = apply_operator(builtin_operator("gradient", g.d, m), u);
    DiscreteMeasure mu(g, m * g.d);
    for (size_t site = 0; site < g.sites(); ++site)
        for (int c = 0; c < mu.dimV; ++c) mu.density_ref(site, c) = grad.at(site, c).real();
    return mu;
}

DiscreteMeasure atom_measure(const TorusGrid& g, const VectorXd& weight,
                             const std::vector<double>& location) {
    DiscreteMeasure mu(g, static_cast<int>(weight.size()));
    mu.density.clear();
    mu.atoms.push_back({location, weight});
    return mu;
}

} // namespace wavecone
