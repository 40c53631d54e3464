#pragma once

#include <complex>
#include <string>
#include <vector>

#include "wavecone/errors.hpp"
#include "wavecone/operator_spec.hpp"

namespace wavecone {

/// Periodic grid on the unit torus [0,1)^d with n points per axis.
/// n must be a power of two >= 8. Frequencies live on the integer lattice
/// zeta in {-n/2, ..., n/2 - 1}^d.
struct TorusGrid {
    int d = 0;
    int n = 0;

    TorusGrid() = default;
    TorusGrid(int d_, int n_) : d(d_), n(n_) {
        if (d < 1) throw validation_error("grid: d must be >= 1");
        if (n < 8 || (n & (n - 1)) != 0)
            throw validation_error("grid: n must be a power of two >= 8");
    }

    size_t sites() const {
        size_t s = 1;
        for (int i = 0; i < d; ++i) s *= static_cast<size_t>(n);
        return s;
    }
    double spacing() const { return 1.0 / n; }
    double cell_volume() const {
        double v = 1.0;
        for (int i = 0; i < d; ++i) v /= n;
        return v;
    }

    /// FFT bin index -> signed lattice frequency.
    int freq_of_index(int idx) const { return idx < n / 2 ? idx : idx - n; }

    /// Row-major flat index <-> per-axis indices.
    size_t flat(const std::vector<int>& idx) const {
        size_t f = 0;
        for (int i = 0; i < d; ++i) f = f * static_cast<size_t>(n) + static_cast<size_t>(idx[static_cast<size_t>(i)]);
        return f;
    }
    std::vector<int> unflat(size_t f) const {
        std::vector<int> idx(static_cast<size_t>(d));
        for (int i = d - 1; i >= 0; --i) {
            idx[static_cast<size_t>(i)] = static_cast<int>(f % static_cast<size_t>(n));
            f /= static_cast<size_t>(n);
        }
        return idx;
    }

    friend bool operator==(const TorusGrid&, const TorusGrid&) = default;
};

/// V-valued complex samples on a torus grid. Storage is interleaved:
/// component c of site s lives at data[s * dimV + c]. Fields are immutable
/// values in spirit: every operation returns a new field.
struct TorusField {
    TorusGrid grid;
    int dimV = 0;
    std::vector<Complex> data;

    TorusField() = default;
    TorusField(TorusGrid g, int dimV_)
        : grid(g), dimV(dimV_), data(g.sites() * static_cast<size_t>(dimV_), Complex(0, 0)) {
        if (dimV < 1) throw validation_error("field: dimV must be >= 1");
    }

    Complex& at(size_t site, int c) { return data[site * static_cast<size_t>(dimV) + c]; }
    const Complex& at(size_t site, int c) const { return data[site * static_cast<size_t>(dimV) + c]; }

    /// Euclidean norm of the value at a site.
    double value_norm(size_t site) const {
        double s = 0.0;
        for (int c = 0; c < dimV; ++c) s += std::norm(at(site, c));
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data) m = std::max(m, std::abs(z));
        return m;
    }

    TorusField& operator+=(const TorusField& o);
    TorusField& operator*=(double s);
};

TorusField operator+(TorusField a, const TorusField& b);
TorusField operator-(TorusField a, const TorusField& b);
TorusField operator*(double s, TorusField f);

/// L2 distance relative to the norm of b (0/0 reported as 0).
double relative_l2_error(const TorusField& a, const TorusField& b);

/// Grid L^q norm by the rectangle rule, optionally over a sub-box.
struct Box {
    std::vector<double> lo, hi;  // half-open [lo, hi) per axis
    bool contains(const std::vector<double>& x) const {
        for (size_t i = 0; i < lo.size(); ++i)
            if (x[i] < lo[i] || x[i] >= hi[i]) return false;
        return true;
    }
};

/// Centered sub-box of relative side 1/2 (the fixed observation window).
Box centered_subbox(int d);

double lq_norm(const TorusField& f, double q);
double lq_norm_on(const TorusField& f, double q, const Box& box);

/// Coordinates of a grid site.
std::vector<double> site_coords(const TorusGrid& g, size_t flat);

// ---- FFT -------------------------------------------------------------------

/// In-place style forward/backward DFT of all components (FFTW backend).
/// forward_fft returns raw sums; spectrum_coefficient semantics (divide by
/// n^d) are handled by the callers. backward_fft includes the 1/n^d factor,
/// so backward_fft(forward_fft(f)) == f.
TorusField forward_fft(const TorusField& f);
TorusField backward_fft(const TorusField& f);

// ---- random fields and I/O ---------------------------------------------------

/// Real band-limited random field: seeded Gaussian spectrum supported on
/// |zeta|_inf <= band with Hermitian symmetry. Resolution-independent by
/// construction, so norms computed at different n are comparable.
TorusField random_band_field(const TorusGrid& g, int dimV, int band, uint64_t seed);

/// Flat binary field format: int64 d, n, dimV header then little-endian
/// float64 interleaved (re, im) pairs. A JSON sidecar "<path>.json" records
/// the same header for inspection.
void save_field(const TorusField& f, const std::string& path);
TorusField load_field(const std::string& path);

} // namespace wavecone
