#include "wavecone/grid.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "wavecone/rng.hpp"

namespace wavecone {

TorusField& TorusField::operator+=(const TorusField& o) {
    if (!(grid == o.grid) || dimV != o.dimV) throw validation_error("field: shape mismatch");
    for (size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
}

TorusField& TorusField::operator*=(double s) {
    for (auto& z : data) z *= s;
    return *this;
}

TorusField operator+(TorusField a, const TorusField& b) { return a += b; }

TorusField operator-(TorusField a, const TorusField& b) {
    if (!(a.grid == b.grid) || a.dimV != b.dimV) throw validation_error("field: shape mismatch");
    for (size_t i = 0; i < a.data.size(); ++i) a.data[i] -= b.data[i];
    return a;
}

TorusField operator*(double s, TorusField f) { return f *= s; }

double relative_l2_error(const TorusField& a, const TorusField& b) {
    if (!(a.grid == b.grid) || a.dimV != b.dimV) throw validation_error("field: shape mismatch");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        num += std::norm(a.data[i] - b.data[i]);
        den += std::norm(b.data[i]);
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

Box centered_subbox(int d) {
    Box b;
    b.lo.assign(static_cast<size_t>(d), 0.25);
    b.hi.assign(static_cast<size_t>(d), 0.75);
    return b;
}

std::vector<double> site_coords(const TorusGrid& g, size_t flat) {
    auto idx = g.unflat(flat);
    std::vector<double> x(static_cast<size_t>(g.d));
    for (int i = 0; i < g.d; ++i) x[static_cast<size_t>(i)] = static_cast<double>(idx[static_cast<size_t>(i)]) / g.n;
    return x;
}

double lq_norm(const TorusField& f, double q) {
    if (q < 1.0 || !std::isfinite(q)) throw precondition_error("lq_norm: q must lie in [1, inf)");
    double s = 0.0;
    for (size_t site = 0; site < f.grid.sites(); ++site) s += std::pow(f.value_norm(site), q);
    return std::pow(s * f.grid.cell_volume(), 1.0 / q);
}

double lq_norm_on(const TorusField& f, double q, const Box& box) {
    double s = 0.0;
    for (size_t site = 0; site < f.grid.sites(); ++site) {
        if (!box.contains(site_coords(f.grid, site))) continue;
        s += std::pow(f.value_norm(site), q);
    }
    return std::pow(s * f.grid.cell_volume(), 1.0 / q);
}

// ---- FFT --------------------------------------------------------------------

namespace {

TorusField run_fft(const TorusField& f, int sign) {
    TorusField out = f;
    std::vector<int> dims(static_cast<size_t>(f.grid.d), f.grid.n);
    // howmany = dimV interleaved transforms in one plan
    fftw_complex* ptr = reinterpret_cast<fftw_complex*>(out.data.data());
    fftw_plan plan = fftw_plan_many_dft(
        f.grid.d, dims.data(), f.dimV, ptr, nullptr, f.dimV, 1, ptr, nullptr, f.dimV, 1,
        sign, FFTW_ESTIMATE);
    if (!plan) throw error("fftw plan creation failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    return out;
}

} // namespace

TorusField forward_fft(const TorusField& f) { return run_fft(f, FFTW_FORWARD); }

TorusField backward_fft(const TorusField& f) {
    TorusField out = run_fft(f, FFTW_BACKWARD);
    double scale = 1.0 / static_cast<double>(f.grid.sites());
    for (auto& z : out.data) z *= scale;
    return out;
}

// ---- random fields ------------------------------------------------------------

TorusField random_band_field(const TorusGrid& g, int dimV, int band, uint64_t seed) {
    if (band < 1 || band >= g.n / 2) throw validation_error("random_band_field: band out of range");
    TorusField spec(g, dimV);
    Rng rng(seed);
    // Walk the band modes in a fixed lexicographic order so that the stream
    // of gaussians (and hence the continuum field) does not depend on n.
    std::vector<int> zeta(static_cast<size_t>(g.d), -band);
    bool done = false;
    while (!done) {
        std::vector<Complex> coefs(static_cast<size_t>(dimV));
        for (int c = 0; c < dimV; ++c) coefs[static_cast<size_t>(c)] = Complex(rng.gaussian(), rng.gaussian());
        // skip the zero mode (mean-free fields compose better with the
        // homogeneous multipliers in the test-suite)
        bool zero = true;
        for (int i = 0; i < g.d; ++i) zero = zero && zeta[static_cast<size_t>(i)] == 0;
        if (!zero) {
            std::vector<int> pos(static_cast<size_t>(g.d)), neg(static_cast<size_t>(g.d));
            for (int i = 0; i < g.d; ++i) {
                int z = zeta[static_cast<size_t>(i)];
                pos[static_cast<size_t>(i)] = (z % g.n + g.n) % g.n;
                neg[static_cast<size_t>(i)] = ((-z) % g.n + g.n) % g.n;
            }
            size_t ip = g.flat(pos), in = g.flat(neg);
            for (int c = 0; c < dimV; ++c) {
                spec.at(ip, c) += 0.5 * coefs[static_cast<size_t>(c)];
                spec.at(in, c) += 0.5 * std::conj(coefs[static_cast<size_t>(c)]);
            }
        }
        // next multi-index in [-band, band]^d
        int i = g.d - 1;
        for (;; --i) {
            if (i < 0) { done = true; break; }
            if (++zeta[static_cast<size_t>(i)] <= band) break;
            zeta[static_cast<size_t>(i)] = -band;
        }
    }
    // spec holds spectral coefficients; synthesize values
    TorusField out = backward_fft(spec);
    out *= static_cast<double>(out.grid.sites());  // undo the 1/n^d: coefficients were already per-mode
    return out;
}

// ---- binary I/O ----------------------------------------------------------------

void save_field(const TorusField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot open '" + path + "' for writing");
    int64_t header[3] = {f.grid.d, f.grid.n, f.dimV};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    static_assert(sizeof(Complex) == 2 * sizeof(double));
    out.write(reinterpret_cast<const char*>(f.data.data()),
              static_cast<std::streamsize>(f.data.size() * sizeof(Complex)));
    if (!out) throw error("short write to '" + path + "'");

    nlohmann::ordered_json sidecar;
    sidecar["d"] = f.grid.d;
    sidecar["n"] = f.grid.n;
    sidecar["dimV"] = f.dimV;
    sidecar["layout"] = "interleaved complex float64, row-major sites, component-major within site";
    std::ofstream js(path + ".json");
    js << sidecar.dump(2) << "\n";
}

TorusField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open field file '" + path + "'");
    int64_t header[3];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in) throw validation_error("field file '" + path + "' too short");
    TorusField f(TorusGrid(static_cast<int>(header[0]), static_cast<int>(header[1])),
                 static_cast<int>(header[2]));
    in.read(reinterpret_cast<char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * sizeof(Complex)));
    if (!in) throw validation_error("field file '" + path + "' truncated");
    return f;
}

} // namespace wavecone
