#include "wavecone/ladder.hpp"

#include "wavecone/errors.hpp"

namespace wavecone {

Rational q_ladder(const LadderQuery& query) {
    if (query.d < 1) throw validation_error("q_ladder: d must be >= 1");
    if (query.ell < 0) throw validation_error("q_ladder: ell must be >= 0");
    if (query.q <= 1) throw precondition_error("q_ladder: q must be > 1");
    Rational q = query.q;
    const Rational d(query.d);
    // Unwind the recursion from ell down: each step either embeds once or
    // delegates to ell-1 when ell*q already reaches the dimension.
    int ell = query.ell;
    while (ell > 0) {
        if (Rational(ell) * q < d) return d * q / (d - Rational(ell) * q);
        --ell;
    }
    return q;
}

LadderSeed ladder_seed(const Rational& p, int d, int k) {
    if (d < 1 || k < 1) throw validation_error("ladder_seed: need d, k >= 1");
    if (p < 1) throw precondition_error("ladder_seed: p must be >= 1");
    if (k < d) {
        const Rational pmax = Rational(d) / Rational(d - k);
        if (p > pmax)
            throw precondition_error(
                "ladder_seed: p exceeds the admissible window [1, d/(d-k)] for k < d (p_max = " +
                format_rational(pmax) + ")");
    }
    LadderSeed seed;
    if (p == 1) {
        seed.q = 1;
        seed.boundary = true;
        return seed;
    }
    // Exact inversion: the recursion from k-1 lands on the largest ell with
    // ell q < d, where it reads d q / (d - ell q). Try each landing level.
    for (int ell = k - 1; ell >= 0; --ell) {
        Rational q = Rational(d) * p / (Rational(d) + Rational(ell) * p);
        if (q <= 1) continue;
        if (Rational(ell) * q >= d) continue;                       // would not land here
        if (ell < k - 1 && Rational(ell + 1) * q < d) continue;     // would land deeper
        LadderQuery check{q, d, k - 1};
        if (q_ladder(check) != p) throw error("ladder_seed: inversion self-check failed");
        seed.q = q;
        seed.exact = true;
        return seed;
    }
    // p below every reachable landing (p <= d/(d-k+1) when k < d): no q > 1
    // hits p exactly, but every q > 1 overshoots, so return a fixed interior
    // seed and let the caller use the inclusion L^{q(k-1)} c L^p.
    seed.q = (Rational(1) + Rational(d) / Rational(d - 1)) / 2;
    seed.exact = false;
    return seed;
}

} // namespace wavecone
