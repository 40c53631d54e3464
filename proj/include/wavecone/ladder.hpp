#pragma once

#include "wavecone/rational.hpp"

namespace wavecone {

/// Query for the Sobolev-embedding exponent recursion.
struct LadderQuery {
    Rational q;   ///< base exponent, 1 < q < inf
    int d = 0;    ///< space dimension
    int ell = 0;  ///< number of embedding steps
};

/// q(ell) with q(0) = q and
///   q(ell) = d q / (d - ell q)   when ell q < d,
///   q(ell) = q(ell - 1)          when ell q >= d.
/// Exact rational arithmetic; satisfies q <= q(ell) < inf and the semigroup
/// identity [q(r)](ell) = q(r + ell).
Rational q_ladder(const LadderQuery& query);

/// Result of inverting the ladder: q with q(k-1) >= p, exact when possible.
struct LadderSeed {
    Rational q;
    bool exact = false;      ///< q_ladder(q, k-1) == p holds exactly
    bool boundary = false;   ///< p == 1: measures are handled as plain TV
};

/// Finds q > 1 with q(k-1) = p. Admissible p ranges over [1, d/(d-k)] for
/// k < d (the closed right endpoint is the limiting exponent) and [1, inf)
/// for k >= d; within the window and p <= d/(d-k) the seed satisfies
/// q <= d/(d-1). For p <= d/(d-k+1) no q > 1 reaches p exactly, so a fixed
/// interior seed is returned with exact = false (then q(k-1) > p and the
/// target space embeds into L^p locally). p = 1 returns the flagged
/// boundary value q = 1.
LadderSeed ladder_seed(const Rational& p, int d, int k);

} // namespace wavecone
