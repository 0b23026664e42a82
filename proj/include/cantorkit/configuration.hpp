#pragma once

#include "cantorkit/limits.hpp"

namespace cantorkit {

// Relative configuration (theta, theta', s, t): the affine map z -> s z + t
// positioning a copy of K against K'. s != 0.
struct RelConfig {
    ThetaTail theta;    // tail for K
    ThetaTail theta_p;  // tail for K'
    cplx s{1.0, 0.0};
    cplx t{0.0, 0.0};
};

struct JWindow {
    double R;  // e^-R <= |s| <= e^R
};

// Renormalization by (w, wp): tails extend, and
//   s -> (DF/DF') s,  t -> (s c + t - c') / DF'.
// Either word may be the single-letter identity.
RelConfig renormalize(const CantorSystem& sysA, const CantorSystem& sysB,
                      const RelConfig& u, const Word& w, const Word& wp,
                      double tol);

struct ScaleTriple {
    ThetaTail theta, theta_p;
    cplx s;
};

ScaleTriple renormalize_scale(const CantorSystem& sysA,
                              const CantorSystem& sysB, const ScaleTriple& r,
                              const Word& w, const Word& wp, double tol);

// Enclosures of s k^theta(G(w)) + t as words of length `depth` are refined:
// one closed disc per refinement word.
std::vector<Disc> config_enclosures(const CantorSystem& sys,
                                    const ThetaTail& theta,
                                    const LimitBounds& bounds, cplx s, cplx t,
                                    int depth, double tol);

// Closed-enclosure linked test at the given refinement depth (tangency
// counts as linked).
bool linked_test(const CantorSystem& sysA, const CantorSystem& sysB,
                 const RelConfig& u, int depth, double tol = 1e-9);

struct IntersectOptions {
    int max_depth = 8;
    double tol = 1e-9;
    std::uint64_t node_budget = 400'000;
    double eval_tol = 1e-10;
};

// Branch-and-bound refinement of linked cylinder pairs. "yes" needs a pair
// surviving to max_depth whose enclosure overlap exceeds the accumulated
// evaluation error by tol; "no" needs the linked frontier to die out.
Tri intersecting_test(const CantorSystem& sysA, const CantorSystem& sysB,
                      const RelConfig& u, const IntersectOptions& opt = {});

}  // namespace cantorkit
