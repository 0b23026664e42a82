#pragma once

#include "cantorkit/system.hpp"

namespace cantorkit {

// One evaluation of a limit geometry k^theta at a point, with the depth
// actually used and a numerically certified truncation bound.
struct LimitEval {
    cplx value{};
    cplx deriv{1.0, 0.0};
    double error_bound = 0.0;
    int depth_used = 0;
};

// k^theta(z) at the smallest depth whose geometric-tail bound is below
// tol. Normalization k(c_theta0) = 0, Dk(c_theta0) = 1 holds exactly at
// every depth. Throws DepthError (with the achievable bound) when the
// stored tail is too shallow.
LimitEval limit_geometry_eval(const CantorSystem& sys, const ThetaTail& theta,
                              cplx z, double tol);

// The affine map F^theta_w with k^theta o f_w = F^theta_w o k^(theta w).
struct RenormMap {
    AffineMap map;            // alpha = DF, beta = c^theta_w
    double alpha_err = 0.0;   // last successive difference bound
    double beta_err = 0.0;
    int depth_used = 0;
    bool monotone = true;     // successive differences were nonincreasing
};

RenormMap renorm_affine(const CantorSystem& sys, const ThetaTail& theta,
                        const Word& w, double tol);

// Newton inversion of k^theta.
cplx limit_inverse(const CantorSystem& sys, const ThetaTail& theta, cplx x,
                   double tol);

// Richardson-extrapolated central second difference of
// k^theta1 o (k^theta0)^-1 at x0; nonzero witnesses non-essential
// affinity.
cplx nea_witness(const CantorSystem& sys, const ThetaTail& theta0,
                 const ThetaTail& theta1, cplx x0, double h);

// Per-letter bound of sup |k^theta(z)| over the piece disc of the letter
// and over tails; exact for affine systems, sampled + margin otherwise.
struct LimitBounds {
    std::vector<double> per_letter;
};
LimitBounds limit_piece_bounds(const CantorSystem& sys, std::uint64_t seed = 11);

}  // namespace cantorkit
