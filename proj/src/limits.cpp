#include "cantorkit/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cantorkit/sigma.hpp"

namespace cantorkit {

namespace {
constexpr int kMaxEvalDepth = 600;

// (p(z) - p(c)) / (z - c), evaluated without cancellation; equals p'(c)
// at z == c.
cplx divided_difference(const Polynomial& p, cplx z, cplx c) {
    // sum_j a_j sum_{i<j} z^i c^{j-1-i}, Horner in c
    cplx acc = 0.0;
    for (int j = p.degree(); j >= 1; --j) {
        cplx zpow = 1.0, inner = 0.0;
        for (int i = 0; i < j; ++i) {
            inner = inner * c + zpow;
            zpow *= z;
        }
        acc += p.coef[j] * inner;
    }
    return acc;
}
}  // namespace

LimitEval limit_geometry_eval(const CantorSystem& sys, const ThetaTail& theta,
                              cplx z, double tol) {
    check_tail(sys.shift, theta);
    const int theta0 = theta.last();
    if (!sys.fattened_piece(theta0).contains(z, 1e-9))
        throw DomainError("limit_geometry_eval: z outside fattened piece");

    const cplx c = sys.base_point[theta0];
    // k_n(z) = (z - c) * prod dd_i / p'_i(c-orbit): tracked as ratio
    // products, the difference orbit never hits cancellation
    cplx cc = c, diff = z - c;
    cplx kfac{1.0, 0.0}, dkfac{1.0, 0.0};
    const double q = sys.contraction;
    const double tail_factor = q / (1.0 - q);

    cplx prev_k{};
    double prev_delta = std::numeric_limits<double>::infinity();
    const int max_n = std::min(theta.depth(), kMaxEvalDepth);
    for (int n = 1; n <= max_n; ++n) {
        const int from = theta.letters[theta.letters.size() - 1 - n];
        const int to = theta.letters[theta.letters.size() - n];
        const Polynomial& p = sys.branch_of(from, to);
        const cplx zc = cc + diff;
        const cplx dd = divided_difference(p, zc, cc);
        const cplx dpc = p.deriv(cc);
        kfac *= dd / dpc;
        dkfac *= p.deriv(zc) / dpc;
        diff *= dd;
        cc = p.eval(cc);
        const cplx k = kfac * (z - c);
        const cplx dk = dkfac;
        if (sys.affine) return {k, dk, 0.0, n};  // k = z - c exactly
        if (n >= 2) {
            const double delta = std::abs(k - prev_k);
            const double err = std::max(delta, prev_delta * q) * tail_factor;
            if (err <= tol) return {k, dk, err, n};
            if (n == max_n)
                throw DepthError("limit_geometry_eval: stored tail too shallow",
                                 err);
            prev_delta = delta;
        }
        prev_k = k;
    }
    // depth-1 tails: only reachable with max_n == 1
    throw DepthError("limit_geometry_eval: stored tail too shallow", 1.0);
}

RenormMap renorm_affine(const CantorSystem& sys, const ThetaTail& theta,
                        const Word& w, double tol) {
    check_tail(sys.shift, theta);
    if (w.empty() || w.first() != theta.last())
        throw InputError("renorm_affine: word must start with theta_0");
    const Deriv fw = compose_branch(sys, w, sys.base_point[w.last()]);
    const cplx cw = fw.value;  // c_w = f_w(c_last)

    RenormMap out;
    const LimitEval beta = limit_geometry_eval(sys, theta, cw, tol);
    out.map.beta = beta.value;
    out.beta_err = beta.error_bound;

    // DF = lim (Df_{theta_n}(c))^-1 Df_{theta_n}(c_w) Df_w(c_last),
    // iterated until the successive difference drops below tol/10. The
    // quotient is tracked as a product of per-step derivative ratios.
    const cplx c = sys.base_point[theta.last()];
    cplx cc = c, diff = cw - c, ratio{1.0, 0.0};
    cplx alpha = fw.deriv;
    double prev_diff = std::numeric_limits<double>::infinity();
    const int max_n = std::min(theta.depth(), kMaxEvalDepth);
    for (int n = 1; n <= max_n; ++n) {
        const int from = theta.letters[theta.letters.size() - 1 - n];
        const int to = theta.letters[theta.letters.size() - n];
        const Polynomial& p = sys.branch_of(from, to);
        const cplx zc = cc + diff;
        ratio *= p.deriv(zc) / p.deriv(cc);
        diff *= divided_difference(p, zc, cc);
        cc = p.eval(cc);
        const cplx next = ratio * fw.deriv;
        const double diff = std::abs(next - alpha);
        if (diff > prev_diff) out.monotone = false;
        alpha = next;
        out.depth_used = n;
        if (sys.affine) {  // the ratio is exact at every depth
            out.alpha_err = 0.0;
            out.map.alpha = alpha;
            return out;
        }
        if (n >= 2 && diff <= tol / 10.0) {
            out.alpha_err = diff;
            out.map.alpha = alpha;
            return out;
        }
        prev_diff = diff;
    }
    if (max_n >= 2 && prev_diff <= tol / 10.0) {
        out.alpha_err = prev_diff;
        out.map.alpha = alpha;
        return out;
    }
    throw DepthError("renorm_affine: stored tail too shallow", prev_diff);
}

cplx limit_inverse(const CantorSystem& sys, const ThetaTail& theta, cplx x,
                   double tol) {
    const int theta0 = theta.last();
    const Disc dom = sys.fattened_piece(theta0);
    cplx z = sys.base_point[theta0] + x;  // exact for affine systems
    for (int it = 0; it < 60; ++it) {
        if (!dom.contains(z, dom.radius * 0.5))
            throw DomainError("limit_inverse: left the invertible region");
        const LimitEval e = limit_geometry_eval(sys, theta, z, tol / 10.0);
        const cplx r = e.value - x;
        if (std::abs(r) <= tol) return z;
        z -= r / e.deriv;
    }
    throw DomainError("limit_inverse: Newton did not converge");
}

cplx nea_witness(const CantorSystem& sys, const ThetaTail& theta0,
                 const ThetaTail& theta1, cplx x0, double h) {
    if (theta0.last() != theta1.last())
        throw InputError("nea_witness: tails must share theta_0");
    const double tol = 1e-12;
    auto g = [&](cplx x) {
        const cplx z = limit_inverse(sys, theta0, x, tol);
        return limit_geometry_eval(sys, theta1, z, tol).value;
    };
    auto second = [&](double step) {
        return (g(x0 + step) - 2.0 * g(x0) + g(x0 - step)) / (step * step);
    };
    const cplx d2h = second(h);
    const cplx d2h2 = second(h / 2.0);
    return (4.0 * d2h2 - d2h) / 3.0;
}

LimitBounds limit_piece_bounds(const CantorSystem& sys, std::uint64_t seed) {
    LimitBounds out;
    out.per_letter.resize(sys.shift.size());
    for (int a = 0; a < sys.shift.size(); ++a) {
        if (sys.affine) {
            // k^theta = z - c_a exactly
            out.per_letter[a] =
                sys.piece[a].radius + std::abs(sys.piece[a].center - sys.base_point[a]);
            continue;
        }
        double m = 0.0;
        for (int ti = 0; ti < 8; ++ti) {
            const ThetaTail tail = random_tail(sys, a, 24, seed + 131 * ti + a);
            for (int i = 0; i < 64; ++i) {
                const double ang = 2.0 * std::numbers::pi * i / 64;
                const cplx z = sys.piece[a].center +
                               sys.piece[a].radius *
                                   cplx(std::cos(ang), std::sin(ang));
                const auto e = limit_geometry_eval(sys, tail, z, 1e-9);
                m = std::max(m, std::abs(e.value) + e.error_bound);
            }
        }
        out.per_letter[a] = 1.15 * m;  // sampled sup, flagged heuristic
    }
    return out;
}

LineFitResult essentially_real_test(const CantorSystem& sys,
                                    const ThetaTail& theta, int samples,
                                    double tol, std::uint64_t seed) {
    if (samples < 3)
        throw InputError("essentially_real_test: need at least 3 samples");
    check_tail(sys.shift, theta);
    const int theta0 = theta.last();
    std::vector<cplx> pts;
    pts.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const Word w = random_word(sys, theta0, 20, seed + 977 * i);
        const Itinerary it = cylinder_base_itinerary(sys, w);
        const cplx x = point_from_itinerary(sys, it, tol / 100.0);
        pts.push_back(limit_geometry_eval(sys, theta, x, tol / 100.0).value);
    }
    cplx mean = 0.0;
    for (cplx p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (cplx p : pts) {
        const cplx d = p - mean;
        sxx += d.real() * d.real();
        sxy += d.real() * d.imag();
        syy += d.imag() * d.imag();
    }
    // principal axis of the 2x2 covariance
    const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
    const double lam = tr / 2.0 + std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    cplx dir;
    if (std::abs(sxy) > 1e-300)
        dir = cplx(lam - syy, sxy);
    else
        dir = sxx >= syy ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    dir /= std::abs(dir);
    const cplx normal(-dir.imag(), dir.real());
    double dev = 0.0;
    for (cplx p : pts) {
        const cplx d = p - mean;
        dev = std::max(dev,
                       std::abs(d.real() * normal.real() + d.imag() * normal.imag()));
    }
    return {dev < tol, dev, mean, dir};
}

}  // namespace cantorkit
