#include "cantorkit/configuration.hpp"

#include <algorithm>

namespace cantorkit {

RelConfig renormalize(const CantorSystem& sysA, const CantorSystem& sysB,
                      const RelConfig& u, const Word& w, const Word& wp,
                      double tol) {
    if (u.s == cplx{}) throw InputError("renormalize: s must be nonzero");
    RelConfig v = u;
    if (!w.empty() && w.length() > 0) v.theta = u.theta.append(w);
    if (!wp.empty() && wp.length() > 0) v.theta_p = u.theta_p.append(wp);
    const bool idA = w.empty() || w.length() == 0;
    const bool idB = wp.empty() || wp.length() == 0;
    if (idA && idB) return v;
    const RenormMap F = idA ? RenormMap{} : renorm_affine(sysA, u.theta, w, tol);
    const RenormMap Fp =
        idB ? RenormMap{} : renorm_affine(sysB, u.theta_p, wp, tol);
    v.s = (F.map.alpha / Fp.map.alpha) * u.s;
    v.t = (u.s * F.map.beta + u.t - Fp.map.beta) / Fp.map.alpha;
    return v;
}

ScaleTriple renormalize_scale(const CantorSystem& sysA,
                              const CantorSystem& sysB, const ScaleTriple& r,
                              const Word& w, const Word& wp, double tol) {
    RelConfig u{r.theta, r.theta_p, r.s, 0.0};
    const RelConfig v = renormalize(sysA, sysB, u, w, wp, tol);
    return {v.theta, v.theta_p, v.s};
}

std::vector<Disc> config_enclosures(const CantorSystem& sys,
                                    const ThetaTail& theta,
                                    const LimitBounds& bounds, cplx s, cplx t,
                                    int depth, double tol) {
    std::vector<Word> words{Word{{theta.last()}}};
    for (int i = 0; i < depth; ++i) {
        std::vector<Word> next;
        for (const auto& w : words)
            for (int b : sys.shift.successors(w.last())) {
                Word v = w;
                v.letters.push_back(b);
                next.push_back(std::move(v));
            }
        words = std::move(next);
    }
    std::vector<Disc> out;
    out.reserve(words.size());
    for (const auto& w : words) {
        const RenormMap F = renorm_affine(sys, theta, w, tol);
        const double rad = std::abs(F.map.alpha) * bounds.per_letter[w.last()] +
                           F.beta_err;
        out.push_back({s * F.map.beta + t, std::abs(s) * rad});
    }
    return out;
}

bool linked_test(const CantorSystem& sysA, const CantorSystem& sysB,
                 const RelConfig& u, int depth, double tol) {
    const LimitBounds ba = limit_piece_bounds(sysA);
    const LimitBounds bb = limit_piece_bounds(sysB);
    const auto ea = config_enclosures(sysA, u.theta, ba, u.s, u.t, depth, tol);
    const auto eb =
        config_enclosures(sysB, u.theta_p, bb, 1.0, 0.0, depth, tol);
    for (const auto& da : ea)
        for (const auto& db : eb)
            if (da.gap(db) <= tol) return true;
    return false;
}

namespace {

struct PairNode {
    Word wA, wB;
    cplx cA, cB;       // enclosure centers
    double rA, rB;     // enclosure radii (without eval error)
    double err;        // accumulated evaluation error
};

}  // namespace

Tri intersecting_test(const CantorSystem& sysA, const CantorSystem& sysB,
                      const RelConfig& u, const IntersectOptions& opt) {
    const LimitBounds ba = limit_piece_bounds(sysA);
    const LimitBounds bb = limit_piece_bounds(sysB);
    const double abs_s = std::abs(u.s);

    auto make_node = [&](Word wA, Word wB) -> PairNode {
        const RenormMap F = renorm_affine(sysA, u.theta, wA, opt.eval_tol);
        const RenormMap Fp = renorm_affine(sysB, u.theta_p, wB, opt.eval_tol);
        PairNode n{std::move(wA), std::move(wB), {}, {}, 0, 0, 0};
        n.cA = u.s * F.map.beta + u.t;
        n.cB = Fp.map.beta;
        n.rA = abs_s * std::abs(F.map.alpha) * ba.per_letter[n.wA.last()];
        n.rB = std::abs(Fp.map.alpha) * bb.per_letter[n.wB.last()];
        n.err = abs_s * F.beta_err + Fp.beta_err;
        return n;
    };

    // Depth-first, most-overlapping child first: a certifying pair is
    // reached in ~depth nodes when one exists, and "no" exhausts the
    // pruned tree.
    std::uint64_t nodes = 0;
    bool weak_leaf = false;
    std::vector<PairNode> stack;
    stack.push_back(
        make_node(Word{{u.theta.last()}}, Word{{u.theta_p.last()}}));
    while (!stack.empty()) {
        const PairNode node = std::move(stack.back());
        stack.pop_back();
        const double overlap = node.rA + node.rB - std::abs(node.cA - node.cB);
        if (overlap < -(node.err + opt.tol)) continue;  // not linked
        if (node.wA.length() >= opt.max_depth) {
            if (overlap > node.err + opt.tol) return Tri::yes;
            weak_leaf = true;
            continue;
        }
        std::vector<PairNode> kids;
        for (int a : sysA.shift.successors(node.wA.last()))
            for (int b : sysB.shift.successors(node.wB.last())) {
                if (++nodes > opt.node_budget) return Tri::undecided;
                Word wA = node.wA;
                wA.letters.push_back(a);
                Word wB = node.wB;
                wB.letters.push_back(b);
                kids.push_back(make_node(std::move(wA), std::move(wB)));
            }
        std::sort(kids.begin(), kids.end(),
                  [](const PairNode& x, const PairNode& y) {
                      return (x.rA + x.rB - std::abs(x.cA - x.cB)) <
                             (y.rA + y.rB - std::abs(y.cA - y.cB));
                  });
        for (auto& kid : kids) stack.push_back(std::move(kid));
    }
    return weak_leaf ? Tri::undecided : Tri::no;
}

}  // namespace cantorkit
