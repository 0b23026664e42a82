#include "cantorkit/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cantorkit {

namespace {
constexpr int kMaxDepth = 400;

// Odd smoothstep of order 2m+1 on [0,1].
struct Smoothstep {
    std::vector<double> coef;  // of u^(m+1) .. u^(2m+1)
    int m;

    explicit Smoothstep(int order) {
        m = std::max(2, (order - 1) / 2);
        coef.resize(m + 1);
        auto binom = [](int n, int r) {
            double v = 1.0;
            for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
            return v;
        };
        for (int j = 0; j <= m; ++j)
            coef[j] = ((j % 2) ? -1.0 : 1.0) * binom(m + j, j) *
                      binom(2 * m + 1, m - j);
    }
    double eval(double u) const {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        double s = 0.0;
        for (int j = m; j >= 0; --j) s = s * u + coef[j];
        return s * std::pow(u, m + 1);
    }
    // sup |d^j/du^j| on [0,1] by a fine mesh
    double deriv_sup(int j) const {
        if (j == 0) return 1.0;
        if (j > 2 * m + 1) return 0.0;
        const int N = 4096;
        const double h = 1.0 / N;
        std::vector<double> v(N + 1);
        for (int i = 0; i <= N; ++i) v[i] = eval(i * h);
        for (int d = 0; d < j; ++d) {
            for (int i = 0; i + 1 < static_cast<int>(v.size()); ++i)
                v[i] = (v[i + 1] - v[i]) / h;
            v.pop_back();
        }
        double s = 0.0;
        for (double x : v) s = std::max(s, std::abs(x));
        return s;
    }
};

}  // namespace

int PerturbationFamily::sigma0_index(const Word& w) const {
    int node = 0;
    for (size_t i = 0; i < w.letters.size(); ++i) {
        if (trie_word[node] >= 0)
            return sigma0[trie_word[node]] == w ? trie_word[node] : -1;
        node = trie_child[node][w.letters[i]];
        if (node < 0) return -1;
    }
    return trie_word[node] >= 0 && sigma0[trie_word[node]] == w
               ? trie_word[node]
               : -1;
}

PerturbationFamily build_family(const CantorSystem& sys, double rho, int k,
                                double c5, double c0) {
    if (k < 2) throw InputError("build_family: k must be >= 2");
    PerturbationFamily fam;
    fam.rho = rho;
    fam.k = k;
    fam.c5 = c5;
    fam.c0 = c0;
    fam.sigma0 = partition_words(sys, std::pow(rho, 1.0 / k), c0);
    fam.sigma1_slot.assign(fam.sigma0.size(), -1);
    for (size_t i = 0; i < fam.sigma0.size(); ++i)
        if (sigma1_admits(sys, fam.sigma0[i], rho, k, c0))
            fam.sigma1_slot[i] = fam.sigma1_count++;

    // largest separation fraction keeping the hat neighborhoods disjoint,
    // with a factor-2 safety margin
    double frac = std::numeric_limits<double>::infinity();
    std::vector<double> diam(fam.sigma0.size());
    for (size_t i = 0; i < fam.sigma0.size(); ++i)
        diam[i] = piece_diameter(sys, fam.sigma0[i]);
    for (size_t i = 0; i < fam.sigma0.size(); ++i)
        for (size_t j = i + 1; j < fam.sigma0.size(); ++j) {
            if (fam.sigma0[i].first() != fam.sigma0[j].first()) continue;
            const double g = cylinder_gap(sys, fam.sigma0[i], fam.sigma0[j], 6);
            frac = std::min(frac, g / (diam[i] + diam[j]));
        }
    // different first letters separate at the piece level
    for (int a = 0; a < sys.shift.size(); ++a)
        for (int b = a + 1; b < sys.shift.size(); ++b) {
            const double g = cylinder_gap(sys, Word{{a}}, Word{{b}}, 8,
                                          2.0 * sys.delta_star);
            const double dsum = 2.0 * (sys.piece[a].radius + sys.piece[b].radius);
            frac = std::min(frac, g / dsum);
        }
    if (!(frac > 0.0))
        throw InputError("build_family: rho too large, hat neighborhoods overlap");
    fam.c4_tilde = 0.5 * frac;

    // context trie over the prefix-free cover
    fam.trie_child.assign(1, std::vector<int>(sys.shift.size(), -1));
    fam.trie_word.assign(1, -1);
    for (size_t i = 0; i < fam.sigma0.size(); ++i) {
        int node = 0;
        for (int l : fam.sigma0[i].letters) {
            if (fam.trie_child[node][l] < 0) {
                fam.trie_child[node][l] =
                    static_cast<int>(fam.trie_word.size());
                fam.trie_child.emplace_back(sys.shift.size(), -1);
                fam.trie_word.push_back(-1);
            }
            node = fam.trie_child[node][l];
        }
        fam.trie_word[node] = static_cast<int>(i);
    }

    // bump derivative bounds ||D^j chi|| <= C~ rho^(-j/k), j <= k
    fam.bump_degree = 2 * std::max(2, k) + 1;
    const Smoothstep prof(fam.bump_degree);
    double cbar = 0.0;
    for (size_t i = 0; i < fam.sigma0.size(); ++i) {
        const double width = 0.5 * fam.c4_tilde * diam[i];
        for (int j = 1; j <= k; ++j)
            cbar = std::max(cbar, prof.deriv_sup(j) / std::pow(width, j) *
                                      std::pow(rho, static_cast<double>(j) / k));
    }
    fam.bump_cbar = cbar;
    return fam;
}

OmegaVector sample_omega(const PerturbationFamily& fam, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    OmegaVector om;
    om.seed = seed;
    om.values.reserve(fam.sigma1_count);
    for (int i = 0; i < fam.sigma1_count; ++i) {
        cplx z;
        do {
            z = cplx(u(rng), u(rng));
        } while (std::norm(z) > 1.0);
        om.values.push_back(z);
    }
    return om;
}

cplx perturbed_branch(const PerturbationFamily& fam, const CantorSystem& sys,
                      int a, int b, const Word& context,
                      const OmegaVector& omega, cplx z) {
    const int idx = fam.sigma0_index(context);
    if (idx < 0) throw InputError("perturbed_branch: context not in Sigma_0");
    if (context.letters.size() < 2 || context.letters[0] != a ||
        context.letters[1] != b)
        throw InputError("perturbed_branch: context must start with the pair");
    const Word inner{std::vector<int>(context.letters.begin() + 1,
                                      context.letters.end())};
    const Disc dom = piece_enclosure(sys, inner);
    if (!dom.contains(z, fam.rho + 1e-12))
        throw DomainError("perturbed_branch: z outside V_rho of the cylinder");
    const cplx off = fam.in_sigma1(idx)
                         ? fam.eps() * omega.of_slot(fam.sigma1_slot[idx])
                         : cplx{};
    return sys.branch_of(a, b).eval(z) + off;
}

Deriv perturbed_compose(const PerturbationFamily& fam, const CantorSystem& sys,
                        const OmegaVector& omega, const Word& w,
                        const Itinerary& future, cplx z) {
    if (w.empty()) return {z, 1.0};
    if (future.first() != w.last())
        throw InputError("perturbed_compose: future must start with w.last()");
    const int m = w.length();
    cplx v = z, d = 1.0;
    for (int j = m - 1; j >= 0; --j) {
        const int ctx = fam.context_of([&](int i) {
            return i < m - j ? w.letters[j + i] : future.at(i - (m - j));
        });
        if (ctx < 0)
            throw InputError("perturbed_compose: future leaves the word tree");
        const Polynomial& p = sys.branch_of(w.letters[j], w.letters[j + 1]);
        d *= p.deriv(v);
        v = p.eval(v);
        if (fam.in_sigma1(ctx))
            v += fam.eps() * omega.of_slot(fam.sigma1_slot[ctx]);
    }
    return {v, d};
}

cplx perturbed_point(const PerturbationFamily& fam, const CantorSystem& sys,
                     const OmegaVector& omega, const Itinerary& itin,
                     double tol) {
    const double r0 = sys.piece[itin.first()].radius + 1.0;
    int depth = 1;
    if (tol < r0)
        depth = static_cast<int>(std::ceil(std::log(tol / r0) /
                                           std::log(sys.contraction))) + 1;
    const Word w = itin.prefix_word(depth + 1);
    return perturbed_compose(fam, sys, omega, w, itin.shifted(depth),
                             sys.piece[w.last()].center)
        .value;
}

namespace {

// One perturbed branch step of the incremental tail walk: the stream for
// the context starts at theta_{-n} and continues through theta_0 into the
// point's symbolic future.
struct TailStepper {
    const PerturbationFamily& fam;
    const CantorSystem& sys;
    const OmegaVector& omega;
    const ThetaTail& theta;

    int context(int n, const Itinerary& cont) const {
        const int L = static_cast<int>(theta.letters.size());
        return fam.context_of([&](int i) {
            return i <= n ? theta.letters[L - 1 - n + i] : cont.at(i - n - 1);
        });
    }
    cplx offset(int n, const Itinerary& cont) const {
        const int ctx = context(n, cont);
        if (ctx < 0)
            throw InputError("perturbed tail walk: stream leaves the tree");
        return fam.in_sigma1(ctx)
                   ? fam.eps() * omega.of_slot(fam.sigma1_slot[ctx])
                   : cplx{};
    }
};

cplx divided_difference(const Polynomial& p, cplx z, cplx c) {
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

LimitEval perturbed_limit_eval(const PerturbationFamily& fam,
                               const CantorSystem& sys,
                               const OmegaVector& omega, const ThetaTail& theta,
                               const Itinerary& point, double tol) {
    check_tail(sys.shift, theta);
    const int theta0 = theta.last();
    if (point.first() != theta0)
        throw InputError("perturbed_limit_eval: point must start at theta_0");
    const Itinerary base = sys.base_itinerary[theta0];
    const cplx c = perturbed_point(fam, sys, omega, base, 1e-14);
    const cplx x = perturbed_point(fam, sys, omega, point, 1e-14);

    const TailStepper step{fam, sys, omega, theta};
    cplx cc = c, diff = x - c, dc = 1.0;
    const double q = sys.contraction;
    const double tail_factor = q / (1.0 - q);
    cplx prev_k{};
    double prev_delta = std::numeric_limits<double>::infinity();
    const int max_n = std::min(theta.depth(), kMaxDepth);
    for (int n = 1; n <= max_n; ++n) {
        const int from = theta.letters[theta.letters.size() - 1 - n];
        const int to = theta.letters[theta.letters.size() - n];
        const Polynomial& p = sys.branch_of(from, to);
        const cplx zc = cc + diff;
        const cplx off_z = step.offset(n - 1, point);
        const cplx off_c = step.offset(n - 1, base);
        dc *= p.deriv(cc);
        diff = divided_difference(p, zc, cc) * diff + (off_z - off_c);
        cc = p.eval(cc) + off_c;
        const cplx k = diff / dc;
        if (n >= 2) {
            const double delta = std::abs(k - prev_k);
            const double err = std::max(delta, prev_delta * q) * tail_factor;
            if (err <= tol) return {k, cplx{1.0, 0.0}, err, n};
            if (n == max_n)
                throw DepthError("perturbed_limit_eval: tail too shallow", err);
            prev_delta = delta;
        }
        prev_k = k;
    }
    throw DepthError("perturbed_limit_eval: tail too shallow", 1.0);
}

RenormMap perturbed_renorm_affine(const PerturbationFamily& fam,
                                  const CantorSystem& sys,
                                  const OmegaVector& omega,
                                  const ThetaTail& theta, const Word& w,
                                  double tol) {
    check_tail(sys.shift, theta);
    if (w.empty() || w.first() != theta.last())
        throw InputError("perturbed_renorm_affine: word must start at theta_0");
    const Itinerary cw_itin = cylinder_base_itinerary(sys, w);
    const Itinerary base_last = sys.base_itinerary[w.last()];
    const cplx c_last = perturbed_point(fam, sys, omega, base_last, 1e-14);
    const Deriv fw =
        perturbed_compose(fam, sys, omega, w, base_last, c_last);

    RenormMap out;
    const LimitEval beta =
        perturbed_limit_eval(fam, sys, omega, theta, cw_itin, tol);
    out.map.beta = beta.value;
    out.beta_err = beta.error_bound;

    const Itinerary base0 = sys.base_itinerary[theta.last()];
    const cplx c0 = perturbed_point(fam, sys, omega, base0, 1e-14);
    const TailStepper step{fam, sys, omega, theta};
    cplx cc = c0, zc = fw.value, ratio = 1.0;
    cplx alpha = fw.deriv;
    double prev_diff = std::numeric_limits<double>::infinity();
    const int max_n = std::min(theta.depth(), kMaxDepth);
    for (int n = 1; n <= max_n; ++n) {
        const int from = theta.letters[theta.letters.size() - 1 - n];
        const int to = theta.letters[theta.letters.size() - n];
        const Polynomial& p = sys.branch_of(from, to);
        ratio *= p.deriv(zc) / p.deriv(cc);
        zc = p.eval(zc) + step.offset(n - 1, cw_itin);
        cc = p.eval(cc) + step.offset(n - 1, base0);
        const cplx next = ratio * fw.deriv;
        const double diff = std::abs(next - alpha);
        if (diff > prev_diff) out.monotone = false;
        alpha = next;
        out.depth_used = n;
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
    throw DepthError("perturbed_renorm_affine: tail too shallow", prev_diff);
}

OmegaVector omega_star(const PerturbationFamily& fam, const OmegaVector& omega,
                       const std::vector<Word>& sigma2,
                       const ThetaTail& theta) {
    const Word* end = nullptr;
    for (const auto& w : sigma2)
        if (theta.ends_with(w)) {
            end = &w;
            break;
        }
    if (!end)
        throw InputError("omega_star: theta ends with no sigma2 word "
                         "(tail too shallow?)");
    OmegaVector out = omega;
    for (size_t i = 0; i < fam.sigma0.size(); ++i) {
        const int slot = fam.sigma1_slot[i];
        if (slot >= 0 && fam.sigma0[i].starts_with(*end))
            out.values[slot] = cplx{};
    }
    return out;
}

cplx expanding_map_eval(const CantorSystem& sys, cplx z) {
    // letter whose fattened piece holds z
    int a = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int l = 0; l < sys.shift.size(); ++l) {
        const double d = std::abs(z - sys.piece[l].center) - sys.piece[l].radius;
        if (d < best) {
            best = d;
            a = l;
        }
    }
    if (best > sys.delta_star + 1e-9)
        throw DomainError("expanding_map_eval: z outside all pieces");
    for (int b : sys.shift.successors(a)) {
        const Polynomial& p = sys.branch_of(a, b);
        cplx x = sys.piece[b].center;
        bool ok = false;
        for (int it = 0; it < 80; ++it) {
            const cplx r = p.eval(x) - z;
            if (std::abs(r) < 1e-13) {
                ok = true;
                break;
            }
            x -= r / p.deriv(x);
        }
        if (ok && sys.fattened_piece(b).contains(x, 1e-9)) return x;
    }
    throw DomainError("expanding_map_eval: no branch preimage found");
}

MapEval perturbed_map_eval(const PerturbationFamily& fam,
                           const CantorSystem& sys, const OmegaVector& omega,
                           cplx z) {
    // distance bounds to each Sigma_0 cylinder via a refined cover
    struct Near {
        int idx;
        double lo, hi, diam;
    };
    std::vector<Near> near;
    for (size_t i = 0; i < fam.sigma0.size(); ++i) {
        const Disc e = piece_enclosure(sys, fam.sigma0[i]);
        const double diam = 2.0 * e.radius;
        const double quick = std::abs(z - e.center) - e.radius;
        if (quick > fam.c4_tilde * diam) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = lo;
        for (const Disc& d : refined_cover(sys, fam.sigma0[i], 2)) {
            const double dist = std::abs(z - d.center);
            lo = std::min(lo, dist - d.radius);
            hi = std::min(hi, dist + d.radius);
        }
        near.push_back({static_cast<int>(i), std::max(lo, 0.0), hi, diam});
    }
    if (near.empty()) return {expanding_map_eval(sys, z), PerturbZone::outside};

    for (const Near& n : near) {
        if (n.hi <= 0.25 * fam.c4_tilde * n.diam) {
            // inner region of the displayed case analysis
            const cplx off =
                fam.in_sigma1(n.idx)
                    ? fam.eps() * omega.of_slot(fam.sigma1_slot[n.idx])
                    : cplx{};
            return {expanding_map_eval(sys, z - off), PerturbZone::inner};
        }
    }
    bool in_shell = false;
    for (const Near& n : near)
        if (n.lo < fam.c4_tilde * n.diam) in_shell = true;
    if (!in_shell) return {expanding_map_eval(sys, z), PerturbZone::outside};

    // transition shell: integrate the bump-weighted field for time one
    const Smoothstep prof(fam.bump_degree);
    auto field = [&](cplx p) {
        cplx X{};
        for (const Near& n : near) {
            if (fam.sigma1_slot[n.idx] < 0) continue;
            double lo = std::numeric_limits<double>::infinity(), hi = lo;
            for (const Disc& d : refined_cover(sys, fam.sigma0[n.idx], 2)) {
                const double dist = std::abs(p - d.center);
                lo = std::min(lo, dist - d.radius);
                hi = std::min(hi, dist + d.radius);
            }
            const double mid = 0.5 * (std::max(lo, 0.0) + hi);
            const double w = 0.5 * fam.c4_tilde * n.diam;
            const double chi = 1.0 - prof.eval((mid - w) / w);
            X -= fam.eps() * chi * omega.of_slot(fam.sigma1_slot[n.idx]);
        }
        return X;
    };
    cplx p = z;
    const int steps = 16;
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        const cplx k1 = field(p);
        const cplx k2 = field(p + 0.5 * h * k1);
        const cplx k3 = field(p + 0.5 * h * k2);
        const cplx k4 = field(p + h * k3);
        p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return {expanding_map_eval(sys, p), PerturbZone::shell};
}

HarnessReport bounds_harness(const CantorSystem& sys,
                             const std::vector<double>& rho_grid, int k,
                             double c5, int n_omega, int n_theta,
                             std::uint64_t seed, double c0) {
    if (rho_grid.size() < 3)
        throw InputError("bounds_harness: need at least 3 rho values");
    HarnessReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double rho : rho_grid) {
        const PerturbationFamily fam = build_family(sys, rho, k, c5, c0);
        HarnessRow row{rho, 0.0, 0.0, 0.0};
        for (int oi = 0; oi < n_omega; ++oi) {
            const OmegaVector om = sample_omega(fam, seed + 1000 * oi + 1);

            // (i) branch displacement over Sigma_0 words and extensions
            for (size_t wi = 0; wi < fam.sigma0.size(); wi += 7) {
                Word w = fam.sigma0[wi];
                const Word ext = random_word(sys, w.last(), 3, seed + wi);
                w = concat(w, ext);
                const Itinerary fut = sys.base_itinerary[w.last()];
                const cplx cbase = sys.base_point[w.last()];
                for (int zi = 0; zi < 4; ++zi) {
                    const cplx z =
                        cbase + 0.4 * rho * cplx(u(rng), u(rng));
                    const cplx pv =
                        perturbed_compose(fam, sys, om, w, fut, z).value;
                    const cplx cv = compose_branch(sys, w, z).value;
                    row.sup_branch = std::max(row.sup_branch, std::abs(pv - cv));
                }
            }

            // (iii) limit geometry displacement at itinerary-matched points
            for (int ti = 0; ti < n_theta; ++ti) {
                const int a0 = ti % sys.shift.size();
                const ThetaTail tail =
                    random_tail(sys, a0, 70, seed + 77 * ti + oi);
                for (int pi = 0; pi < 3; ++pi) {
                    const Word pw =
                        random_word(sys, a0, 10, seed + 13 * pi + ti);
                    const Itinerary it = cylinder_base_itinerary(sys, pw);
                    const cplx kp =
                        perturbed_limit_eval(fam, sys, om, tail, it, 1e-11)
                            .value;
                    const cplx x = point_from_itinerary(sys, it, 1e-13);
                    const cplx kc =
                        limit_geometry_eval(sys, tail, x, 1e-11).value;
                    row.sup_limit = std::max(row.sup_limit, std::abs(kp - kc));
                }
            }

            // (iv) log-scale displacement of cylinder sizes
            for (size_t wi = 0; wi < fam.sigma0.size(); wi += 11) {
                const Word& w = fam.sigma0[wi];
                const int a0 = w.first();
                const ThetaTail tail =
                    random_tail(sys, a0, 70, seed + 31 * wi + oi);
                const RenormMap Fc = renorm_affine(sys, tail, w, 1e-10);
                const RenormMap Fp =
                    perturbed_renorm_affine(fam, sys, om, tail, w, 1e-10);
                const ThetaTail ext = tail.append(w);
                double dc = 0.0, dp = 0.0;
                std::vector<cplx> kc, kp;
                for (int pi = 0; pi < 5; ++pi) {
                    const Word pw =
                        random_word(sys, w.last(), 9, seed + 7 * pi + wi);
                    const Itinerary it = cylinder_base_itinerary(sys, pw);
                    kc.push_back(limit_geometry_eval(
                                     sys, ext, point_from_itinerary(sys, it, 1e-13),
                                     1e-11)
                                     .value);
                    kp.push_back(
                        perturbed_limit_eval(fam, sys, om, ext, it, 1e-11)
                            .value);
                }
                for (size_t i = 0; i < kc.size(); ++i)
                    for (size_t j = i + 1; j < kc.size(); ++j) {
                        dc = std::max(dc, std::abs(kc[i] - kc[j]));
                        dp = std::max(dp, std::abs(kp[i] - kp[j]));
                    }
                const double lr =
                    std::abs(std::log(std::abs(Fp.map.alpha) * dp) -
                             std::log(std::abs(Fc.map.alpha) * dc));
                row.sup_logscale = std::max(row.sup_logscale, lr);
            }
        }
        rep.rows.push_back(row);
    }

    auto slope = [&](auto get) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(rep.rows.size());
        for (const auto& r : rep.rows) {
            const double x = std::log(r.rho), y = std::log(get(r));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    rep.slope_branch = slope([](const HarnessRow& r) { return r.sup_branch; });
    rep.slope_limit = slope([](const HarnessRow& r) { return r.sup_limit; });
    rep.slope_logscale =
        slope([](const HarnessRow& r) { return r.sup_logscale; });
    auto fitc = [&](auto get, double expo) {
        double acc = 0.0;
        for (const auto& r : rep.rows)
            acc += std::log(get(r)) - expo * std::log(r.rho);
        return std::exp(acc / rep.rows.size());
    };
    rep.c18c5_branch =
        fitc([](const HarnessRow& r) { return r.sup_branch; }, 1.0 + 0.5 / k);
    rep.c18c5_limit =
        fitc([](const HarnessRow& r) { return r.sup_limit; }, 1.0 - 0.5 / k);
    return rep;
}

}  // namespace cantorkit
