#include "cantorkit/system.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cantorkit/sigma.hpp"

namespace cantorkit {

namespace {
constexpr double kPolySupSafety = 1.05;  // mesh max -> certified sup, deg >= 2
constexpr int kSupMesh = 512;
}  // namespace

cplx Polynomial::eval(cplx z) const {
    cplx r = 0.0;
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) r = r * z + *it;
    return r;
}

cplx Polynomial::deriv(cplx z) const {
    cplx r = 0.0;
    for (int i = degree(); i >= 1; --i)
        r = r * z + coef[i] * static_cast<double>(i);
    return r;
}

bool Polynomial::is_affine() const {
    for (size_t i = 2; i < coef.size(); ++i)
        if (coef[i] != cplx(0.0, 0.0)) return false;
    return true;
}

Word Itinerary::prefix_word(int nletters) const {
    Word w;
    w.letters.reserve(nletters);
    for (int i = 0; i < nletters; ++i) w.letters.push_back(at(i));
    return w;
}

Itinerary Itinerary::shifted(int n) const {
    Itinerary out;
    const int pre = static_cast<int>(preperiod.size());
    if (n < pre) {
        out.preperiod.assign(preperiod.begin() + n, preperiod.end());
        out.period = period;
        return out;
    }
    const int m = static_cast<int>(period.size());
    const int r = (n - pre) % m;
    out.period.reserve(m);
    for (int i = 0; i < m; ++i) out.period.push_back(period[(r + i) % m]);
    return out;
}

Itinerary cylinder_base_itinerary(const CantorSystem& sys, const Word& w) {
    Itinerary it;
    it.preperiod.assign(w.letters.begin(), w.letters.end() - 1);
    const Itinerary& base = sys.base_itinerary[w.last()];
    it.preperiod.insert(it.preperiod.end(), base.preperiod.begin(),
                        base.preperiod.end());
    it.period = base.period;
    return it;
}

int CantorSystem::transition(int a, int b) const {
    const int t = tid[a][b];
    if (t < 0) throw InputError("transition (" + shift.letters[a] + "," +
                                shift.letters[b] + ") not admissible");
    return t;
}

const Polynomial& CantorSystem::branch_of(int a, int b) const {
    return branch[transition(a, b)];
}

double CantorSystem::min_piece_diameter() const {
    double m = piece.front().radius;
    for (const auto& d : piece) m = std::min(m, d.radius);
    return 2.0 * m;
}

namespace {

// max/min of |p'| over the closed disc; |p'| attains its max on the
// boundary (maximum modulus), the min may be interior so we also walk
// a coarse polar grid.
std::pair<double, double> deriv_range(const Polynomial& p, const Disc& d) {
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kSupMesh; ++i) {
        const double ang = 2.0 * std::numbers::pi * i / kSupMesh;
        const cplx z = d.center + d.radius * cplx(std::cos(ang), std::sin(ang));
        const double v = std::abs(p.deriv(z));
        hi = std::max(hi, v);
        lo = std::min(lo, v);
    }
    for (int r = 0; r <= 8; ++r) {
        const double rad = d.radius * r / 8.0;
        for (int i = 0; i < 32; ++i) {
            const double ang = 2.0 * std::numbers::pi * i / 32;
            const cplx z = d.center + rad * cplx(std::cos(ang), std::sin(ang));
            lo = std::min(lo, std::abs(p.deriv(z)));
        }
    }
    return {hi, lo};
}

}  // namespace

void CantorSystem::prepare() {
    const int n = shift.size();
    transitions.clear();
    step_sup.clear();
    step_inf.clear();
    affine = true;
    if (static_cast<int>(tid.size()) != n)
        throw InputError("system: tid table size mismatch");

    std::vector<Polynomial> ordered;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (tid[a][b] >= 0) {
                const Polynomial& p = branch[tid[a][b]];
                transitions.emplace_back(a, b);
                ordered.push_back(p);
            }
    // reindex transitions in row-major order
    branch = std::move(ordered);
    int idx = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (tid[a][b] >= 0) tid[a][b] = idx++;

    contraction = 0.0;
    min_step = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < transitions.size(); ++t) {
        const auto [a, b] = transitions[t];
        auto [hi, lo] = deriv_range(branch[t], fattened_piece(b));
        if (!branch[t].is_affine()) {
            hi *= kPolySupSafety;
            lo /= kPolySupSafety;
            affine = false;
        }
        step_sup.push_back(hi);
        step_inf.push_back(lo);
        contraction = std::max(contraction, hi);
        min_step = std::min(min_step, lo);
    }

    // Base points from the declared itineraries; the enclosure radius of a
    // length-n prefix is piece_radius * product of step sups, so depth is
    // chosen from the contraction rate.
    base_point.assign(n, cplx{});
    if (contraction >= 1.0)
        throw InputError("system: some branch fails to contract (sup|Df| >= 1)");
    for (int a = 0; a < n; ++a) {
        const Itinerary& itin = base_itinerary[a];
        if (itin.first() != a)
            throw InputError("base itinerary of letter " + shift.letters[a] +
                             " must start with that letter");
        if (affine) {
            // solve the periodic fixed point in closed form
            const int m = static_cast<int>(itin.period.size());
            cplx al = 1.0, be = 0.0;
            for (int j = m - 1; j >= 0; --j) {
                const Polynomial& p =
                    branch_of(itin.period[j], itin.period[(j + 1) % m]);
                al *= p.coef[1];
                be = p.coef[1] * be + p.coef[0];
            }
            cplx x = be / (1.0 - al);
            for (int j = static_cast<int>(itin.preperiod.size()) - 1; j >= 0;
                 --j) {
                const int next = j + 1 < static_cast<int>(itin.preperiod.size())
                                     ? itin.preperiod[j + 1]
                                     : itin.period.front();
                const Polynomial& p = branch_of(itin.preperiod[j], next);
                x = p.coef[1] * x + p.coef[0];
            }
            base_point[a] = x;
        } else {
            base_point[a] = point_from_itinerary(*this, itin, 1e-14);
        }
    }
}

Deriv compose_branch(const CantorSystem& sys, const Word& w, cplx z) {
    if (w.empty()) return {z, 1.0};
    if (!admissible(sys.shift, w)) throw InputError("compose_branch: inadmissible word");
    const Disc dom = sys.fattened_piece(w.last());
    if (!dom.contains(z, 1e-9))
        throw DomainError("compose_branch: point outside fattened piece");
    cplx v = z, d = 1.0;
    for (int j = w.length() - 1; j >= 0; --j) {
        const Polynomial& p = sys.branch_of(w.letters[j], w.letters[j + 1]);
        d *= p.deriv(v);
        v = p.eval(v);
    }
    return {v, d};
}

Disc piece_enclosure(const CantorSystem& sys, const Word& w) {
    if (!admissible(sys.shift, w)) throw InputError("piece_enclosure: inadmissible word");
    cplx c = sys.piece[w.last()].center;
    double r = sys.piece[w.last()].radius;
    for (int j = w.length() - 1; j >= 0; --j) {
        const int t = sys.transition(w.letters[j], w.letters[j + 1]);
        r *= sys.step_sup[t];
        c = sys.branch[t].eval(c);
    }
    return {c, r};
}

double piece_diameter(const CantorSystem& sys, const Word& w) {
    return 2.0 * piece_enclosure(sys, w).radius;
}

cplx point_from_itinerary(const CantorSystem& sys, const Itinerary& itin,
                          double tol) {
    if (itin.period.empty()) throw InputError("itinerary needs a period");
    const double r0 = sys.piece[itin.first()].radius;
    int depth = 1;
    if (tol < r0) depth = static_cast<int>(std::ceil(std::log(tol / r0) /
                                                     std::log(sys.contraction))) + 1;
    depth = std::max(depth, 1);
    const Word w = itin.prefix_word(depth + 1);
    if (!admissible(sys.shift, w))
        throw InputError("itinerary is not admissible");
    return compose_branch(sys, w, sys.piece[w.last()].center).value;
}

std::vector<Disc> refined_cover(const CantorSystem& sys, const Word& w, int r) {
    std::vector<Word> frontier{w};
    for (int i = 0; i < r; ++i) {
        std::vector<Word> next;
        for (const auto& u : frontier)
            for (int b : sys.shift.successors(u.last())) {
                Word v = u;
                v.letters.push_back(b);
                next.push_back(std::move(v));
            }
        frontier = std::move(next);
    }
    std::vector<Disc> cover;
    cover.reserve(frontier.size());
    for (const auto& u : frontier) cover.push_back(piece_enclosure(sys, u));
    return cover;
}

double cylinder_gap(const CantorSystem& sys, const Word& a, const Word& b,
                    int max_depth, double target) {
    // Bilateral refinement: only discs near the opposite set can still
    // shrink the gap, so everything else is pruned before descending.
    std::vector<Word> fa{a}, fb{b};
    double best = -std::numeric_limits<double>::infinity();
    for (int r = 0; r <= max_depth; ++r) {
        std::vector<Disc> da, db;
        da.reserve(fa.size());
        db.reserve(fb.size());
        for (const auto& w : fa) da.push_back(piece_enclosure(sys, w));
        for (const auto& w : fb) db.push_back(piece_enclosure(sys, w));
        std::vector<double> mina(fa.size(), 1e300), minb(fb.size(), 1e300);
        double gap = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < da.size(); ++i)
            for (size_t j = 0; j < db.size(); ++j) {
                const double g = da[i].gap(db[j]);
                mina[i] = std::min(mina[i], g);
                minb[j] = std::min(minb[j], g);
                gap = std::min(gap, g);
            }
        best = std::max(best, gap);
        if (best > target || r == max_depth) break;
        // a child pair can improve the gap by at most the parents' radii
        auto refine = [&](std::vector<Word>& fr, const std::vector<Disc>& ds,
                          const std::vector<double>& mins) {
            std::vector<Word> next;
            for (size_t i = 0; i < fr.size(); ++i) {
                if (mins[i] > gap + 2.0 * ds[i].radius) continue;
                for (int s : sys.shift.successors(fr[i].last())) {
                    Word w = fr[i];
                    w.letters.push_back(s);
                    next.push_back(std::move(w));
                }
            }
            fr = std::move(next);
        };
        refine(fa, da, mina);
        refine(fb, db, minb);
        if (fa.empty() || fb.empty()) break;
        if (fa.size() > 4096 || fb.size() > 4096) break;  // genuinely tangled
    }
    return best;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks)
        os << (c.pass ? "PASS " : "FAIL ") << c.check << " (margin "
           << c.margin << (c.witness.empty() ? "" : ", " + c.witness) << ")\n";
    os << (pass ? "system valid" : "system INVALID") << "\n";
    return os.str();
}

ValidationReport validate_system(const CantorSystem& sys, int boundary_mesh,
                                 int interior_samples, std::uint64_t seed) {
    ValidationReport rep;
    auto add = [&](std::string name, bool ok, double margin, std::string wit) {
        rep.checks.push_back({std::move(name), ok, margin, std::move(wit)});
        rep.pass = rep.pass && ok;
    };

    const auto shift_problems = sys.shift.check();
    add("subshift-structure", shift_problems.empty(),
        shift_problems.empty() ? 0.0 : -1.0,
        shift_problems.empty() ? "" : shift_problems.front());
    add("topologically-mixing", is_mixing(sys.shift), 0.0, "");

    // Pairwise disjoint pieces after delta_star fattening, certified on
    // refined cylinder covers (disc hulls of fractal pieces may overlap
    // even when the pieces themselves are far apart).
    {
        double worst = std::numeric_limits<double>::infinity();
        std::string wit;
        for (int a = 0; a < sys.shift.size(); ++a)
            for (int b = a + 1; b < sys.shift.size(); ++b) {
                const double g =
                    cylinder_gap(sys, Word{{a}}, Word{{b}}, 8,
                                 2.0 * sys.delta_star) -
                    2.0 * sys.delta_star;
                if (g < worst) {
                    worst = g;
                    wit = sys.shift.letters[a] + "|" + sys.shift.letters[b];
                }
            }
        add("pieces-disjoint", worst > 0.0, worst, wit);
    }

    // Branch containment: f_(a,b)(fattened piece b) inside piece a, as a
    // disc bound plus a boundary mesh + interior samples.
    {
        double worst = std::numeric_limits<double>::infinity();
        std::string wit;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> uang(0.0, 2.0 * std::numbers::pi);
        std::uniform_real_distribution<double> urad(0.0, 1.0);
        for (size_t t = 0; t < sys.transitions.size(); ++t) {
            const auto [a, b] = sys.transitions[t];
            const Disc src = sys.fattened_piece(b);
            const Disc dst = sys.piece[a];
            const Polynomial& p = sys.branch[t];
            double m = dst.radius - std::abs(p.eval(src.center) - dst.center) -
                       sys.step_sup[t] * src.radius;
            for (int i = 0; i < boundary_mesh; ++i) {
                const double ang = 2.0 * std::numbers::pi * i / boundary_mesh;
                const cplx z =
                    src.center + src.radius * cplx(std::cos(ang), std::sin(ang));
                m = std::min(m, dst.radius - std::abs(p.eval(z) - dst.center));
            }
            for (int i = 0; i < interior_samples; ++i) {
                const cplx z = src.center +
                               src.radius * std::sqrt(urad(rng)) *
                                   std::polar(1.0, uang(rng));
                m = std::min(m, dst.radius - std::abs(p.eval(z) - dst.center));
            }
            if (m < worst) {
                worst = m;
                wit = sys.shift.letters[a] + "-" + sys.shift.letters[b];
            }
        }
        add("branch-containment", worst > 0.0, worst, wit);
    }

    // Contraction: sup |Df| <= 1/mu on the fattened source piece.
    {
        double worst = std::numeric_limits<double>::infinity();
        std::string wit;
        for (size_t t = 0; t < sys.transitions.size(); ++t) {
            const double m = 1.0 / sys.mu - sys.step_sup[t];
            if (m < worst) {
                worst = m;
                const auto [a, b] = sys.transitions[t];
                wit = sys.shift.letters[a] + "-" + sys.shift.letters[b];
            }
        }
        add("branch-contraction", worst >= 0.0, worst, wit);
    }

    // Branch derivatives bounded away from zero.
    {
        double worst = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < sys.transitions.size(); ++t)
            worst = std::min(worst, sys.step_inf[t]);
        add("derivative-nonvanishing", worst > 1e-12, worst, "");
    }

    // Base itineraries admissible and starting with their letter; base
    // point inside the piece.
    {
        double worst = std::numeric_limits<double>::infinity();
        std::string wit;
        bool ok = true;
        for (int a = 0; a < sys.shift.size(); ++a) {
            const auto& it = sys.base_itinerary[a];
            if (it.first() != a ||
                !admissible(sys.shift, it.prefix_word(
                                           static_cast<int>(it.preperiod.size() +
                                                            2 * it.period.size())))) {
                ok = false;
                wit = sys.shift.letters[a];
                worst = -1.0;
                break;
            }
            const double m = sys.piece[a].radius -
                             std::abs(sys.base_point[a] - sys.piece[a].center);
            if (m < worst) {
                worst = m;
                wit = sys.shift.letters[a];
            }
        }
        add("base-points", ok && worst > 0.0, worst, wit);
    }

    return rep;
}

DimensionEstimate dimension_estimate(const CantorSystem& sys,
                                     const std::vector<double>& rho_grid,
                                     double c0, std::uint64_t budget) {
    if (rho_grid.size() < 3)
        throw InputError("dimension_estimate: need at least 3 grid values");
    DimensionEstimate est;
    est.rho = rho_grid;
    std::vector<double> xs, ys;
    for (double rho : rho_grid) {
        const auto words = enumerate_sigma_rho(sys, rho, c0, budget);
        if (words.empty())
            throw InputError("dimension_estimate: empty Sigma(rho) at rho=" +
                             std::to_string(rho));
        est.counts.push_back(words.size());
        xs.push_back(std::log(1.0 / rho));
        ys.push_back(std::log(static_cast<double>(words.size())));
        est.pointwise.push_back(ys.back() / xs.back());
    }
    const size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    est.value = (n * sxy - sx * sy) / denom;
    const double icpt = (sy - est.value * sx) / n;
    double sse = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (est.value * xs[i] + icpt);
        sse += r * r;
        est.max_residual = std::max(est.max_residual, std::abs(r));
    }
    if (n > 2) est.stderr_ = std::sqrt(sse / (n - 2) / (sxx - sx * sx / n));
    return est;
}

}  // namespace cantorkit
