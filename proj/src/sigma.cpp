#include "cantorkit/sigma.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace cantorkit {

namespace {

struct SigmaBand {
    double lo, hi;  // [rho/c0, c0*rho]
};

SigmaBand band_of(double rho, double c0) {
    if (c0 < 1.0) throw InputError("c0 must be >= 1");
    if (!(rho > 0.0) || rho >= 1.0e9) throw InputError("rho must be positive");
    return {rho / c0, c0 * rho};
}

// DFS over the word tree carrying the enclosure radius product. Children
// only shrink, so recursion stops once the diameter falls below the band.
template <typename Visit>
void walk_words(const CantorSystem& sys, double lo, std::uint64_t budget,
                Visit&& visit) {
    std::uint64_t seen = 0;
    struct Frame {
        Word w;
        double radius;
    };
    for (int a = 0; a < sys.shift.size(); ++a) {
        std::vector<Frame> stack;
        stack.push_back({Word{{a}}, sys.piece[a].radius});
        while (!stack.empty()) {
            Frame f = std::move(stack.back());
            stack.pop_back();
            if (++seen > budget)
                throw BudgetError("word enumeration budget exceeded");
            const bool descend = visit(f.w, 2.0 * f.radius);
            if (!descend) continue;
            if (2.0 * f.radius < lo) continue;  // children are strictly smaller
            const auto succ = sys.shift.successors(f.w.last());
            for (auto it = succ.rbegin(); it != succ.rend(); ++it) {
                Word w = f.w;
                w.letters.push_back(*it);
                const int t = sys.transition(f.w.last(), *it);
                stack.push_back({std::move(w), f.radius * sys.step_sup[t]});
            }
        }
    }
}

}  // namespace

bool in_sigma_rho(const CantorSystem& sys, const Word& w, double rho,
                  double c0) {
    const auto b = band_of(rho, c0);
    const double d = piece_diameter(sys, w);
    return d >= b.lo && d <= b.hi;
}

std::vector<Word> enumerate_sigma_rho(const CantorSystem& sys, double rho,
                                      double c0, std::uint64_t budget) {
    const auto b = band_of(rho, c0);
    std::vector<Word> out;
    walk_words(sys, b.lo, budget, [&](const Word& w, double diam) {
        if (diam >= b.lo && diam <= b.hi) out.push_back(w);
        return true;
    });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Word> partition_words(const CantorSystem& sys, double rho,
                                  double c0, std::uint64_t budget) {
    const auto b = band_of(rho, c0);
    std::vector<Word> out;
    bool gap_skipped = false;
    walk_words(sys, b.lo, budget, [&](const Word& w, double diam) {
        if (diam >= b.lo && diam <= b.hi) {
            out.push_back(w);  // shortest-first: stop descending here
            return false;
        }
        if (diam < b.lo) gap_skipped = true;  // band was jumped over
        return true;
    });
    if (out.empty())
        throw InputError("partition_words: Sigma(rho) is empty at rho=" +
                         std::to_string(rho));
    if (gap_skipped)
        throw InputError(
            "partition_words: some branch skips the diameter band; "
            "increase c0");
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Start positions of subwords lying in the given band, grouped by letter
// sequence. Key: (offset, length) measured on w.
std::map<std::vector<int>, std::vector<int>> banded_subwords(
    const CantorSystem& sys, const Word& w, double lo, double hi) {
    std::map<std::vector<int>, std::vector<int>> occ;
    const int n = w.nletters();
    for (int len = 1; len <= n; ++len) {
        for (int i = 0; i + len <= n; ++i) {
            Word sub{std::vector<int>(w.letters.begin() + i,
                                      w.letters.begin() + i + len)};
            const double d = piece_diameter(sys, sub);
            if (d >= lo && d <= hi) occ[sub.letters].push_back(i);
        }
    }
    return occ;
}

}  // namespace

bool sigma1_admits(const CantorSystem& sys, const Word& w, double rho, int k,
                   double c0) {
    if (k < 2) throw InputError("k must be >= 2");
    const auto b = band_of(std::pow(rho, 1.0 / (3.0 * k)), c0);
    const auto occ = banded_subwords(sys, w, b.lo, b.hi);
    for (const auto& [seq, pos] : occ)
        if (pos.size() >= 2) return false;
    return true;
}

std::vector<Word> filter_sigma1(const CantorSystem& sys,
                                const std::vector<Word>& words, double rho,
                                int k, double c0) {
    std::vector<Word> out;
    for (const auto& w : words)
        if (sigma1_admits(sys, w, rho, k, c0)) out.push_back(w);
    return out;
}

bool nr_admits(const CantorSystem& sys, const Word& w, double rho, int k,
               double c0) {
    if (k < 2) throw InputError("k must be >= 2");
    const auto b1 = band_of(std::pow(rho, 1.0 / (3.0 * k)), c0);
    const auto occ1 = banded_subwords(sys, w, b1.lo, b1.hi);
    for (const auto& [seq, pos] : occ1)
        if (pos.size() >= 2) return false;
    const auto b2 = band_of(std::pow(rho, 1.0 / (6.0 * k)), c0);
    const auto occ2 = banded_subwords(sys, w, b2.lo, b2.hi);
    const int n = w.nletters();
    for (const auto& [seq, pos] : occ2) {
        const int len = static_cast<int>(seq.size());
        const bool at_end =
            std::find(pos.begin(), pos.end(), n - len) != pos.end();
        if (at_end && pos.size() >= 2) return false;
    }
    return true;
}

std::vector<Word> filter_nr(const CantorSystem& sys,
                            const std::vector<Word>& words, double rho, int k,
                            double c0) {
    std::vector<Word> out;
    for (const auto& w : words)
        if (nr_admits(sys, w, rho, k, c0)) out.push_back(w);
    return out;
}

bool independent(const CantorSystem& sys, const Word& w1, const Word& w2,
                 double rho, int k, double c0) {
    if (k < 2) throw InputError("k must be >= 2");
    const auto b = band_of(std::pow(rho, 1.0 / (2.0 * k)), c0);
    int common = 0;
    const int n = std::min(w1.nletters(), w2.nletters());
    while (common < n && w1.letters[common] == w2.letters[common]) ++common;
    for (int len = 1; len <= common; ++len) {
        const double d = piece_diameter(sys, w1.prefix(len));
        if (d >= b.lo && d <= b.hi) return false;
    }
    return true;
}

WedgeDistance wedge_distance(const CantorSystem& sys, const ThetaTail& t1,
                             const ThetaTail& t2) {
    if (t1.last() != t2.last())
        throw DomainError("wedge_distance: theta_0 letters differ");
    int common = 0;
    const int n = std::min(t1.depth(), t2.depth()) + 1;
    while (common < n &&
           t1.letters[t1.letters.size() - 1 - common] ==
               t2.letters[t2.letters.size() - 1 - common])
        ++common;
    if (common >= n) {
        // identical within stored depth: nesting gives only an upper bound
        const Word full = (t1.depth() <= t2.depth() ? t1 : t2).as_word();
        return {piece_diameter(sys, full), true};
    }
    Word wedge{std::vector<int>(t1.letters.end() - common, t1.letters.end())};
    return {piece_diameter(sys, wedge), false};
}

ThetaTail canonical_tail(const CantorSystem& sys, const Word& end, int depth) {
    std::vector<int> letters = end.letters;
    while (static_cast<int>(letters.size()) < depth) {
        const auto preds = sys.shift.predecessors(letters.front());
        if (preds.empty()) throw InputError("letter with no predecessor");
        letters.insert(letters.begin(), preds.front());
    }
    ThetaTail t{std::move(letters)};
    check_tail(sys.shift, t);
    return t;
}

ThetaTail random_tail(const CantorSystem& sys, int letter, int depth,
                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> letters{letter};
    while (static_cast<int>(letters.size()) < depth + 1) {
        const auto preds = sys.shift.predecessors(letters.front());
        std::uniform_int_distribution<size_t> pick(0, preds.size() - 1);
        letters.insert(letters.begin(), preds[pick(rng)]);
    }
    return ThetaTail{std::move(letters)};
}

Word random_word(const CantorSystem& sys, int first_letter, int length,
                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> letters{first_letter};
    for (int i = 0; i < length; ++i) {
        const auto succ = sys.shift.successors(letters.back());
        std::uniform_int_distribution<size_t> pick(0, succ.size() - 1);
        letters.push_back(succ[pick(rng)]);
    }
    return Word{std::move(letters)};
}

std::optional<Word> nr_extension(const CantorSystem& sys, const Word& end,
                                 double word_rho, double rho, int k, double c0,
                                 std::uint64_t budget) {
    const auto b = band_of(word_rho, c0);
    if (piece_diameter(sys, end) < b.lo) return std::nullopt;
    std::uint64_t seen = 0;
    std::vector<Word> stack{end};
    while (!stack.empty()) {
        Word w = std::move(stack.back());
        stack.pop_back();
        if (++seen > budget) return std::nullopt;
        const double d = piece_diameter(sys, w);
        if (d < b.lo) continue;
        if (d <= b.hi && nr_admits(sys, w, rho, k, c0)) return w;
        for (int p : sys.shift.predecessors(w.first())) {
            Word v;
            v.letters.reserve(w.nletters() + 1);
            v.letters.push_back(p);
            v.letters.insert(v.letters.end(), w.letters.begin(),
                             w.letters.end());
            stack.push_back(std::move(v));
        }
    }
    return std::nullopt;
}

}  // namespace cantorkit
