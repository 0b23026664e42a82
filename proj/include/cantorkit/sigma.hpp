#pragma once

#include <cstdint>
#include <vector>

#include "cantorkit/system.hpp"

namespace cantorkit {

// Words of approximate size rho: rho/c0 <= diam(G(w)) <= c0*rho.
// Words are emitted in shortlex order. c0 >= 1 is required.
std::vector<Word> enumerate_sigma_rho(const CantorSystem& sys, double rho,
                                      double c0,
                                      std::uint64_t budget = 10'000'000);

bool in_sigma_rho(const CantorSystem& sys, const Word& w, double rho,
                  double c0);

// Subset of Sigma(rho) whose cylinders are pairwise non-nested and cover K,
// picked shortest-first along the word tree. Throws InputError when some
// branch of the tree skips the [rho/c0, c0*rho] band entirely.
std::vector<Word> partition_words(const CantorSystem& sys, double rho,
                                  double c0,
                                  std::uint64_t budget = 10'000'000);

// Words containing no Sigma(rho^(1/3k)) subword twice.
std::vector<Word> filter_sigma1(const CantorSystem& sys,
                                const std::vector<Word>& words, double rho,
                                int k, double c0);

bool sigma1_admits(const CantorSystem& sys, const Word& w, double rho, int k,
                   double c0);

// Sigma_nr conditions on words of Sigma(rho^3): (1) no Sigma(rho^(1/3k))
// subword twice, (2) a Sigma(rho^(1/6k)) suffix appears nowhere else.
std::vector<Word> filter_nr(const CantorSystem& sys,
                            const std::vector<Word>& words, double rho, int k,
                            double c0);

bool nr_admits(const CantorSystem& sys, const Word& w, double rho, int k,
               double c0);

// True iff w1, w2 share no common prefix lying in Sigma(rho^(1/2k)).
bool independent(const CantorSystem& sys, const Word& w1, const Word& w2,
                 double rho, int k, double c0);

struct WedgeDistance {
    double value;
    bool bound_only;  // tails equal to full stored depth: nesting bound
};

// d(theta1, theta2) = diam(G(theta1 ^ theta2)). Last letters must agree.
WedgeDistance wedge_distance(const CantorSystem& sys, const ThetaTail& t1,
                             const ThetaTail& t2);

// Admissible left-infinite extension of `end`, truncated at `depth`
// letters in total; deterministic (smallest-predecessor cycle).
ThetaTail canonical_tail(const CantorSystem& sys, const Word& end, int depth);

// Deterministic pseudo-random tail ending with theta_0 = letter.
ThetaTail random_tail(const CantorSystem& sys, int letter, int depth,
                      std::uint64_t seed);
Word random_word(const CantorSystem& sys, int first_letter, int length,
                 std::uint64_t seed);

// Searches a word of approximate size word_rho ending with `end` and
// satisfying the Sigma_nr conditions at scale rho (the caller passes
// word_rho = rho^3 for the paper's Sigma_nr(rho^3)). Budget-capped DFS.
std::optional<Word> nr_extension(const CantorSystem& sys, const Word& end,
                                 double word_rho, double rho, int k, double c0,
                                 std::uint64_t budget = 200'000);

}  // namespace cantorkit
