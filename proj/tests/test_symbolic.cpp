#include <algorithm>

#include "cantorkit/sigma.hpp"
#include "cantorkit/symbolic.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cantorkit;

TEST_CASE("mixing detection") {
    CHECK(is_mixing(Subshift::full_shift(4)));

    // single self-loop: letter 1 unreachable, invariant also violated
    auto s1 = Subshift::from_pairs({"0", "1"}, {{0, 0}});
    CHECK_FALSE(is_mixing(s1));
    CHECK_FALSE(s1.check().empty());

    // 3-cycle: powers are permutation matrices, never positive
    auto s2 = Subshift::from_pairs({"0", "1", "2"}, {{0, 1}, {1, 2}, {2, 0}});
    CHECK(s2.check().empty());
    CHECK_FALSE(is_mixing(s2));
}

TEST_CASE("word basics") {
    const auto shift = Subshift::full_shift(4);
    Word w{{0, 1, 3}};
    CHECK(w.length() == 2);
    CHECK(admissible(shift, w));
    CHECK(format_word(shift, w) == "0-1-3");
    CHECK(parse_word(shift, "0-1-3") == w);

    const Word ab = concat(Word{{0, 1}}, Word{{1, 2, 3}});
    CHECK(ab == Word{{0, 1, 2, 3}});
    CHECK_THROWS_AS(concat(Word{{0, 1}}, Word{{2, 3}}), InputError);

    const Word rep{{0, 1, 0, 1, 0}};
    CHECK(occurrences(rep, Word{{0, 1, 0}}) == std::vector<int>{0, 2});

    const auto cyc = Subshift::from_pairs({"0", "1", "2"}, {{0, 1}, {1, 2}, {2, 0}});
    CHECK_FALSE(admissible(cyc, Word{{0, 2}}));
}

TEST_CASE("tails") {
    const auto shift = Subshift::full_shift(4);
    ThetaTail t{{2, 1, 0}};
    CHECK(t.depth() == 2);
    CHECK(t.last() == 0);
    const ThetaTail u = t.append(Word{{0, 3}});
    CHECK(u.letters == std::vector<int>{2, 1, 0, 3});
    CHECK_THROWS_AS(t.append(Word{{1, 3}}), InputError);
    CHECK(format_tail(shift, t) == "…2-1-0");
    CHECK(parse_tail(shift, "…2-1-0") == t);
    CHECK(parse_tail(shift, "...2-1-0") == t);
}

TEST_CASE("sigma enumeration against brute force") {
    const auto sys = systems::q4();
    // q4 pieces have radius 0.24; diam(length n) = 0.48 * 0.3^n
    for (double rho : {0.1, 0.0144, 0.003}) {
        const auto fast = enumerate_sigma_rho(sys, rho, 10.0);
        const auto brute = oracles::sigma_similarity(sys, 0.3, rho, 10.0, 9);
        REQUIRE(fast.size() == brute.size());
        auto sorted = brute;
        std::sort(sorted.begin(), sorted.end());
        CHECK(fast == sorted);
        for (const auto& w : fast) CHECK(admissible(sys.shift, w));
    }
}

TEST_CASE("sigma band counts, q4") {
    const auto sys = systems::q4();
    // diam(length n) = 0.48*0.3^n; at rho = 0.0144, c0 = 10 the band
    // [0.00144, 0.144] admits lengths 1..4
    const auto words = enumerate_sigma_rho(sys, 0.0144, 10.0);
    CHECK(words.size() == 16 + 64 + 256 + 1024);

    // single letters exactly at c0 = 1, rho = piece diameter
    const auto singles = enumerate_sigma_rho(sys, 0.48, 1.0);
    CHECK(singles.size() == 4);
    for (const auto& w : singles) CHECK(w.length() == 0);

    // exactly the length-1 words at rho = 0.144, c0 = 1
    const auto len1 = enumerate_sigma_rho(sys, 0.48 * 0.3, 1.0);
    CHECK(len1.size() == 16);

    CHECK_THROWS_AS(enumerate_sigma_rho(sys, 0.01, 0.5), InputError);
}

TEST_CASE("partition is shortest-first, non-nested, covering") {
    const auto sys = systems::q4();
    const auto part = partition_words(sys, 0.0144, 10.0);
    // shortest qualifying level: length 1 (16 words)
    CHECK(part.size() == 16);
    for (const auto& w : part) CHECK(w.length() == 1);

    // non-nested + covering over a wider band
    const auto p2 = partition_words(sys, 0.003, 10.0);
    for (const auto& a : p2)
        for (const auto& b : p2)
            if (!(a == b)) CHECK_FALSE(a.starts_with(b));
    // every length-8 word extends exactly one partition word
    for (const auto& w : oracles::all_words(sys.shift, 8)) {
        if (w.nletters() != 8) continue;
        int covered = 0;
        for (const auto& p : p2)
            if (w.starts_with(p)) ++covered;
        CHECK(covered == 1);
    }
}

TEST_CASE("sigma1 filter rejects repeated blocks") {
    const auto sys = systems::q4();
    const double rho = 1e-4;
    const int k = 2;
    // Sigma0 at rho^(1/k) = 0.01: the 64 length-2 words
    const auto sigma0 = partition_words(sys, 0.01, 10.0);
    REQUIRE(sigma0.size() == 64);
    const auto sigma1 = filter_sigma1(sys, sigma0, rho, k, 10.0);
    // a 3-letter word repeats a Sigma(rho^(1/6)) block iff a letter repeats
    CHECK(sigma1.size() == 4 * 3 * 2);
    for (const auto& w : sigma1) {
        CHECK(w.letters[0] != w.letters[1]);
        CHECK(w.letters[1] != w.letters[2]);
        CHECK(w.letters[0] != w.letters[2]);
    }
    // explicit repeat: b.b with b a band block
    CHECK_FALSE(sigma1_admits(sys, Word{{0, 1, 0, 1}}, rho, k, 10.0));
    // word shorter than every band word is accepted
    CHECK(sigma1_admits(sys, Word{{0}}, 1e-12, k, 10.0));
    // filters are idempotent subsets
    const auto again = filter_sigma1(sys, sigma1, rho, k, 10.0);
    CHECK(again == sigma1);
}

TEST_CASE("nr filter") {
    const auto sys = systems::q4();
    // c0 = 2: rho^(1/3k) blocks are the 2-letter words, the rho^(1/6k)
    // suffix scale holds exactly the single letters
    const double rho = 1e-4;
    const double c0 = 2.0;
    const int k = 2;
    // no 2-letter block twice and the final letter 3 appears only once
    const Word good{{0, 0, 1, 1, 2, 2, 0, 3}};
    CHECK(nr_admits(sys, good, rho, k, c0));
    // repeated pair (0,1)
    const Word rep{{0, 1, 0, 1, 2, 2, 0, 3}};
    CHECK_FALSE(nr_admits(sys, rep, rho, k, c0));
    // ending letter appears elsewhere
    const Word endrep{{3, 0, 1, 1, 2, 2, 0, 3}};
    CHECK_FALSE(nr_admits(sys, endrep, rho, k, c0));

    const auto filtered = filter_nr(sys, {good, rep, endrep}, rho, k, c0);
    CHECK(filtered == std::vector<Word>{good});
    CHECK(filter_nr(sys, {}, rho, k, c0).empty());

    // targeted search finds an nr word of matching size ending with (0,3)
    const double word_rho = piece_diameter(sys, good);
    const auto ext = nr_extension(sys, Word{{0, 3}}, word_rho, rho, k, c0);
    REQUIRE(ext.has_value());
    CHECK(ext->ends_with(Word{{0, 3}}));
    CHECK(nr_admits(sys, *ext, rho, k, c0));
    CHECK(in_sigma_rho(sys, *ext, word_rho, c0));
}

TEST_CASE("independence") {
    const auto sys = systems::q4();
    const double rho = 1e-4;
    const int k = 2;
    // different first letters: no common prefix at all
    CHECK(independent(sys, Word{{0, 1, 2}}, Word{{1, 1, 2}}, rho, k, 10.0));
    // equal words share themselves
    const Word w{{0, 1, 2, 3, 0, 1}};
    CHECK_FALSE(independent(sys, w, w, rho, k, 10.0));
    // shared length-2 prefix lies in Sigma(rho^(1/4)) = Sigma(0.1)
    CHECK_FALSE(independent(sys, Word{{0, 1, 2, 3, 1, 0}},
                            Word{{0, 1, 3, 2, 0, 1}}, rho, k, 10.0));
}

TEST_CASE("wedge distance") {
    const auto sys = systems::q4();
    ThetaTail t1{{3, 2, 1, 0}};
    ThetaTail t2{{1, 2, 1, 0}};  // agree in exactly the last 3 letters
    const auto d = wedge_distance(sys, t1, t2);
    CHECK_FALSE(d.bound_only);
    CHECK(d.value == doctest::Approx(0.48 * 0.09).epsilon(1e-12));

    CHECK_THROWS_AS(wedge_distance(sys, ThetaTail{{0, 1}}, ThetaTail{{1, 0}}),
                    DomainError);

    const auto same = wedge_distance(sys, t1, t1);
    CHECK(same.bound_only);
    CHECK(same.value == doctest::Approx(0.48 * std::pow(0.3, 3)));
}

TEST_CASE("sigma count scaling approaches the dimension") {
    const auto sys = systems::q4();
    const double d = std::log(4.0) / std::log(10.0 / 3.0);
    std::vector<double> grid;
    for (int n = 2; n <= 7; ++n) grid.push_back(0.48 * std::pow(0.3, n));
    const auto est = dimension_estimate(sys, grid, 2.0);
    // the slope recovers d tightly; pointwise estimates carry an O(1/log)
    // offset from the band constant and only drift towards d
    CHECK(std::abs(est.value - d) < 0.02 * d);
    CHECK(std::abs(est.pointwise.back() - d) <
          std::abs(est.pointwise.front() - d));
}
