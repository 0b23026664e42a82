#include <cmath>
#include <random>

#include "cantorkit/configuration.hpp"
#include "cantorkit/limits.hpp"
#include "cantorkit/sigma.hpp"
#include "doctest.h"

using namespace cantorkit;

TEST_CASE("affine systems have exact limit geometries") {
    const auto sys = systems::q4();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.15, 0.15);
    for (int i = 0; i < 40; ++i) {
        const ThetaTail tail = random_tail(sys, i % 4, 20, 100 + i);
        const cplx c = sys.base_point[tail.last()];
        const cplx z = sys.piece[tail.last()].center + cplx(u(rng), u(rng));
        const auto e = limit_geometry_eval(sys, tail, z, 1e-10);
        CHECK(std::abs(e.value - (z - c)) < 1e-12);
        CHECK(std::abs(e.deriv - 1.0) < 1e-12);
        CHECK(e.error_bound == 0.0);
    }
    // normalization at the base point, any tail
    const ThetaTail t{{2, 3, 1}};
    CHECK(std::abs(limit_geometry_eval(sys, t, 1.0, 1e-12).value) < 1e-15);
}

TEST_CASE("conjugacy identity on the nonlinear system") {
    const auto sys = systems::q4_nonlinear();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const int a0 = trial % 4;
        const ThetaTail tail = random_tail(sys, a0, 40, 900 + trial);
        const Word w = random_word(sys, a0, 1 + trial % 4, 300 + trial);
        const auto F = renorm_affine(sys, tail, w, 1e-9);
        const ThetaTail ext = tail.append(w);
        for (int i = 0; i < 8; ++i) {
            const Disc dom = sys.piece[w.last()];
            const cplx z = dom.center + dom.radius * 0.8 * cplx(u(rng), u(rng));
            const cplx lhs =
                limit_geometry_eval(sys, tail, compose_branch(sys, w, z).value, 1e-9)
                    .value;
            const cplx rhs = F.map(limit_geometry_eval(sys, ext, z, 1e-9).value);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("renormalization affine map on q4") {
    const auto sys = systems::q4();
    const ThetaTail tail{{0, 0, 0, 0}};
    const auto F = renorm_affine(sys, tail, Word{{0, 1}}, 1e-10);
    CHECK(std::abs(F.map.alpha - cplx(0.3, 0)) < 1e-12);
    CHECK(std::abs(F.map.beta - cplx(0.3, 0)) < 1e-12);

    // length-0 word: identity
    const auto I = renorm_affine(sys, tail, Word{{0}}, 1e-10);
    CHECK(std::abs(I.map.alpha - 1.0) < 1e-12);
    CHECK(std::abs(I.map.beta) < 1e-12);
}

TEST_CASE("alpha tracks cylinder size (eq. c0')") {
    const auto sys = systems::q4_nonlinear();
    double lo = 1e9, hi = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const int a0 = trial % 4;
        const ThetaTail tail = random_tail(sys, a0, 40, 50 + trial);
        const Word w = random_word(sys, a0, 1 + trial % 5, 80 + trial);
        const auto F = renorm_affine(sys, tail, w, 1e-9);
        const double ratio = std::abs(F.map.alpha) / piece_diameter(sys, w);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    // two-sided comparability with a measured c0'
    CHECK(hi / lo < 10.0);
}

TEST_CASE("tail continuity (Lipschitz in theta)") {
    const auto sys = systems::q4_nonlinear();
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const int a0 = trial % 4;
        const ThetaTail t1 = random_tail(sys, a0, 30, 1000 + trial);
        ThetaTail t2 = t1;
        // branch off at depth j >= 2
        const int j = 2 + trial % 10;
        t2.letters[t2.letters.size() - 1 - j] =
            (t2.letters[t2.letters.size() - 1 - j] + 1 + trial % 3) % 4;
        const auto wd = wedge_distance(sys, t1, t2);
        if (wd.bound_only) continue;
        const Disc dom = sys.piece[a0];
        double diff = 0.0;
        for (int i = 0; i < 6; ++i) {
            const cplx z =
                dom.center + dom.radius * 0.7 *
                                 std::polar(1.0, 2.0 * std::numbers::pi * i / 6);
            diff = std::max(diff, std::abs(limit_geometry_eval(sys, t1, z, 1e-10).value -
                                           limit_geometry_eval(sys, t2, z, 1e-10).value));
        }
        worst_ratio = std::max(worst_ratio, diff / wd.value);
    }
    CHECK(worst_ratio > 0.0);   // nonlinear: tails do matter
    CHECK(worst_ratio < 50.0);  // ...but boundedly so
}

TEST_CASE("error bound decays with depth") {
    const auto sys = systems::q4_nonlinear();
    const ThetaTail tail = random_tail(sys, 0, 40, 4242);
    const cplx z = sys.piece[0].center + cplx(0.1, 0.05);
    double prev = 1e9;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
        const auto e = limit_geometry_eval(sys, tail, z, tol);
        CHECK(e.error_bound <= tol);
        CHECK(e.error_bound <= prev);
        prev = e.error_bound;
    }
    // shallow tail cannot reach an extreme tolerance
    const ThetaTail shallow{{1, 0}};
    CHECK_THROWS_AS(limit_geometry_eval(sys, shallow, z, 1e-14), DepthError);
}

TEST_CASE("nea witness") {
    const auto q4 = systems::q4();
    const ThetaTail a{{0, 1, 2, 0}};
    const ThetaTail b{{3, 3, 1, 0}};
    // affine: second derivative vanishes
    CHECK(std::abs(nea_witness(q4, a, b, cplx(0.05, 0.02), 1e-3)) < 1e-6);
    // identical tails: composition is the identity
    CHECK(std::abs(nea_witness(q4, a, a, cplx(0.05, 0.02), 1e-3)) < 1e-9);

    const auto nl = systems::q4_nonlinear();
    const ThetaTail t0 = random_tail(nl, 0, 30, 21);
    const ThetaTail t1 = random_tail(nl, 0, 30, 77);
    const cplx w1 = nea_witness(nl, t0, t1, cplx(0.03, 0.01), 1e-3);
    const cplx w2 = nea_witness(nl, t0, t1, cplx(0.03, 0.01), 5e-4);
    CHECK(std::abs(w1) > 1e-3);                      // non-essentially affine
    CHECK(std::abs(w1 - w2) < 0.02 * std::abs(w1));  // step-size stability
}

TEST_CASE("limit piece bounds enclose sampled images") {
    const auto sys = systems::q4();
    const auto b = limit_piece_bounds(sys);
    // affine: exact values radius + |center - base|
    for (int a = 0; a < 4; ++a) {
        const double expect =
            sys.piece[a].radius + std::abs(sys.piece[a].center - sys.base_point[a]);
        CHECK(b.per_letter[a] == doctest::Approx(expect));
    }
    const auto nl = systems::q4_nonlinear();
    const auto bn = limit_piece_bounds(nl);
    const ThetaTail tail = random_tail(nl, 2, 25, 9);
    for (int i = 0; i < 32; ++i) {
        const cplx z = nl.piece[2].center +
                       nl.piece[2].radius *
                           std::polar(0.99, 2.0 * std::numbers::pi * i / 32);
        CHECK(std::abs(limit_geometry_eval(nl, tail, z, 1e-9).value) <=
              bn.per_letter[2]);
    }
}
