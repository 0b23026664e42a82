#include <cmath>

#include "cantorkit/sigma.hpp"
#include "cantorkit/system.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cantorkit;

TEST_CASE("q4 validates") {
    const auto sys = systems::q4();
    const auto rep = validate_system(sys);
    INFO(rep.summary());
    CHECK(rep.pass);
}

TEST_CASE("overlapping pieces fail validation") {
    // offsets shrunk to 0.15: the cylinders themselves overlap, not just
    // their disc hulls
    auto sys = systems::q4();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            auto& p = sys.branch[sys.tid[a][b]];
            p.coef[0] *= 0.15 / 0.7;
        }
    for (int a = 0; a < 4; ++a)
        sys.piece[a].center = sys.branch[sys.tid[a][a]].eval(cplx(0.5, 0.5));
    sys.prepare();
    const auto rep = validate_system(sys);
    CHECK_FALSE(rep.pass);
    bool disjoint_failed = false;
    for (const auto& c : rep.checks)
        if (c.check == "pieces-disjoint" && !c.pass) disjoint_failed = true;
    CHECK(disjoint_failed);
}

TEST_CASE("weak expansion bound fails validation") {
    auto sys = systems::q4();
    sys.mu = 1.1 / 0.3;  // declares more expansion than the branches have
    const auto rep = validate_system(sys);
    CHECK_FALSE(rep.pass);
    bool contraction_failed = false;
    for (const auto& c : rep.checks)
        if (c.check == "branch-contraction" && !c.pass) contraction_failed = true;
    CHECK(contraction_failed);
}

TEST_CASE("thick and nonlinear systems validate") {
    for (const auto& sys : {systems::q4_thick(), systems::q4_nonlinear(),
                            systems::two_branch_real()}) {
        const auto rep = validate_system(sys);
        INFO(sys.name, "\n", rep.summary());
        CHECK(rep.pass);
    }
}

TEST_CASE("branch composition on q4") {
    const auto sys = systems::q4();
    // f_(0,1)(z) = 0.3 z
    const auto r1 = compose_branch(sys, Word{{0, 1}}, 1.0);
    CHECK(std::abs(r1.value - cplx(0.3, 0)) < 1e-15);
    CHECK(std::abs(r1.deriv - cplx(0.3, 0)) < 1e-15);

    // identity on a length-0 word
    const auto r0 = compose_branch(sys, Word{{2}}, cplx(0.2, 0.75));
    CHECK(r0.value == cplx(0.2, 0.75));
    CHECK(r0.deriv == cplx(1.0, 0.0));

    // f_0(f_1(1)) = 0.3 * (0.3 + 0.7) = 0.3
    const auto r2 = compose_branch(sys, Word{{0, 1, 1}}, 1.0);
    CHECK(std::abs(r2.value - cplx(0.3, 0)) < 1e-15);
    CHECK(std::abs(r2.deriv - cplx(0.09, 0)) < 1e-15);

    CHECK_THROWS_AS(compose_branch(sys, Word{{0, 1}}, cplx(5.0, 5.0)),
                    DomainError);
}

TEST_CASE("composition derivative matches finite differences") {
    const auto sys = systems::q4_nonlinear();
    const Word w{{0, 1, 2, 3}};
    const cplx z = sys.piece[3].center + cplx(0.05, -0.08);
    const auto r = compose_branch(sys, w, z);
    const double h = 1e-6;
    const cplx fd = (compose_branch(sys, w, z + h).value -
                     compose_branch(sys, w, z - h).value) /
                    (2.0 * h);
    CHECK(std::abs(fd - r.deriv) / std::abs(r.deriv) < 1e-6);
}

TEST_CASE("piece enclosures on q4") {
    const auto sys = systems::q4();
    // single letter: the piece disc itself
    const auto d0 = piece_enclosure(sys, Word{{0}});
    CHECK(std::abs(d0.center - cplx(0.15, 0.15)) < 1e-15);
    CHECK(d0.radius == doctest::Approx(0.24));

    // (0,1): center f_(0,1)(center of piece 1), radius 0.24 * 0.3
    const auto d1 = piece_enclosure(sys, Word{{0, 1}});
    CHECK(std::abs(d1.center - cplx(0.3 * 0.85, 0.3 * 0.15)) < 1e-15);
    CHECK(d1.radius == doctest::Approx(0.24 * 0.3));

    // exact decay for similarities
    for (int n = 1; n <= 6; ++n) {
        Word w{{0}};
        for (int i = 0; i < n; ++i) w.letters.push_back(1);
        CHECK(piece_enclosure(sys, w).radius ==
              doctest::Approx(0.24 * std::pow(0.3, n)).epsilon(1e-12));
    }
}

TEST_CASE("enclosures nest strictly") {
    for (const auto& sys : {systems::q4(), systems::q4_nonlinear()}) {
        for (const auto& w : oracles::all_words(sys.shift, 5)) {
            const auto outer = piece_enclosure(sys, w);
            for (int b : sys.shift.successors(w.last())) {
                Word v = w;
                v.letters.push_back(b);
                const auto inner = piece_enclosure(sys, v);
                CHECK(std::abs(inner.center - outer.center) + inner.radius <=
                      outer.radius + 1e-12);
            }
        }
    }
}

TEST_CASE("enclosure radius bounded by mu decay") {
    const auto sys = systems::q4_nonlinear();
    const double r0 = sys.piece[0].radius;
    for (const auto& w : oracles::all_words(sys.shift, 6)) {
        CHECK(piece_enclosure(sys, w).radius <=
              r0 * std::pow(1.0 / sys.mu, w.length()) + 1e-12);
    }
}

TEST_CASE("itinerary points") {
    const auto sys = systems::q4();
    CHECK(std::abs(point_from_itinerary(sys, {{}, {0}}, 1e-12)) < 1e-12);
    CHECK(std::abs(point_from_itinerary(sys, {{}, {1}}, 1e-12) - 1.0) < 1e-11);
    // (01)^inf solves x = 0.09x + 0.21
    const cplx x = point_from_itinerary(sys, {{}, {0, 1}}, 1e-12);
    CHECK(std::abs(x - cplx(3.0 / 13.0, 0)) < 1e-11);
}

TEST_CASE("periodic itinerary point is a fixed point of its cycle") {
    const auto sys = systems::q4_nonlinear();
    const Itinerary it{{}, {0, 1, 2}};
    const cplx x = point_from_itinerary(sys, it, 1e-12);
    const auto once = compose_branch(sys, Word{{0, 1, 2, 0}}, x);
    // f_{(0,1,2)} maps the point to itself after one period... the cycle
    // word ends back at letter 0
    CHECK(std::abs(once.value - x) < 1e-10);
}

TEST_CASE("dimension estimates match Moran values") {
    const auto q4 = systems::q4();
    std::vector<double> grid;
    for (int n = 2; n <= 6; ++n) grid.push_back(0.48 * std::pow(0.3, n));
    const auto est = dimension_estimate(q4, grid, 10.0);
    CHECK(std::abs(est.value - std::log(4.0) / std::log(10.0 / 3.0)) < 0.02);

    const auto thick = systems::q4_thick();
    std::vector<double> grid2;
    for (int n = 2; n <= 6; ++n) grid2.push_back(0.855 * std::pow(0.45, n));
    const auto est2 = dimension_estimate(thick, grid2, 10.0);
    CHECK(std::abs(est2.value - std::log(4.0) / std::log(1.0 / 0.45)) < 0.02);

    CHECK_THROWS_AS(dimension_estimate(q4, {0.1, 0.01}, 10.0), InputError);
}

TEST_CASE("essential reality") {
    const auto real2 = systems::two_branch_real();
    const auto r = essentially_real_test(real2, ThetaTail{{0, 1}}, 24, 1e-6);
    CHECK(r.essentially_real);
    CHECK(r.max_deviation < 1e-9);

    const auto q4 = systems::q4();
    const auto r2 = essentially_real_test(q4, ThetaTail{{1, 0}}, 24, 1e-3);
    CHECK_FALSE(r2.essentially_real);
    CHECK(r2.max_deviation > 0.05);

    CHECK_THROWS_AS(essentially_real_test(q4, ThetaTail{{1, 0}}, 1, 1e-3),
                    InputError);
}
