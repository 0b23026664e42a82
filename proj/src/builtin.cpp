#include "cantorkit/system.hpp"

namespace cantorkit::systems {

namespace {

// Full-shift system of similarity-like polynomial branches: branch for
// (a,b) is p_a restricted to piece b. Pieces are the images of a common
// hull disc under the p_a.
CantorSystem similarity_family(std::string name, int n,
                               const std::vector<Polynomial>& maps,
                               Disc hull, double mu, double delta_star) {
    CantorSystem sys;
    sys.name = std::move(name);
    sys.shift = Subshift::full_shift(n);
    sys.mu = mu;
    sys.delta_star = delta_star;
    sys.tid.assign(n, std::vector<int>(n, -1));
    int idx = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            sys.tid[a][b] = idx++;
            sys.branch.push_back(maps[a]);
        }
    for (int a = 0; a < n; ++a) {
        const cplx c = maps[a].eval(hull.center);
        // radius of the image disc: for affine maps exact, otherwise the
        // first-order bound |Dp(center)| stretched a little
        double scale = std::abs(maps[a].deriv(hull.center));
        if (!maps[a].is_affine()) scale *= 1.08;
        sys.piece.push_back({c, scale * hull.radius});
        sys.base_itinerary.push_back({{}, {a}});
    }
    sys.prepare();
    return sys;
}

}  // namespace

CantorSystem q4() {
    const cplx offs[4] = {{0, 0}, {0.7, 0}, {0, 0.7}, {0.7, 0.7}};
    std::vector<Polynomial> maps;
    for (auto c : offs) maps.push_back(Polynomial{{c, {0.3, 0.0}}});
    return similarity_family("q4", 4, maps, {{0.5, 0.5}, 0.8}, 3.3, 0.05);
}

CantorSystem q4_thick() {
    const cplx offs[4] = {{0, 0}, {0.55, 0}, {0, 0.55}, {0.55, 0.55}};
    std::vector<Polynomial> maps;
    for (auto c : offs) maps.push_back(Polynomial{{c, {0.45, 0.0}}});
    return similarity_family("q4thick", 4, maps, {{0.5, 0.5}, 0.95}, 2.2, 0.03);
}

CantorSystem q4_nonlinear(double eps) {
    const cplx offs[4] = {{0, 0}, {0.7, 0}, {0, 0.7}, {0.7, 0.7}};
    std::vector<Polynomial> maps;
    for (auto c : offs)
        maps.push_back(Polynomial{{c, {0.3, 0.0}, {eps, 0.0}}});
    CantorSystem sys;
    sys.name = "q4nl";
    sys.shift = Subshift::full_shift(4);
    sys.mu = 2.5;
    sys.delta_star = 0.02;
    sys.tid.assign(4, std::vector<int>(4, -1));
    int idx = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            sys.tid[a][b] = idx++;
            sys.branch.push_back(maps[a]);
        }
    const cplx hull{0.5, 0.5};
    for (int a = 0; a < 4; ++a) {
        sys.piece.push_back({maps[a].eval(hull), 0.32});
        sys.base_itinerary.push_back({{}, {a}});
    }
    sys.prepare();
    return sys;
}

CantorSystem two_branch_real() {
    std::vector<Polynomial> maps{Polynomial{{{0.0, 0.0}, {0.45, 0.0}}},
                                 Polynomial{{{0.55, 0.0}, {0.45, 0.0}}}};
    return similarity_family("twobranch", 2, maps, {{0.5, 0.0}, 0.95}, 2.2,
                             0.03);
}

CantorSystem two_branch_thin() {
    std::vector<Polynomial> maps{Polynomial{{{0.0, 0.0}, {0.3, 0.0}}},
                                 Polynomial{{{0.7, 0.0}, {0.3, 0.0}}}};
    return similarity_family("twothin", 2, maps, {{0.5, 0.0}, 0.8}, 3.3, 0.05);
}

}  // namespace cantorkit::systems
