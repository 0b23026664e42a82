#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cantorkit/symbolic.hpp"
#include "cantorkit/types.hpp"

namespace cantorkit {

// Complex polynomial, coefficients low degree first.
struct Polynomial {
    std::vector<cplx> coef;

    cplx eval(cplx z) const;
    cplx deriv(cplx z) const;
    int degree() const { return static_cast<int>(coef.size()) - 1; }
    bool is_affine() const;
};

// Eventually periodic symbol sequence (preperiod then period, repeated).
struct Itinerary {
    std::vector<int> preperiod;
    std::vector<int> period;

    int at(int i) const {
        if (i < static_cast<int>(preperiod.size())) return preperiod[i];
        const int j = (i - static_cast<int>(preperiod.size())) %
                      static_cast<int>(period.size());
        return period[j];
    }
    int first() const { return preperiod.empty() ? period.front() : preperiod.front(); }
    Word prefix_word(int nletters) const;
    Itinerary shifted(int n) const;  // drop the first n letters
};

// A conformal regular Cantor set presented through its inverse branches.
// For each transition (a,b), branch f_(a,b): G(b) -> G(a) is a polynomial
// contraction; pieces are disc enclosures of the G(a).
struct CantorSystem {
    std::string name;
    Subshift shift;
    std::vector<std::vector<int>> tid;   // tid[a][b] = transition index or -1
    std::vector<std::pair<int, int>> transitions;
    std::vector<Polynomial> branch;      // per transition index
    std::vector<Disc> piece;             // per letter
    double mu = 0.0;                     // expansion lower bound for g
    double delta_star = 0.0;             // G* fattening radius
    std::vector<Itinerary> base_itinerary;  // per letter, starts with that letter

    // Derived data, filled by prepare().
    std::vector<double> step_sup;        // sup |Df| over fattened source piece
    std::vector<double> step_inf;        // min |Df| over fattened source piece
    std::vector<cplx> base_point;        // c_a per letter
    double contraction = 0.0;            // max step_sup
    double min_step = 0.0;               // min step_inf
    bool affine = false;                 // all branches degree <= 1

    int transition(int a, int b) const;
    const Polynomial& branch_of(int a, int b) const;
    Disc fattened_piece(int a) const {
        return {piece[a].center, piece[a].radius + delta_star};
    }
    double min_piece_diameter() const;

    // Computes derivative bounds and base points. Must be called before
    // any evaluation; from_json and the builtins do it for you.
    void prepare();
};

struct Deriv {                 // value plus derivative along a composition
    cplx value;
    cplx deriv;
};

// f_w(z) with d/dz f_w(z), right-to-left branch composition. A length-0
// word yields the identity. z must lie in the fattened piece of w.last().
Deriv compose_branch(const CantorSystem& sys, const Word& w, cplx z);

// Disc containing G(w): center through f_w, radius contracted by the
// per-step derivative sup bounds.
Disc piece_enclosure(const CantorSystem& sys, const Word& w);
double piece_diameter(const CantorSystem& sys, const Word& w);

// The unique x with g^i(x) in G(itinerary_i); error below tol.
cplx point_from_itinerary(const CantorSystem& sys, const Itinerary& itin,
                          double tol);

// Itinerary of the cylinder base point c_w: the word followed by the base
// itinerary of its last letter.
Itinerary cylinder_base_itinerary(const CantorSystem& sys, const Word& w);

// Union of depth-r cylinder enclosures below the cylinder of `w`
// (r extra letters). Used to separate sets whose disc hulls overlap.
std::vector<Disc> refined_cover(const CantorSystem& sys, const Word& w, int r);

// Lower bound for dist(G(a), G(b)) via refined covers, refining until the
// bound exceeds `target` or max_depth is reached. May be negative (covers
// overlap at every tried depth).
double cylinder_gap(const CantorSystem& sys, const Word& a, const Word& b,
                    int max_depth = 4, double target = 0.0);

struct CheckResult {
    std::string check;
    bool pass;
    double margin;        // worst-case slack, negative on failure
    std::string witness;
};

struct ValidationReport {
    bool pass = true;
    std::vector<CheckResult> checks;
    std::string summary() const;
};

// Samples every invariant: disjointness (on refined covers), branch
// containment, contraction, non-vanishing derivatives, base itineraries,
// mixing. boundary_mesh >= 256 per disc plus Monte Carlo interior points.
ValidationReport validate_system(const CantorSystem& sys,
                                 int boundary_mesh = 256,
                                 int interior_samples = 64,
                                 std::uint64_t seed = 1);

struct DimensionEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    double max_residual = 0.0;
    std::vector<double> rho;
    std::vector<std::uint64_t> counts;
    std::vector<double> pointwise;  // log N / log(1/rho) per grid point
};

// Least-squares slope of log #Sigma(rho) against log(1/rho).
DimensionEstimate dimension_estimate(const CantorSystem& sys,
                                     const std::vector<double>& rho_grid,
                                     double c0,
                                     std::uint64_t budget = 10'000'000);

struct LineFitResult {
    bool essentially_real = false;
    double max_deviation = 0.0;
    cplx line_point;     // point on the fitted line
    cplx line_dir;       // unit direction
};

// Samples `samples` points of the limit Cantor set K^theta(theta_0),
// total-least-squares line fit, tests the maximal deviation.
LineFitResult essentially_real_test(const CantorSystem& sys,
                                    const ThetaTail& theta, int samples,
                                    double tol, std::uint64_t seed = 7);

// Built-in example systems.
namespace systems {
CantorSystem q4();          // four similarities, ratio 0.3
CantorSystem q4_thick();    // ratio 0.45, dimension ~1.736
CantorSystem q4_nonlinear(double eps = 0.02);  // quadratic-perturbed q4
CantorSystem two_branch_real();   // real Cantor set embedded in C
CantorSystem two_branch_thin();   // ratio 0.3 two-branch (d ~ 0.576)
}  // namespace systems

}  // namespace cantorkit
