#pragma once

#include <cstdint>
#include <optional>

#include "cantorkit/limits.hpp"
#include "cantorkit/sigma.hpp"

namespace cantorkit {

// The random translation family g^omega: a partition Sigma_0 of K at scale
// rho^(1/k), the repetition-free subset Sigma_1, and per-word bump data.
// Perturbed inverse branches are exact translations by
// c5 rho^(1+1/2k) omega(a') on the Sigma_1 cylinders.
struct PerturbationFamily {
    double rho = 0.0;
    int k = 2;
    double c5 = 1.0;
    double c0 = 2.0;
    double c4_tilde = 0.0;            // piece-separation fraction
    std::vector<Word> sigma0;         // partition of K in Sigma(rho^(1/k))
    std::vector<int> sigma1_slot;     // per sigma0 index: slot in omega or -1
    int sigma1_count = 0;
    int bump_degree = 5;              // quintic smoothstep profile
    double bump_cbar = 0.0;           // measured C~ in ||D^j chi|| <= C~ rho^(-j/k)

    double eps() const { return c5 * std::pow(rho, 1.0 + 0.5 / k); }
    int sigma0_index(const Word& w) const;
    bool in_sigma1(int sigma0_index) const {
        return sigma1_slot[sigma0_index] >= 0;
    }

    // Sigma_0 is a prefix-free cover: the unique element prefixing the
    // stream, or -1 when the stream leaves the word tree.
    template <typename Letters>
    int context_of(Letters&& at) const;

    std::vector<std::vector<int>> trie_child;  // [node][letter] -> node
    std::vector<int> trie_word;                // node -> sigma0 index or -1
};

// Builds Sigma_0 = partition at rho^(1/k), Sigma_1 by the no-repeated-
// Sigma(rho^(1/3k))-block filter, the largest safe c4_tilde (half the
// measured separation), and verifies the bump derivative bounds.
PerturbationFamily build_family(const CantorSystem& sys, double rho, int k,
                                double c5, double c0 = 2.0);

struct OmegaVector {
    std::vector<cplx> values;  // one per Sigma_1 slot, |omega| <= 1
    std::uint64_t seed = 0;

    cplx of_slot(int slot) const { return slot < 0 ? cplx{} : values[slot]; }
    static OmegaVector zero(const PerturbationFamily& fam) {
        return {std::vector<cplx>(fam.sigma1_count, cplx{}), 0};
    }
};

// i.i.d. uniform draws from the unit disc (rejection from the square),
// reproducible from the seed.
OmegaVector sample_omega(const PerturbationFamily& fam, std::uint64_t seed);

// f^omega for one branch step on the cylinder of `context` (a Sigma_0
// word starting with the pair (a,b)): exactly f + eps*omega on Sigma_1
// cylinders and exactly f elsewhere.
cplx perturbed_branch(const PerturbationFamily& fam, const CantorSystem& sys,
                      int a, int b, const Word& context,
                      const OmegaVector& omega, cplx z);

// f^omega_w(z) with derivative, where `future` is the symbolic itinerary
// of z (starting with w.last()); the future resolves the Sigma_0 context
// of every step.
Deriv perturbed_compose(const PerturbationFamily& fam, const CantorSystem& sys,
                        const OmegaVector& omega, const Word& w,
                        const Itinerary& future, cplx z);

// The point of K^omega with the given itinerary.
cplx perturbed_point(const PerturbationFamily& fam, const CantorSystem& sys,
                     const OmegaVector& omega, const Itinerary& itin,
                     double tol);

// k^(theta,omega) at the symbolic point with the given itinerary.
LimitEval perturbed_limit_eval(const PerturbationFamily& fam,
                               const CantorSystem& sys,
                               const OmegaVector& omega, const ThetaTail& theta,
                               const Itinerary& point, double tol);

// F^(theta,omega)_w via the perturbed orbits; beta is k^(theta,omega) at
// the perturbed cylinder base point.
RenormMap perturbed_renorm_affine(const PerturbationFamily& fam,
                                  const CantorSystem& sys,
                                  const OmegaVector& omega,
                                  const ThetaTail& theta, const Word& w,
                                  double tol);

// omega with the coordinates of Sigma_1(theta) zeroed, where Sigma_1(theta)
// holds the Sigma_1 words starting with the sigma2 partition word that
// theta ends with.
OmegaVector omega_star(const PerturbationFamily& fam, const OmegaVector& omega,
                       const std::vector<Word>& sigma2,
                       const ThetaTail& theta);

enum class PerturbZone { inner, shell, outside };

struct MapEval {
    cplx value;
    PerturbZone zone;
};

// g^omega(z) by the case analysis: translated g on the inner Sigma_0
// neighborhoods, g outside all hats, time-one field integration (RK4)
// across the transition shell. g itself is evaluated by per-piece Newton
// inversion of the branches.
MapEval perturbed_map_eval(const PerturbationFamily& fam,
                           const CantorSystem& sys, const OmegaVector& omega,
                           cplx z);

cplx expanding_map_eval(const CantorSystem& sys, cplx z);  // plain g

struct HarnessRow {
    double rho;
    double sup_branch;      // ||f^omega_a - f_a||_C0 over samples
    double sup_limit;       // ||k^(theta,omega) - k^theta|| over samples
    double sup_logscale;    // |log r^(theta,omega)_a - log r^theta_a|
};

struct HarnessReport {
    std::vector<HarnessRow> rows;
    double slope_branch = 0.0;    // fitted log sup vs log rho
    double slope_limit = 0.0;
    double slope_logscale = 0.0;
    double c18c5_branch = 0.0;    // fitted constants at exponent 1+1/2k, 1-1/2k
    double c18c5_limit = 0.0;
};

// Measures the three perturbation sup norms across a rho grid and fits
// their decay exponents.
HarnessReport bounds_harness(const CantorSystem& sys,
                             const std::vector<double>& rho_grid, int k,
                             double c5, int n_omega, int n_theta,
                             std::uint64_t seed, double c0 = 2.0);

template <typename Letters>
int PerturbationFamily::context_of(Letters&& at) const {
    int node = 0;
    for (int i = 0;; ++i) {
        if (trie_word[node] >= 0) return trie_word[node];
        const int l = at(i);
        if (l < 0) return -1;
        node = trie_child[node][l];
        if (node < 0) return -1;
    }
}

}  // namespace cantorkit
