#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cantorkit {

using cplx = std::complex<double>;

// Closed disc in the plane. radius == 0 is a point.
struct Disc {
    cplx center{0.0, 0.0};
    double radius = 0.0;

    bool contains(cplx z, double slack = 0.0) const {
        return std::abs(z - center) <= radius + slack;
    }
    bool intersects(const Disc& o) const {
        return std::abs(center - o.center) <= radius + o.radius;
    }
    double gap(const Disc& o) const {
        return std::abs(center - o.center) - radius - o.radius;
    }
};

// z -> alpha*z + beta, alpha != 0.
struct AffineMap {
    cplx alpha{1.0, 0.0};
    cplx beta{0.0, 0.0};

    cplx operator()(cplx z) const { return alpha * z + beta; }
    AffineMap inverse() const { return {1.0 / alpha, -beta / alpha}; }
    AffineMap then(const AffineMap& outer) const {
        return {outer.alpha * alpha, outer.alpha * beta + outer.beta};
    }
    Disc image(const Disc& d) const {
        return {(*this)(d.center), std::abs(alpha) * d.radius};
    }
    static AffineMap identity() { return {}; }
};

// Three-valued outcome for semi-decidable geometric queries.
enum class Tri { yes, no, undecided };

inline const char* to_string(Tri t) {
    switch (t) {
        case Tri::yes: return "yes";
        case Tri::no: return "no";
        default: return "undecided";
    }
}

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a stored tail is too shallow to reach the requested
// tolerance; carries the bound that was achievable.
struct DepthError : std::runtime_error {
    double achievable;
    explicit DepthError(const std::string& what, double achievable_bound)
        : std::runtime_error(what), achievable(achievable_bound) {}
};

}  // namespace cantorkit
