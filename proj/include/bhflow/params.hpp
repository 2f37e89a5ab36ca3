#pragma once

#include "errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace bhflow {

// Minkowski is the planar flat-space model: no radial weights, no source.
// A radial flow without central mass stays Relativistic with M = 0.
enum class ModelKind { Relativistic, NonRelativistic, Stiff, Minkowski, NonRelMinkowski };

inline const char* to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::Relativistic: return "relativistic";
    case ModelKind::NonRelativistic: return "non_relativistic";
    case ModelKind::Stiff: return "stiff";
    case ModelKind::Minkowski: return "minkowski";
    case ModelKind::NonRelMinkowski: return "nonrel_minkowski";
    }
    return "?";
}

class PhysParams {
public:
    double eps = 0;   // inverse light speed
    double k = 0;     // sound speed
    double M = 0;     // black-hole mass
    double m = 0;     // M / eps^2, the Newtonian mass when eps = 0
    double e2 = 0;    // eps^2 k^2
    double kappa = 1;
    double one_minus_kappa = 0;
    double chi = 0;
    double ck = 0;    // coefficient of ln rho in the Riemann invariants
    ModelKind kind = ModelKind::NonRelativistic;

    static PhysParams relativistic(double eps, double k, double M)
    {
        if (!(eps > 0) || !std::isfinite(eps))
            throw config_error("eps must be positive and finite");
        if (!(k > 0) || !std::isfinite(k))
            throw config_error("sound speed k must be positive");
        if (!(M >= 0) || !std::isfinite(M))
            throw config_error("mass M must be non-negative");
        const double ek = eps * k;
        if (ek > 1 + 1e-14)
            throw config_error("sound speed exceeds light speed (k > 1/eps)");
        PhysParams p;
        p.eps = eps;
        p.M = M;
        p.m = M / (eps * eps);
        if (std::abs(ek - 1) <= 1e-14) {
            p.kind = ModelKind::Stiff;
            p.k = 1 / eps;
        } else {
            p.kind = ModelKind::Relativistic;
            p.k = k;
        }
        p.derive();
        return p;
    }

    static PhysParams stiff(double eps, double M) { return relativistic(eps, 1 / eps, M); }

    static PhysParams minkowski(double eps, double k)
    {
        PhysParams p = relativistic(eps, k, 0);
        if (p.kind == ModelKind::Stiff)
            throw config_error("planar Minkowski model requires k < 1/eps");
        p.kind = ModelKind::Minkowski;
        return p;
    }

    static PhysParams non_relativistic(double k, double m)
    {
        if (!(k > 0) || !std::isfinite(k))
            throw config_error("sound speed k must be positive");
        if (!(m >= 0) || !std::isfinite(m))
            throw config_error("mass m must be non-negative");
        PhysParams p;
        p.k = k;
        p.m = m;
        p.kind = m > 0 ? ModelKind::NonRelativistic : ModelKind::NonRelMinkowski;
        p.derive();
        return p;
    }

    bool relativistic_kind() const { return eps > 0; }
    bool planar() const { return kind == ModelKind::Minkowski; }
    bool stiff_kind() const { return kind == ModelKind::Stiff; }

    // lower end of the radial domain
    double horizon() const
    {
        if (planar())
            return -std::numeric_limits<double>::infinity();
        return 2 * M;
    }

    // (1 - 2M/r); identically 1 for the planar and eps = 0 models
    double lapse(double r) const
    {
        if (planar() || M == 0)
            return 1;
        return 1 - 2 * M / r;
    }

    // (1 - kappa)/kappa
    double A() const { return 2 * e2 / (1 - e2); }

    // radius where the sonic function attains its extremum
    double r_min() const
    {
        if (eps == 0)
            return m / (2 * k * k);
        return M * (1 + 3 * e2) / (2 * e2);
    }

    void check_radius(double r) const
    {
        if (!std::isfinite(r))
            throw domain_error("radius is not finite");
        if (planar())
            return;
        if (eps == 0) {
            if (!(r > 0))
                throw domain_error("radius must be positive, got " + std::to_string(r));
            return;
        }
        if (!(r > 2 * M))
            throw domain_error("radius " + std::to_string(r) + " is not above the horizon 2M = "
                               + std::to_string(2 * M));
    }

private:
    void derive()
    {
        e2 = eps * eps * k * k;
        if (kind == ModelKind::Stiff)
            e2 = 1;
        kappa = (1 - e2) / (1 + e2);
        one_minus_kappa = 2 * e2 / (1 + e2);
        chi = 2 * eps * k / (1 + e2);
        if (kind == ModelKind::Stiff)
            chi = 1;
        ck = k / (1 + e2);
    }
};

} // namespace bhflow
