#pragma once

#include "hofbauer/tower.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hofbauer {

/// Raised when a lifted measure cannot be formed on the retained tower.
class LiftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Transition {
    LevelId from = 0;
    LevelId to = 0;
    Scalar p;
};

enum class Provenance { cesaro, eigen, parry };
std::string to_string(Provenance p);

/// Per-level measures on the tower. Vectors are indexed by level id - 1.
struct LevelMeasure {
    std::vector<Scalar> mu_bar;
    std::vector<Scalar> rho;
    std::vector<Scalar> mu_hat;
    std::vector<Transition> transitions;
    Provenance provenance = Provenance::eigen;
    std::size_t cesaro_n = 0;
    Convention convention = Convention::normalized;
    /// max_u |rho_n(u) - rho(u)| at the cross-check horizon (eigen provenance).
    double cesaro_deviation = 0;
    std::size_t cesaro_check_n = 0;
    /// Fixed-point residual max_u |W rho - rho|.
    double residual = 0;
    std::vector<std::string> notes;

    std::vector<double> rho_double() const;
    std::vector<double> mu_hat_double() const;
    std::vector<double> mu_bar_double() const;
    /// Levels with rho > 0, ascending.
    std::vector<LevelId> support() const;
};

/// mu_bar(D_u) = mu(D_u) under the map's convention.
std::vector<Scalar> ref_measure(const TowerGraph& graph, const PartitionMap& map);

struct CesaroResult {
    /// w_k for k < min(n, kept); each indexed by level id - 1.
    std::vector<std::vector<double>> weights;
    /// (1/n) sum_{k<n} w_k, divided by mu_bar of the base so that sum rho_n mu_bar = 1.
    std::vector<double> rho_n;
    std::size_t n = 0;
    /// True on truncated towers: mass may have left the retained levels.
    bool lower_bound = false;
    /// sum_u w_{n-1}(u) mu_bar(u) / mu_bar(base).
    double retained_mass = 1;
};

/// w_0 = indicator of the base, w_{k+1}(u) = sum_{t->u} w_k(t) / s_{j(t)}.
CesaroResult cesaro_lift(const TowerGraph& graph, const PartitionMap& map, std::size_t n, std::size_t keep_weights = 0);

/// The same recursion carried out exactly; returns w_0 .. w_{k_max}.
std::vector<std::vector<Scalar>> cesaro_weights_exact(const TowerGraph& graph, const PartitionMap& map,
                                                      std::size_t k_max);

struct RhoOptions {
    double tol = 1e-6;
    std::size_t n_check = 10000;
    std::size_t max_iterations = 1000000;
    double residual = 1e-12;
};

/// Limit densities: rho = W rho on terminal components (exact solve in exact
/// mode, damped power iteration in float mode), transient levels get 0,
/// components weighted by the base mass they absorb, normalized so that
/// sum rho mu_bar = 1. Falls back to a Cesaro estimate on truncated towers
/// without a closed terminal component.
LevelMeasure rho_limit(const TowerGraph& graph, const PartitionMap& map, const RhoOptions& opts = {});

/// Damped power iteration for rho in double precision, independent of the exact solve.
std::vector<double> rho_power_iteration(const TowerGraph& graph, const PartitionMap& map,
                                        const RhoOptions& opts = {}, double* residual = nullptr);

/// p_{t,u} = mu_bar(D_u) / (s_{j(t)} mu_bar(D_t)) on edges.
std::vector<Transition> markov_transitions(const TowerGraph& graph, const PartitionMap& map,
                                           const std::vector<Scalar>& mu_bar);

struct ParryMeasure {
    std::vector<LevelId> levels; // the primitive component used
    double lambda = 0;
    std::vector<double> v_bar; // A v = lambda v  (enters p_{t,u} = a v_u / (lambda v_t))
    std::vector<double> w_bar; // w A = lambda w, scaled so sum v w = 1
    std::vector<double> mu_hat;
    std::vector<std::vector<double>> p; // dense over `levels`
    double residual = 0;
};

/// Parry measure on the primitive terminal component (the unique one, or the
/// one given). Throws LiftError naming the period for periodic components.
ParryMeasure parry_measure(const TowerGraph& graph, std::optional<std::vector<LevelId>> component = std::nullopt);

struct Entropy {
    double nats = 0;
    double bits = 0;
};

/// h = -sum_u mu_hat(u) sum_v p log p. Throws LiftError on non-stationary input.
Entropy entropy(const LevelMeasure& m, double stationarity_tol = 1e-9);
Entropy chain_entropy(const std::vector<double>& stationary, const std::vector<std::vector<double>>& p);

/// max_u |sum_t mu_hat(t) p_{t,u} - mu_hat(u)|.
double stationarity_defect(const LevelMeasure& m);

struct MassProfile {
    std::size_t depth_cap = 0;
    std::vector<std::size_t> n;
    std::vector<double> mass; // mass_n(M) for each n
};

/// mass_n(M) = (1/n) sum_{k<n} sum_{depth(u) <= M} w_k(u) mu_bar(u), normalized by the base mass.
MassProfile lift_mass_profile(const TowerGraph& graph, const PartitionMap& map, const std::vector<std::size_t>& ns,
                              std::size_t depth_cap);

/// Solves a x = b by Gaussian elimination; exact pivots in exact modes. Throws LiftError if singular.
std::vector<Scalar> solve_linear_system(std::vector<std::vector<Scalar>> a, std::vector<Scalar> b);

/// Characteristic polynomial det(xI - A) of the 0-1 adjacency matrix restricted
/// to `levels`, constant-first integer coefficients (Faddeev-LeVerrier).
RationalPoly adjacency_charpoly(const TowerGraph& graph, const std::vector<LevelId>& levels);

} // namespace hofbauer
