#pragma once

#include "hofbauer/natext.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hofbauer {

class ShiftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A finite window of the two-sided itinerary; `anchor` is the position of time 0.
struct SymbolPath {
    std::vector<LevelId> word;
    std::size_t anchor = 0;
};

/// Itinerary of consecutive natural-extension points.
SymbolPath encode(const std::vector<NatExtPoint>& points, std::size_t anchor = 0);
bool admissible(const TowerGraph& graph, const SymbolPath& path);

struct ReturnAtom {
    std::size_t time = 0;
    std::vector<LevelId> path; // u ... u, no interior u
    Cell cell;                 // points of D_u that follow the path
    Scalar weight;             // product of p along the path (normalized by mu_hat(D_u))
};

struct ReturnPartition {
    LevelId base = 0;
    std::size_t cap = 0;
    Scalar mu_hat_base;
    std::vector<ReturnAtom> atoms; // depth-first, lexicographic in the path
    Scalar tail;                   // 1 - sum of weights
};

struct ReturnOptions {
    std::size_t max_atoms = 100000;
};

/// First-return paths of length <= cap inside the rho-support. Throws ShiftError
/// if u carries no mass and BudgetExceeded past max_atoms.
ReturnPartition induced_return_partition(const TowerGraph& graph, const PartitionMap& map, const LevelMeasure& m,
                                         LevelId u, std::size_t cap, const ReturnOptions& opts = {});

/// Probability that the first return to u happens at time n, for n = 1..cap
/// (index n-1), computed by propagation instead of path enumeration.
std::vector<double> return_time_distribution(const TowerGraph& graph, const LevelMeasure& m, LevelId u,
                                             std::size_t cap);

struct KacResult {
    LevelId base = 0;
    std::size_t cap = 0;
    double known = 0; // sum_{n <= cap} n f_n
    double tail = 0;  // 1 - sum_{n <= cap} f_n
    double lower = 0;
    double upper = 0;
    double target = 0; // 1 / mu_hat(D_u)
    /// Mean return time from the fundamental matrix, computed in the active mode.
    Scalar exact_mean;
    bool exact_matches = false;

    bool contains_target() const { return lower <= target && target <= upper; }
    double width() const { return upper - lower; }
};

/// Kac's identity. The tail beyond `cap` is bracketed using K steps of the
/// killed chain: q = ||Q^K||_inf < 1 bounds the expected remaining time by K tail/(1-q).
KacResult kac_check(const TowerGraph& graph, const LevelMeasure& m, LevelId u, std::size_t cap);

struct BernoulliReport {
    LevelId base = 0;
    std::size_t atoms_checked = 0;
    std::size_t pairs_checked = 0;
    /// Every atom is mapped onto D_u by its return branch composition.
    bool full_branches = true;
    /// mu(cell of PP') mu(D_u) == mu(cell of P) mu(cell of P').
    bool multiplicative = true;
    /// Geometric atom mass agrees with the chain weight.
    bool weights_match = true;
    std::string witness;

    bool ok() const { return full_branches && multiplicative && weights_match; }
};

/// Checks that the induced first-return map at u has a product structure.
/// Uses every atom with return time <= cap (at most max_atoms of them).
BernoulliReport bernoulli_factor_check(const TowerGraph& graph, const PartitionMap& map, const LevelMeasure& m,
                                       LevelId u, std::size_t cap, std::size_t max_atoms = 64);

struct MixingContext {
    std::optional<double> entropy_nats;
    bool constant_slope_1d = false;
    /// Both signs of the same Pisot beta were analysed in this run.
    bool pisot_pair = false;
};

struct MixingReport {
    std::vector<LevelId> support;
    bool irreducible = false;
    std::size_t period = 0;
    std::vector<std::size_t> cycle_lengths; // distinct simple cycle lengths found
    bool cycles_complete = true;
    std::string verdict;
    std::optional<double> entropy_nats;
    std::vector<std::string> annotations;

    bool mixing() const { return irreducible && period == 1; }
};

MixingReport mixing_report(const TowerGraph& graph, const std::vector<LevelId>& support, const MixingContext& ctx = {});

/// max_u |pi(u) - mu_hat(u)| where pi is the stationary vector of p on the rho-support.
double stationary_deviation(const TowerGraph& graph, const LevelMeasure& m);

} // namespace hofbauer
