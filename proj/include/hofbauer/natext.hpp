#pragma once

#include "hofbauer/measures.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hofbauer {

/// Raised when rugs cannot be stacked or a point is not inside its rug.
class NatExtError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The image of rug R_t inside rug R_u: full width, stacked by ascending source id.
struct Strip {
    LevelId source = 0;
    std::size_t branch = 0;
    Scalar offset;
    Scalar thickness; // rho(D_t) / s_j(t)
};

struct Rug {
    LevelId level = 0;
    Cell base;
    Scalar height; // rho(D_u)
    std::vector<Strip> strips;

    /// Strip whose source is `t`; throws if t -> u is not an edge.
    const Strip& strip_from(LevelId t) const;
};

/// Rugs for every level of a tower (zero-height rugs on transient levels).
class RugSet {
public:
    RugSet(const TowerGraph& graph, const PartitionMap& map, LevelMeasure measure);

    const TowerGraph& graph() const { return *graph_; }
    const PartitionMap& map() const { return *map_; }
    const LevelMeasure& measure() const { return measure_; }
    const std::vector<Rug>& rugs() const { return rugs_; }
    const Rug& rug(LevelId u) const { return rugs_.at(u - 1); }
    /// nu(Y) = sum mu_bar(D_u) rho(D_u).
    Scalar total_mass() const;

private:
    const TowerGraph* graph_;
    const PartitionMap* map_;
    LevelMeasure measure_;
    std::vector<Rug> rugs_;
};

/// Builds the rugs and checks that each rug's strips tile [0, rho(D_u)].
/// `graph` and `map` must outlive the result.
RugSet build_rugs(const TowerGraph& graph, const PartitionMap& map, const LevelMeasure& measure);

struct NatExtPoint {
    LevelId level = 0;
    Point x;  // base point in D_level
    Scalar y; // fiber height in [0, rho(D_level)]
};

bool operator==(const NatExtPoint& a, const NatExtPoint& b);
std::string to_string(const NatExtPoint& z);

struct StepResult {
    NatExtPoint point;
    /// The step was decided by a tie-break on a measure-zero set.
    bool boundary = false;
};

/// Throws NatExtError if z is not inside its rug.
void check_inside(const RugSet& rugs, const NatExtPoint& z);

StepResult step_forward(const RugSet& rugs, const NatExtPoint& z);
StepResult step_backward(const RugSet& rugs, const NatExtPoint& z);

struct Orbit {
    std::vector<NatExtPoint> points; // points[0] is the start
    std::vector<std::size_t> flagged; // indices i whose step into points[i] hit a tie-break
};

/// |n| steps forward (n > 0) or backward (n < 0).
Orbit orbit(const RugSet& rugs, const NatExtPoint& z, long n);

/// A uniformly sampled point of the rug union, weighted by rug mass nu(R_u).
/// `grain` is the denominator used for the rational fractions of each coordinate.
NatExtPoint sample_point(const RugSet& rugs, std::mt19937_64& rng, std::uint64_t grain = (1u << 30));

struct NatExtReport {
    bool strips_exact = true;
    std::string strip_witness;
    Scalar nu_total;
    bool nu_is_one = false;
    /// nu(strip of t in R_u) == nu(D_t cap T^-1 D_u x [0, rho_t]) for every edge.
    bool measure_preserved = true;
    std::string measure_witness;
    std::size_t samples = 0;
    std::size_t flagged = 0;
    std::size_t round_trip_failures = 0;
    std::size_t semiconjugacy_failures = 0;
    std::size_t contraction_failures = 0;
    std::string witness;

    bool ok() const;
};

NatExtReport check_natext(const RugSet& rugs, std::size_t samples, std::uint64_t seed);

/// The union of the base cells of levels with rho > 0, merged into disjoint
/// intervals (dimension 1 only).
std::vector<Interval> projected_support(const RugSet& rugs);

} // namespace hofbauer
