#pragma once

#include "hofbauer/mapmodel.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace hofbauer {

/// Raised when an enumeration or construction budget is exhausted.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using LevelId = std::size_t; // 1-based; ids 1..N are the base cells

struct TowerLevel {
    LevelId id = 0;
    Cell cell;
    std::size_t partition_index = 0; // j(u): D_u is inside Z_j(u)
    std::size_t depth = 0;
    std::vector<std::size_t> word; // witnessing cylinder j_0 ... j_depth
};

struct TowerEdge {
    LevelId from = 0;
    LevelId to = 0;
    std::size_t branch = 0; // = partition index of `from`
};

struct TowerOptions {
    std::size_t max_depth = 64;
    std::size_t max_levels = 100000;
};

/// Canonical Markov graph (D, ->) of the Hofbauer tower.
class TowerGraph {
public:
    std::size_t size() const { return levels_.size(); }
    std::size_t base_size() const { return base_size_; }
    const TowerLevel& level(LevelId id) const { return levels_.at(id - 1); }
    const std::vector<TowerLevel>& levels() const { return levels_; }
    const std::vector<TowerEdge>& edges() const { return edges_; }
    /// Targets of `id` in discovery order.
    const std::vector<LevelId>& successors(LevelId id) const { return succ_.at(id - 1); }
    const std::vector<LevelId>& predecessors(LevelId id) const { return pred_.at(id - 1); }
    bool has_edge(LevelId from, LevelId to) const;

    /// True iff construction finished without hitting a cap.
    bool finite() const { return finite_; }
    /// Levels whose image was not fully resolved because of a cap.
    const std::set<LevelId>& truncated_levels() const { return truncated_; }
    const TowerOptions& options() const { return options_; }
    /// Float-mode dedup matches decided within the tolerance window.
    std::size_t tolerance_merges() const { return tolerance_merges_; }
    std::vector<std::string> warnings;

private:
    friend TowerGraph build_tower(const PartitionMap&, const TowerOptions&);
    friend TowerGraph graph_from_edges(std::size_t, const std::vector<std::pair<LevelId, LevelId>>&);
    LevelId add_level(TowerLevel level);
    void add_edge(LevelId from, LevelId to, std::size_t branch);

    std::vector<TowerLevel> levels_;
    std::vector<TowerEdge> edges_;
    std::vector<std::vector<LevelId>> succ_, pred_;
    std::unordered_map<std::string, LevelId> index_;
    std::size_t base_size_ = 0;
    bool finite_ = true;
    std::set<LevelId> truncated_;
    TowerOptions options_;
    std::size_t tolerance_merges_ = 0;
};

/// Breadth-first worklist construction with exact (or eps-tolerant) level dedup.
TowerGraph build_tower(const PartitionMap& map, const TowerOptions& opts = {});

/// Bare graph on levels 1..n (no geometry), for graph-only analyses.
TowerGraph graph_from_edges(std::size_t n, const std::vector<std::pair<LevelId, LevelId>>& edges);

/// True iff every branch image of every cell is a union of cells up to volume zero.
bool detect_markov(const PartitionMap& map);

struct SccDecomposition {
    std::vector<std::vector<LevelId>> components; // each sorted ascending; reverse topological order
    std::vector<std::size_t> component_of;        // indexed by id - 1
    std::vector<std::size_t> terminal;            // indices into components
    std::set<LevelId> transient;                  // levels outside every terminal component
};

SccDecomposition scc_decompose(const TowerGraph& graph);

/// gcd of cycle lengths inside the strongly connected set `component` (0 if acyclic).
std::size_t component_period(const TowerGraph& graph, const std::vector<LevelId>& component);

struct CylinderBudget {
    std::size_t max_cylinders = 1000000;
};

/// A cylinder Z_{j_0...j_n} as a box together with T^n restricted to it.
struct Cylinder {
    std::vector<std::size_t> word;
    Cell cell;
};

/// All (n+1)-cylinders of positive volume, depth-first in lexicographic word order.
std::vector<Cylinder> enumerate_cylinders(const PartitionMap& map, std::size_t n, const CylinderBudget& budget = {});

struct BoundaryCount {
    std::size_t count = 0;          // frontier incidences
    std::size_t straddling = 0;     // cylinders with 0 < mu(Z cap D) < mu(Z)
    std::vector<Cell> boundary_set; // B_{u,n}: the pieces Z cap D_u over counted cylinders
};

/// #(d_n D_u): for each face of D_u, the cylinders of Z_n that meet D_u in
/// positive volume and touch that face in positive (q-1)-dimensional measure.
BoundaryCount boundary_count(const TowerGraph& graph, const PartitionMap& map, LevelId u, std::size_t n,
                             const CylinderBudget& budget = {});

/// Same count against a precomputed cylinder list.
BoundaryCount boundary_count(const Cell& level_cell, const std::vector<Cylinder>& cylinders);

struct CapacityEstimate {
    std::vector<std::size_t> sup_counts; // index n-1
    std::vector<double> terms;           // (1/n) log sup_u #(d_n D_u)
    double estimate = 0;
};

CapacityEstimate capacity_estimate(const TowerGraph& graph, const PartitionMap& map, std::size_t n_max,
                                   const CylinderBudget& budget = {});

} // namespace hofbauer
