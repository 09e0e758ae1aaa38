#include "hofbauer/tower.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace hofbauer {

bool TowerGraph::has_edge(LevelId from, LevelId to) const
{
    const auto& s = successors(from);
    return std::find(s.begin(), s.end(), to) != s.end();
}

LevelId TowerGraph::add_level(TowerLevel level)
{
    level.id = levels_.size() + 1;
    levels_.push_back(std::move(level));
    succ_.emplace_back();
    pred_.emplace_back();
    return levels_.back().id;
}

void TowerGraph::add_edge(LevelId from, LevelId to, std::size_t branch)
{
    edges_.push_back({from, to, branch});
    succ_[from - 1].push_back(to);
    pred_[to - 1].push_back(from);
}

TowerGraph build_tower(const PartitionMap& map, const TowerOptions& opts)
{
    if (opts.max_depth < 1 || opts.max_levels < 1) throw BudgetExceeded("tower caps must be at least 1");
    TowerGraph g;
    g.options_ = opts;
    const std::size_t n = map.size();
    const bool exact = map.mode().exact();
    std::vector<std::vector<LevelId>> buckets(n + 1); // float-mode dedup, per partition index

    auto key_of = [](std::size_t j, const Cell& c) { return std::to_string(j) + ":" + c.key(); };
    auto find = [&](std::size_t j, const Cell& c) -> std::optional<LevelId> {
        if (exact) {
            auto it = g.index_.find(key_of(j, c));
            if (it == g.index_.end()) return std::nullopt;
            return it->second;
        }
        for (LevelId id : buckets[j]) {
            const Cell& other = g.level(id).cell;
            if (other == c) {
                if (other.key() != c.key()) ++g.tolerance_merges_;
                return id;
            }
        }
        return std::nullopt;
    };
    auto remember = [&](LevelId id) {
        const TowerLevel& l = g.level(id);
        if (exact) g.index_.emplace(key_of(l.partition_index, l.cell), id);
        else buckets[l.partition_index].push_back(id);
    };

    std::deque<LevelId> work;
    for (std::size_t j = 1; j <= n; ++j) {
        LevelId id = g.add_level({0, map.cell(j), j, 0, {j}});
        remember(id);
        work.push_back(id);
    }
    g.base_size_ = n;

    while (!work.empty()) {
        LevelId t = work.front();
        work.pop_front();
        const std::size_t branch = g.level(t).partition_index;
        const std::size_t depth = g.level(t).depth;
        const Cell image = map.branch(branch).image(g.level(t).cell);
        for (std::size_t j = 1; j <= n; ++j) {
            auto piece = image.intersect(map.cell(j));
            if (!piece || !piece->has_positive_volume()) continue;
            auto target = find(j, *piece);
            if (!target) {
                if (depth + 1 > opts.max_depth || g.size() >= opts.max_levels) {
                    g.finite_ = false;
                    g.truncated_.insert(t);
                    continue;
                }
                std::vector<std::size_t> word = g.level(t).word;
                word.push_back(j);
                target = g.add_level({0, *piece, j, depth + 1, std::move(word)});
                remember(*target);
                work.push_back(*target);
            }
            g.add_edge(t, *target, branch);
        }
    }
    if (g.tolerance_merges_ > 0)
        g.warnings.push_back(std::to_string(g.tolerance_merges_) + " float-mode level merges decided within eps");
    if (!g.finite_) g.warnings.push_back("tower truncated at max_depth/max_levels");
    return g;
}

TowerGraph graph_from_edges(std::size_t n, const std::vector<std::pair<LevelId, LevelId>>& edges)
{
    TowerGraph g;
    for (std::size_t i = 1; i <= n; ++i) g.add_level({0, Cell::interval(0, 1), 1, 0, {}});
    g.base_size_ = n;
    for (auto [a, b] : edges) g.add_edge(a, b, 1);
    return g;
}

bool detect_markov(const PartitionMap& map)
{
    for (const auto& b : map.branches()) {
        Cell image = b.image(b.domain());
        for (std::size_t j = 1; j <= map.size(); ++j) {
            auto piece = image.intersect(map.cell(j));
            if (piece && piece->has_positive_volume() && !(*piece == map.cell(j))) return false;
        }
    }
    return true;
}

SccDecomposition scc_decompose(const TowerGraph& graph)
{
    const std::size_t n = graph.size();
    SccDecomposition out;
    out.component_of.assign(n, 0);
    std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;

    // Iterative Tarjan; frames hold (vertex, next successor position).
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != SIZE_MAX) continue;
        std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            const auto& succ = graph.successors(v + 1);
            if (pos < succ.size()) {
                std::size_t w = succ[pos++] - 1;
                if (index[w] == SIZE_MAX) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<LevelId> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    out.component_of[w] = out.components.size();
                    comp.push_back(w + 1);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                out.components.push_back(std::move(comp));
            }
            std::size_t done = v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
        }
    }
    for (std::size_t c = 0; c < out.components.size(); ++c) {
        bool closed = true;
        for (LevelId u : out.components[c])
            for (LevelId v : graph.successors(u))
                if (out.component_of[v - 1] != c) closed = false;
        if (closed) out.terminal.push_back(c);
    }
    std::vector<bool> in_terminal(n, false);
    for (std::size_t c : out.terminal)
        for (LevelId u : out.components[c]) in_terminal[u - 1] = true;
    for (std::size_t i = 0; i < n; ++i)
        if (!in_terminal[i]) out.transient.insert(i + 1);
    return out;
}

std::size_t component_period(const TowerGraph& graph, const std::vector<LevelId>& component)
{
    if (component.empty()) return 0;
    std::set<LevelId> members(component.begin(), component.end());
    std::map<LevelId, std::size_t> dist;
    std::deque<LevelId> q{component.front()};
    dist[component.front()] = 0;
    while (!q.empty()) {
        LevelId u = q.front();
        q.pop_front();
        for (LevelId v : graph.successors(u)) {
            if (!members.count(v) || dist.count(v)) continue;
            dist[v] = dist[u] + 1;
            q.push_back(v);
        }
    }
    std::size_t g = 0;
    for (LevelId u : component) {
        if (!dist.count(u)) continue;
        for (LevelId v : graph.successors(u)) {
            if (!members.count(v) || !dist.count(v)) continue;
            long long diff = static_cast<long long>(dist[u]) + 1 - static_cast<long long>(dist[v]);
            g = std::gcd(g, static_cast<std::size_t>(std::llabs(diff)));
        }
    }
    return g;
}

// ---------------------------------------------------------------- cylinders

namespace {

struct CylinderState {
    std::vector<std::size_t> word;
    Cell cell;                      // the cylinder itself
    std::vector<AffineAxis> to_top; // T^k on the cylinder
    Cell top;                       // T^k(cell), inside Z_{word.back()}
};

Cell pull_back(const std::vector<AffineAxis>& f, const Cell& c)
{
    std::vector<Interval> out;
    for (std::size_t i = 0; i < c.dim(); ++i) {
        Scalar a = (c.axis(i).lo - f[i].offset) / f[i].scale;
        Scalar b = (c.axis(i).hi - f[i].offset) / f[i].scale;
        if (f[i].scale.sign() < 0) std::swap(a, b);
        out.push_back({a, b});
    }
    return Cell(std::move(out));
}

} // namespace

std::vector<Cylinder> enumerate_cylinders(const PartitionMap& map, std::size_t n, const CylinderBudget& budget)
{
    std::vector<Cylinder> out;
    std::vector<CylinderState> stack;
    const NumericMode& mode = map.mode();
    for (std::size_t j = map.size(); j >= 1; --j) {
        std::vector<AffineAxis> id(map.dim(), AffineAxis{mode.lift(1), mode.lift(0)});
        stack.push_back({{j}, map.cell(j), id, map.cell(j)});
    }
    while (!stack.empty()) {
        CylinderState s = std::move(stack.back());
        stack.pop_back();
        if (s.word.size() == n + 1) {
            if (out.size() >= budget.max_cylinders)
                throw BudgetExceeded("cylinder enumeration exceeds " + std::to_string(budget.max_cylinders));
            out.push_back({std::move(s.word), std::move(s.cell)});
            continue;
        }
        const Branch& b = map.branch(s.word.back());
        Cell image = b.image(s.top);
        std::vector<AffineAxis> composed(map.dim());
        for (std::size_t i = 0; i < map.dim(); ++i) {
            composed[i].scale = b.action()[i].scale * s.to_top[i].scale;
            composed[i].offset = b.action()[i].scale * s.to_top[i].offset + b.action()[i].offset;
        }
        for (std::size_t j = map.size(); j >= 1; --j) {
            auto piece = image.intersect(map.cell(j));
            if (!piece || !piece->has_positive_volume()) continue;
            std::vector<std::size_t> word = s.word;
            word.push_back(j);
            stack.push_back({std::move(word), pull_back(composed, *piece), composed, *piece});
        }
    }
    return out;
}

BoundaryCount boundary_count(const Cell& d, const std::vector<Cylinder>& cylinders)
{
    BoundaryCount out;
    for (const auto& z : cylinders) {
        auto meet = z.cell.intersect(d);
        if (!meet || !meet->has_positive_volume()) continue;
        if (!(meet->volume() == z.cell.volume())) ++out.straddling;
        std::size_t faces = 0;
        for (std::size_t i = 0; i < d.dim(); ++i) {
            const Interval& zi = z.cell.axis(i);
            if (zi.contains(d.axis(i).lo)) ++faces;
            if (zi.contains(d.axis(i).hi)) ++faces;
        }
        if (faces > 0) {
            out.count += faces;
            out.boundary_set.push_back(*meet);
        }
    }
    return out;
}

BoundaryCount boundary_count(const TowerGraph& graph, const PartitionMap& map, LevelId u, std::size_t n,
                             const CylinderBudget& budget)
{
    return boundary_count(graph.level(u).cell, enumerate_cylinders(map, n, budget));
}

CapacityEstimate capacity_estimate(const TowerGraph& graph, const PartitionMap& map, std::size_t n_max,
                                   const CylinderBudget& budget)
{
    CapacityEstimate out;
    for (std::size_t n = 1; n <= n_max; ++n) {
        auto cylinders = enumerate_cylinders(map, n, budget);
        std::size_t sup = 0;
        for (const auto& level : graph.levels()) sup = std::max(sup, boundary_count(level.cell, cylinders).count);
        out.sup_counts.push_back(sup);
        out.terms.push_back(std::log(static_cast<double>(std::max<std::size_t>(sup, 1))) / static_cast<double>(n));
    }
    out.estimate = out.terms.empty() ? 0.0 : out.terms.back();
    return out;
}

} // namespace hofbauer
