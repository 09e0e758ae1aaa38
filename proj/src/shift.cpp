#include "hofbauer/shift.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace hofbauer {

namespace {

using TransitionTable = std::map<std::pair<LevelId, LevelId>, Scalar>;

TransitionTable table_of(const LevelMeasure& m)
{
    TransitionTable out;
    for (const auto& t : m.transitions) out.emplace(std::make_pair(t.from, t.to), t.p);
    return out;
}

std::vector<bool> support_mask(const TowerGraph& graph, const LevelMeasure& m)
{
    std::vector<bool> mask(graph.size(), false);
    for (LevelId u : m.support()) mask[u - 1] = true;
    return mask;
}

void require_support(const LevelMeasure& m, LevelId u)
{
    if (u < 1 || u > m.rho.size()) throw ShiftError("no level " + std::to_string(u));
    if (m.rho[u - 1].sign() <= 0) throw ShiftError("level " + std::to_string(u) + " is transient (mu_hat = 0)");
}

// Pulls `target` back through the branches along path[0..n-1].
Cell pull_back_along(const TowerGraph& graph, const PartitionMap& map, const std::vector<LevelId>& path, Cell target)
{
    for (std::size_t i = path.size() - 1; i-- > 0;)
        target = branch_preimage(map, graph.level(path[i]).partition_index, target);
    return target;
}

std::vector<std::vector<double>> mat_mul(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b)
{
    const std::size_t n = a.size();
    std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

} // namespace

SymbolPath encode(const std::vector<NatExtPoint>& points, std::size_t anchor)
{
    SymbolPath out;
    out.anchor = anchor;
    out.word.reserve(points.size());
    for (const auto& z : points) out.word.push_back(z.level);
    return out;
}

bool admissible(const TowerGraph& graph, const SymbolPath& path)
{
    for (std::size_t i = 0; i + 1 < path.word.size(); ++i)
        if (!graph.has_edge(path.word[i], path.word[i + 1])) return false;
    return true;
}

ReturnPartition induced_return_partition(const TowerGraph& graph, const PartitionMap& map, const LevelMeasure& m,
                                         LevelId u, std::size_t cap, const ReturnOptions& opts)
{
    require_support(m, u);
    if (cap < 1) throw ShiftError("return cap must be at least 1");
    auto p = table_of(m);
    auto mask = support_mask(graph, m);
    const NumericMode& mode = map.mode();

    ReturnPartition out;
    out.base = u;
    out.cap = cap;
    out.mu_hat_base = m.mu_hat[u - 1];
    Scalar total = mode.lift(0);

    struct Frame {
        std::vector<LevelId> path;
        Scalar weight;
    };
    std::vector<Frame> stack{{{u}, mode.lift(1)}};
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        const auto& succ = graph.successors(f.path.back());
        std::vector<LevelId> next(succ.begin(), succ.end());
        std::sort(next.rbegin(), next.rend()); // pop order is ascending
        for (LevelId v : next) {
            if (!mask[v - 1]) continue;
            std::vector<LevelId> path = f.path;
            path.push_back(v);
            Scalar w = f.weight * p.at({f.path.back(), v});
            if (v == u) {
                if (out.atoms.size() >= opts.max_atoms)
                    throw BudgetExceeded("return partition exceeds " + std::to_string(opts.max_atoms) + " atoms");
                ReturnAtom atom;
                atom.time = path.size() - 1;
                atom.cell = pull_back_along(graph, map, path, graph.level(u).cell);
                atom.path = std::move(path);
                atom.weight = w;
                total += w;
                out.atoms.push_back(std::move(atom));
            } else if (path.size() - 1 < cap) {
                stack.push_back({std::move(path), std::move(w)});
            }
        }
    }
    std::sort(out.atoms.begin(), out.atoms.end(), [](const ReturnAtom& a, const ReturnAtom& b) { return a.path < b.path; });
    out.tail = mode.lift(1) - total;
    return out;
}

std::vector<double> return_time_distribution(const TowerGraph& graph, const LevelMeasure& m, LevelId u,
                                             std::size_t cap)
{
    require_support(m, u);
    auto mask = support_mask(graph, m);
    std::vector<double> f(cap, 0.0);
    std::vector<double> r(graph.size(), 0.0);
    r[u - 1] = 1.0;
    std::vector<std::tuple<LevelId, LevelId, double>> edges;
    for (const auto& t : m.transitions)
        if (mask[t.from - 1] && mask[t.to - 1]) edges.emplace_back(t.from, t.to, t.p.to_double());
    for (std::size_t n = 1; n <= cap; ++n) {
        std::vector<double> next(graph.size(), 0.0);
        for (auto [a, b, q] : edges) next[b - 1] += r[a - 1] * q;
        f[n - 1] = next[u - 1];
        next[u - 1] = 0.0;
        r = std::move(next);
    }
    return f;
}

KacResult kac_check(const TowerGraph& graph, const LevelMeasure& m, LevelId u, std::size_t cap)
{
    require_support(m, u);
    KacResult out;
    out.base = u;
    out.cap = cap;
    out.target = 1.0 / m.mu_hat[u - 1].to_double();

    auto f = return_time_distribution(graph, m, u, cap);
    double returned = 0;
    for (std::size_t n = 1; n <= cap; ++n) {
        out.known += static_cast<double>(n) * f[n - 1];
        returned += f[n - 1];
    }
    out.tail = std::max(0.0, 1.0 - returned);

    // Killed chain Q on support minus u.
    std::vector<LevelId> others;
    for (LevelId v : m.support())
        if (v != u) others.push_back(v);
    std::map<LevelId, std::size_t> pos;
    for (std::size_t i = 0; i < others.size(); ++i) pos[others[i]] = i;
    const std::size_t k = std::max<std::size_t>(others.size(), 1);
    std::vector<std::vector<double>> q(others.size(), std::vector<double>(others.size(), 0.0));
    for (const auto& t : m.transitions) {
        auto a = pos.find(t.from), b = pos.find(t.to);
        if (a != pos.end() && b != pos.end()) q[a->second][b->second] = t.p.to_double();
    }
    double q_norm = 0;
    if (!others.empty()) {
        auto power = q;
        for (std::size_t i = 1; i < k; ++i) power = mat_mul(power, q);
        for (const auto& row : power) q_norm = std::max(q_norm, std::accumulate(row.begin(), row.end(), 0.0));
    }
    out.lower = out.known + static_cast<double>(cap + 1) * out.tail;
    if (out.tail == 0) out.upper = out.lower;
    else if (q_norm < 1) out.upper = out.known + static_cast<double>(cap) * out.tail + static_cast<double>(k) * out.tail / (1 - q_norm);
    else out.upper = INFINITY;
    // The sums above are accumulated in double; widen the bracket by a rounding allowance.
    const double slack = 1e-12 * std::max(1.0, out.lower) * static_cast<double>(std::max<std::size_t>(cap, 1));
    out.lower -= slack;
    out.upper += slack;

    // Exact mean: 1 + sum_v p_{u,v} h_v with (I - Q) h = 1.
    const Scalar one = m.mu_hat[u - 1] / m.mu_hat[u - 1];
    const Scalar zero = one - one;
    auto table = table_of(m);
    std::vector<Scalar> h;
    if (!others.empty()) {
        std::vector<std::vector<Scalar>> a(others.size(), std::vector<Scalar>(others.size(), zero));
        std::vector<Scalar> b(others.size(), one);
        for (std::size_t i = 0; i < others.size(); ++i) a[i][i] = one;
        for (const auto& [edge, p] : table) {
            auto ia = pos.find(edge.first), ib = pos.find(edge.second);
            if (ia != pos.end() && ib != pos.end()) a[ia->second][ib->second] -= p;
        }
        h = solve_linear_system(std::move(a), std::move(b));
    }
    Scalar mean = one;
    for (const auto& [edge, p] : table) {
        if (edge.first != u) continue;
        auto it = pos.find(edge.second);
        if (it != pos.end()) mean += p * h[it->second];
    }
    out.exact_mean = mean;
    out.exact_matches = mean * m.mu_hat[u - 1] == one;
    return out;
}

BernoulliReport bernoulli_factor_check(const TowerGraph& graph, const PartitionMap& map, const LevelMeasure& m,
                                       LevelId u, std::size_t cap, std::size_t max_atoms)
{
    ReturnPartition part = induced_return_partition(graph, map, m, u, cap);
    BernoulliReport rep;
    rep.base = u;
    const Cell& base = graph.level(u).cell;
    const Scalar base_mass = map.measure(base);
    std::vector<const ReturnAtom*> atoms;
    for (const auto& a : part.atoms)
        if (atoms.size() < max_atoms) atoms.push_back(&a);
    rep.atoms_checked = atoms.size();

    for (const ReturnAtom* a : atoms) {
        Cell image = a->cell;
        for (std::size_t i = 0; i + 1 < a->path.size(); ++i)
            image = branch_image(map, graph.level(a->path[i]).partition_index, image);
        if (!(image == base)) {
            rep.full_branches = false;
            rep.witness = "atom " + std::to_string(a->time) + " does not cover the base level";
        }
        if (!(map.measure(a->cell) == a->weight * base_mass)) {
            rep.weights_match = false;
            rep.witness = "atom of return time " + std::to_string(a->time) + " has mismatched mass";
        }
    }
    for (const ReturnAtom* a : atoms)
        for (const ReturnAtom* b : atoms) {
            ++rep.pairs_checked;
            Cell joint = pull_back_along(graph, map, a->path, b->cell);
            if (!(map.measure(joint) * base_mass == map.measure(a->cell) * map.measure(b->cell))) {
                rep.multiplicative = false;
                rep.witness = "pair of return times " + std::to_string(a->time) + ", " + std::to_string(b->time);
            }
        }
    return rep;
}

MixingReport mixing_report(const TowerGraph& graph, const std::vector<LevelId>& support, const MixingContext& ctx)
{
    MixingReport rep;
    rep.support = support;
    std::sort(rep.support.begin(), rep.support.end());
    rep.entropy_nats = ctx.entropy_nats;
    const std::size_t n = rep.support.size();
    std::map<LevelId, LevelId> local;
    for (std::size_t i = 0; i < n; ++i) local[rep.support[i]] = i + 1;
    std::vector<std::pair<LevelId, LevelId>> edges;
    for (LevelId u : rep.support)
        for (LevelId v : graph.successors(u)) {
            auto it = local.find(v);
            if (it != local.end()) edges.emplace_back(local[u], it->second);
        }
    TowerGraph sub = graph_from_edges(n, edges);

    if (n > 0) {
        SccDecomposition scc = scc_decompose(sub);
        rep.irreducible = scc.components.size() == 1;
        std::vector<LevelId> all(n);
        std::iota(all.begin(), all.end(), LevelId{1});
        rep.period = rep.irreducible ? component_period(sub, all) : 0;
    }

    // Simple cycles rooted at their smallest vertex.
    std::set<std::size_t> lengths;
    std::size_t found = 0;
    const std::size_t budget = 100000;
    for (LevelId root = 1; root <= n && rep.cycles_complete; ++root) {
        std::vector<bool> on_path(n + 1, false);
        std::vector<std::pair<LevelId, std::size_t>> frames{{root, 0}};
        on_path[root] = true;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            const auto& succ = sub.successors(v);
            if (pos >= succ.size()) {
                on_path[v] = false;
                frames.pop_back();
                continue;
            }
            LevelId w = succ[pos++];
            if (w == root) {
                lengths.insert(frames.size());
                if (++found >= budget) {
                    rep.cycles_complete = false;
                    break;
                }
            } else if (w > root && !on_path[w]) {
                on_path[w] = true;
                frames.push_back({w, 0});
            }
        }
    }
    rep.cycle_lengths.assign(lengths.begin(), lengths.end());

    if (rep.mixing()) {
        rep.verdict = "exact / K / strongly mixing";
        rep.annotations.push_back("support graph irreducible and aperiodic: the Markov shift is mixing, the natural "
                                  "extension is K, and the map is exact");
    } else if (rep.irreducible) {
        rep.verdict = "not mixing";
        rep.annotations.push_back("support graph has period " + std::to_string(rep.period));
    } else {
        rep.verdict = "not mixing";
        rep.annotations.push_back("support graph is reducible");
    }
    if (ctx.constant_slope_1d && rep.mixing())
        rep.annotations.push_back("constant |slope| interval map: weakly Bernoulli (Rychlik)");
    if (ctx.pisot_pair)
        rep.annotations.push_back("positive and negative beta-transformations at the same Pisot beta share their "
                                  "entropy; finitary isomorphism (Keane-Smorodinsky) is cited, not constructed");
    rep.annotations.push_back("conditional-entropy condition (Saleski): not evaluated");
    if (!rep.cycles_complete) rep.annotations.push_back("cycle listing truncated at 100000 cycles");
    return rep;
}

double stationary_deviation(const TowerGraph& graph, const LevelMeasure& m)
{
    if (m.rho.size() != graph.size()) throw ShiftError("measure does not match the tower");
    std::vector<LevelId> support = m.support();
    const std::size_t n = support.size();
    if (n == 0) throw ShiftError("empty rho-support");
    std::map<LevelId, std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i) pos[support[i]] = i;
    // pi (P - I) = 0 with the last equation replaced by sum pi = 1.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) a[i][i] = -1.0;
    for (const auto& t : m.transitions) {
        auto ia = pos.find(t.from), ib = pos.find(t.to);
        if (ia != pos.end() && ib != pos.end()) a[ib->second][ia->second] += t.p.to_double();
    }
    for (std::size_t i = 0; i < n; ++i) a[n - 1][i] = 1.0;
    a[n - 1][n] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        if (a[c][c] == 0) throw ShiftError("stationary system is singular");
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    double dev = 0;
    for (std::size_t i = 0; i < n; ++i)
        dev = std::max(dev, std::fabs(a[i][n] / a[i][i] - m.mu_hat[support[i] - 1].to_double()));
    return dev;
}

} // namespace hofbauer
