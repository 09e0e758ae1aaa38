#include "hofbauer/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace hofbauer {

std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::cesaro: return "cesaro";
    case Provenance::eigen: return "eigen";
    case Provenance::parry: return "parry";
    }
    return "?";
}

namespace {

std::vector<double> doubles(const std::vector<Scalar>& v)
{
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](const Scalar& s) { return s.to_double(); });
    return out;
}

double magnitude(const Scalar& s) { return std::fabs(s.to_double()); }
double magnitude(double s) { return std::fabs(s); }
bool is_zero_value(const Scalar& s) { return s.is_zero(); }
bool is_zero_value(double s) { return s == 0.0; }

// Gaussian elimination with largest-magnitude pivots; zero tests are exact for Scalars.
template <class T>
std::vector<T> solve_linear(std::vector<std::vector<T>> a, std::vector<T> b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = n;
        double best = -1;
        for (std::size_t r = col; r < n; ++r) {
            if (is_zero_value(a[r][col])) continue;
            double m = magnitude(a[r][col]);
            if (m > best) {
                best = m;
                pivot = r;
            }
        }
        if (pivot == n) throw LiftError("singular linear system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || is_zero_value(a[r][col])) continue;
            T f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] = a[r][c] - f * a[col][c];
            b[r] = b[r] - f * b[col];
        }
    }
    std::vector<T> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

struct Components {
    std::vector<std::vector<LevelId>> closed; // terminal components free of truncation
    std::vector<LevelId> transient;           // everything else
};

Components closed_components(const TowerGraph& graph)
{
    SccDecomposition scc = scc_decompose(graph);
    Components out;
    std::vector<bool> closed(graph.size(), false);
    for (std::size_t c : scc.terminal) {
        const auto& comp = scc.components[c];
        bool clean = std::none_of(comp.begin(), comp.end(),
                                  [&](LevelId u) { return graph.truncated_levels().count(u) > 0; });
        if (!clean) continue;
        out.closed.push_back(comp);
        for (LevelId u : comp) closed[u - 1] = true;
    }
    std::sort(out.closed.begin(), out.closed.end());
    for (LevelId u = 1; u <= graph.size(); ++u)
        if (!closed[u - 1]) out.transient.push_back(u);
    return out;
}

template <class T>
struct Ops;

template <>
struct Ops<Scalar> {
    const PartitionMap& map;
    Scalar one() const { return map.mode().lift(1); }
    Scalar zero() const { return map.mode().lift(0); }
    Scalar jac(std::size_t j) const { return map.branch(j).jacobian(); }
    Scalar mu(const Cell& c) const { return map.measure(c); }
};

template <>
struct Ops<double> {
    const PartitionMap& map;
    double one() const { return 1.0; }
    double zero() const { return 0.0; }
    double jac(std::size_t j) const { return map.branch(j).jacobian().to_double(); }
    double mu(const Cell& c) const { return map.measure(c).to_double(); }
};

// rho on one closed component, normalized to sum rho mu_bar = 1 over it.
template <class T>
std::vector<T> component_density(const TowerGraph& graph, const Ops<T>& ops, const std::vector<LevelId>& comp,
                                 const std::vector<T>& mu_bar)
{
    const std::size_t m = comp.size();
    std::map<LevelId, std::size_t> pos;
    for (std::size_t i = 0; i < m; ++i) pos[comp[i]] = i;
    std::vector<std::vector<T>> a(m, std::vector<T>(m, ops.zero()));
    std::vector<T> b(m, ops.zero());
    for (std::size_t i = 0; i < m; ++i) {
        a[i][i] = a[i][i] - ops.one();
        for (LevelId t : graph.predecessors(comp[i])) {
            auto it = pos.find(t);
            if (it == pos.end()) continue;
            a[i][it->second] = a[i][it->second] + ops.one() / ops.jac(graph.level(t).partition_index);
        }
    }
    for (std::size_t i = 0; i < m; ++i) a[m - 1][i] = mu_bar[comp[i] - 1];
    b[m - 1] = ops.one();
    return solve_linear(std::move(a), std::move(b));
}

// Base mass absorbed into each closed component by the mass chain p.
template <class T>
std::vector<T> absorption(const TowerGraph& graph, const Ops<T>& ops, const Components& comps,
                          const std::vector<T>& mu_bar)
{
    T base_mass = ops.zero();
    for (LevelId u = 1; u <= graph.base_size(); ++u) base_mass = base_mass + mu_bar[u - 1];
    auto initial = [&](LevelId u) { return u <= graph.base_size() ? mu_bar[u - 1] / base_mass : ops.zero(); };
    auto p = [&](LevelId t, LevelId u) { return mu_bar[u - 1] / (ops.jac(graph.level(t).partition_index) * mu_bar[t - 1]); };

    const auto& tr = comps.transient;
    std::map<LevelId, std::size_t> pos;
    for (std::size_t i = 0; i < tr.size(); ++i) pos[tr[i]] = i;
    std::vector<T> x;
    if (!tr.empty()) {
        // (I - Q)^T x = m0 restricted to transient levels.
        std::vector<std::vector<T>> a(tr.size(), std::vector<T>(tr.size(), ops.zero()));
        std::vector<T> b(tr.size(), ops.zero());
        for (std::size_t i = 0; i < tr.size(); ++i) {
            a[i][i] = ops.one();
            b[i] = initial(tr[i]);
        }
        for (std::size_t k = 0; k < tr.size(); ++k)
            for (LevelId u : graph.successors(tr[k])) {
                auto it = pos.find(u);
                if (it != pos.end()) a[it->second][k] = a[it->second][k] - p(tr[k], u);
            }
        x = solve_linear(std::move(a), std::move(b));
    }
    std::vector<T> out;
    for (const auto& comp : comps.closed) {
        T acc = ops.zero();
        for (LevelId u : comp) acc = acc + initial(u);
        for (std::size_t k = 0; k < tr.size(); ++k)
            for (LevelId u : graph.successors(tr[k]))
                if (std::binary_search(comp.begin(), comp.end(), u)) acc = acc + x[k] * p(tr[k], u);
        out.push_back(acc);
    }
    return out;
}

std::vector<double> apply_w(const TowerGraph& graph, const std::vector<double>& rho, const std::vector<double>& s_inv)
{
    std::vector<double> out(rho.size(), 0.0);
    for (const auto& e : graph.edges()) out[e.to - 1] += rho[e.from - 1] * s_inv[e.from - 1];
    return out;
}

std::vector<double> inverse_jacobians(const TowerGraph& graph, const PartitionMap& map)
{
    std::vector<double> s_inv(graph.size());
    for (const auto& l : graph.levels()) s_inv[l.id - 1] = 1.0 / map.branch(l.partition_index).jacobian().to_double();
    return s_inv;
}

double fixed_point_residual(const TowerGraph& graph, const std::vector<double>& rho, const std::vector<double>& s_inv)
{
    auto w = apply_w(graph, rho, s_inv);
    double r = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) r = std::max(r, std::fabs(w[i] - rho[i]));
    return r;
}

} // namespace

std::vector<Scalar> solve_linear_system(std::vector<std::vector<Scalar>> a, std::vector<Scalar> b)
{
    return solve_linear(std::move(a), std::move(b));
}

std::vector<double> LevelMeasure::rho_double() const { return doubles(rho); }
std::vector<double> LevelMeasure::mu_hat_double() const { return doubles(mu_hat); }
std::vector<double> LevelMeasure::mu_bar_double() const { return doubles(mu_bar); }

std::vector<LevelId> LevelMeasure::support() const
{
    std::vector<LevelId> out;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (rho[i].sign() > 0) out.push_back(i + 1);
    return out;
}

std::vector<Scalar> ref_measure(const TowerGraph& graph, const PartitionMap& map)
{
    std::vector<Scalar> out;
    out.reserve(graph.size());
    for (const auto& l : graph.levels()) out.push_back(map.measure(l.cell));
    return out;
}

CesaroResult cesaro_lift(const TowerGraph& graph, const PartitionMap& map, std::size_t n, std::size_t keep_weights)
{
    if (n < 1) throw LiftError("cesaro_lift needs n >= 1");
    const std::size_t m = graph.size();
    auto s_inv = inverse_jacobians(graph, map);
    auto mu_bar = doubles(ref_measure(graph, map));
    double base_mass = 0;
    for (LevelId u = 1; u <= graph.base_size(); ++u) base_mass += mu_bar[u - 1];

    CesaroResult out;
    out.n = n;
    out.lower_bound = !graph.finite();
    std::vector<double> w(m, 0.0), acc(m, 0.0);
    for (LevelId u = 1; u <= graph.base_size(); ++u) w[u - 1] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k < keep_weights) out.weights.push_back(w);
        for (std::size_t i = 0; i < m; ++i) acc[i] += w[i];
        if (k + 1 == n) {
            double mass = 0;
            for (std::size_t i = 0; i < m; ++i) mass += w[i] * mu_bar[i];
            out.retained_mass = mass / base_mass;
        } else {
            w = apply_w(graph, w, s_inv);
        }
    }
    out.rho_n.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.rho_n[i] = acc[i] / (static_cast<double>(n) * base_mass);
    return out;
}

std::vector<std::vector<Scalar>> cesaro_weights_exact(const TowerGraph& graph, const PartitionMap& map,
                                                      std::size_t k_max)
{
    const NumericMode& mode = map.mode();
    std::vector<Scalar> s_inv(graph.size());
    for (const auto& l : graph.levels()) s_inv[l.id - 1] = mode.lift(1) / map.branch(l.partition_index).jacobian();
    std::vector<std::vector<Scalar>> out;
    std::vector<Scalar> w(graph.size(), mode.lift(0));
    for (LevelId u = 1; u <= graph.base_size(); ++u) w[u - 1] = mode.lift(1);
    out.push_back(w);
    for (std::size_t k = 0; k < k_max; ++k) {
        std::vector<Scalar> next(graph.size(), mode.lift(0));
        for (const auto& e : graph.edges()) next[e.to - 1] += w[e.from - 1] * s_inv[e.from - 1];
        w = std::move(next);
        out.push_back(w);
    }
    return out;
}

std::vector<Transition> markov_transitions(const TowerGraph& graph, const PartitionMap& map,
                                           const std::vector<Scalar>& mu_bar)
{
    std::vector<Transition> out;
    out.reserve(graph.edges().size());
    for (const auto& e : graph.edges()) {
        const Scalar& from = mu_bar.at(e.from - 1);
        if (from.is_zero()) throw LiftError("level " + std::to_string(e.from) + " has zero reference measure");
        out.push_back({e.from, e.to, mu_bar.at(e.to - 1) / (map.branch(e.branch).jacobian() * from)});
    }
    return out;
}

std::vector<double> rho_power_iteration(const TowerGraph& graph, const PartitionMap& map, const RhoOptions& opts,
                                        double* residual)
{
    Components comps = closed_components(graph);
    if (comps.closed.empty()) throw LiftError("no closed terminal component on the retained tower");
    auto s_inv = inverse_jacobians(graph, map);
    auto mu_bar = doubles(ref_measure(graph, map));
    Ops<double> ops{map};
    auto weights = absorption(graph, ops, comps, mu_bar);

    std::vector<double> rho(graph.size(), 0.0);
    double worst = 0;
    for (std::size_t c = 0; c < comps.closed.size(); ++c) {
        const auto& comp = comps.closed[c];
        std::vector<double> r(graph.size(), 0.0);
        for (LevelId u : comp) r[u - 1] = 1.0;
        double res = 0;
        for (std::size_t it = 0; it < opts.max_iterations; ++it) {
            auto w = apply_w(graph, r, s_inv);
            // Damping (I + W)/2 keeps the fixed point and removes periodic oscillation.
            double norm = 0;
            for (LevelId u : comp) {
                r[u - 1] = 0.5 * (r[u - 1] + w[u - 1]);
                norm += r[u - 1] * mu_bar[u - 1];
            }
            for (LevelId u : comp) r[u - 1] /= norm;
            res = fixed_point_residual(graph, r, s_inv);
            if (res <= opts.residual) break;
        }
        if (res > opts.residual * 10)
            throw LiftError("power iteration did not converge: residual " + std::to_string(res));
        worst = std::max(worst, res);
        for (LevelId u : comp) rho[u - 1] += weights[c] * r[u - 1];
    }
    double total = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) total += rho[i] * mu_bar[i];
    for (auto& r : rho) r /= total;
    if (residual) *residual = fixed_point_residual(graph, rho, s_inv);
    (void)worst;
    return rho;
}

LevelMeasure rho_limit(const TowerGraph& graph, const PartitionMap& map, const RhoOptions& opts)
{
    LevelMeasure out;
    out.convention = map.convention();
    out.mu_bar = ref_measure(graph, map);
    const NumericMode& mode = map.mode();
    auto s_inv = inverse_jacobians(graph, map);
    Components comps = closed_components(graph);

    if (comps.closed.empty()) {
        // Truncated tower without a closed component: Cesaro estimate with tail accounting.
        CesaroResult c = cesaro_lift(graph, map, opts.n_check);
        double tail = 1.0 - c.retained_mass;
        if (tail > opts.tol)
            throw LiftError("mass escapes the retained tower: tail " + std::to_string(tail) + " exceeds tol");
        out.provenance = Provenance::cesaro;
        out.cesaro_n = c.n;
        for (double r : c.rho_n) out.rho.push_back(Scalar::from_float(r, mode.eps));
        out.notes.push_back("cesaro estimate on a truncated tower (lower bound)");
    } else if (mode.exact()) {
        Ops<Scalar> ops{map};
        auto weights = absorption(graph, ops, comps, out.mu_bar);
        out.rho.assign(graph.size(), mode.lift(0));
        Scalar total = mode.lift(0);
        for (const Scalar& w : weights) total += w;
        for (std::size_t c = 0; c < comps.closed.size(); ++c) {
            auto r = component_density(graph, ops, comps.closed[c], out.mu_bar);
            for (std::size_t i = 0; i < comps.closed[c].size(); ++i)
                out.rho[comps.closed[c][i] - 1] = weights[c] / total * r[i];
        }
        if (!(total == mode.lift(1))) out.notes.push_back("absorbed base mass " + total.to_string() + " renormalized");
        out.provenance = Provenance::eigen;
    } else {
        double res = 0;
        auto rho = rho_power_iteration(graph, map, opts, &res);
        for (double r : rho) out.rho.push_back(Scalar::from_float(r, mode.eps));
        out.provenance = Provenance::eigen;
    }

    out.residual = fixed_point_residual(graph, out.rho_double(), s_inv);
    for (std::size_t i = 0; i < graph.size(); ++i) out.mu_hat.push_back(out.rho[i] * out.mu_bar[i]);
    out.transitions = markov_transitions(graph, map, out.mu_bar);

    if (out.provenance == Provenance::eigen && opts.n_check > 0) {
        CesaroResult c = cesaro_lift(graph, map, opts.n_check);
        auto rho = out.rho_double();
        double dev = 0;
        for (std::size_t i = 0; i < rho.size(); ++i) dev = std::max(dev, std::fabs(c.rho_n[i] - rho[i]));
        out.cesaro_deviation = dev;
        out.cesaro_check_n = opts.n_check;
        if (dev > opts.tol)
            out.notes.push_back("cesaro cross-check at n=" + std::to_string(opts.n_check) + " deviates by " +
                                std::to_string(dev));
    }
    return out;
}

// ---------------------------------------------------------------- Parry

ParryMeasure parry_measure(const TowerGraph& graph, std::optional<std::vector<LevelId>> component)
{
    std::vector<LevelId> comp;
    if (component) {
        comp = *component;
        std::sort(comp.begin(), comp.end());
    } else {
        SccDecomposition scc = scc_decompose(graph);
        if (scc.terminal.size() != 1) throw LiftError("Parry measure needs a unique terminal component");
        comp = scc.components[scc.terminal.front()];
    }
    std::size_t period = component_period(graph, comp);
    if (period != 1)
        throw LiftError("component is not primitive: period " + std::to_string(period));

    const std::size_t m = comp.size();
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (LevelId v : graph.successors(comp[i])) {
            auto it = std::lower_bound(comp.begin(), comp.end(), v);
            if (it != comp.end() && *it == v) a[i][static_cast<std::size_t>(it - comp.begin())] = 1.0;
        }

    auto power = [&](bool transpose, double& lambda, double& res) {
        std::vector<double> x(m, 1.0 / static_cast<double>(m));
        for (std::size_t it = 0; it < 1000000; ++it) {
            std::vector<double> y(m, 0.0);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) y[i] += (transpose ? a[j][i] : a[i][j]) * x[j];
            double norm = std::accumulate(y.begin(), y.end(), 0.0);
            lambda = norm; // x has unit l1 norm
            res = 0;
            for (std::size_t i = 0; i < m; ++i) res = std::max(res, std::fabs(y[i] - lambda * x[i]));
            for (std::size_t i = 0; i < m; ++i) x[i] = y[i] / norm;
            if (res <= 1e-13) break;
        }
        return x;
    };

    ParryMeasure out;
    out.levels = comp;
    double lam_r = 0, lam_l = 0, res_r = 0, res_l = 0;
    out.v_bar = power(false, lam_r, res_r);
    out.w_bar = power(true, lam_l, res_l);
    out.lambda = lam_r;
    out.residual = std::max(res_r, res_l);
    double dot = 0;
    for (std::size_t i = 0; i < m; ++i) dot += out.v_bar[i] * out.w_bar[i];
    for (auto& w : out.w_bar) w /= dot;
    out.mu_hat.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.mu_hat[i] = out.v_bar[i] * out.w_bar[i];
    out.p.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            out.p[i][j] = a[i][j] * out.v_bar[j] / (out.lambda * out.v_bar[i]);
    return out;
}

// ---------------------------------------------------------------- entropy

Entropy chain_entropy(const std::vector<double>& stationary, const std::vector<std::vector<double>>& p)
{
    double h = 0;
    for (std::size_t i = 0; i < stationary.size(); ++i) {
        if (stationary[i] == 0) continue;
        double row = 0;
        for (double q : p[i])
            if (q > 0) row -= q * std::log(q);
        h += stationary[i] * row;
    }
    return {h, h / std::log(2.0)};
}

double stationarity_defect(const LevelMeasure& m)
{
    auto mu_hat = m.mu_hat_double();
    std::vector<double> pushed(mu_hat.size(), 0.0);
    for (const auto& t : m.transitions) pushed[t.to - 1] += mu_hat[t.from - 1] * t.p.to_double();
    double d = 0;
    for (std::size_t i = 0; i < mu_hat.size(); ++i) d = std::max(d, std::fabs(pushed[i] - mu_hat[i]));
    return d;
}

Entropy entropy(const LevelMeasure& m, double stationarity_tol)
{
    double defect = stationarity_defect(m);
    if (defect > stationarity_tol)
        throw LiftError("entropy requires a stationary chain; defect " + std::to_string(defect));
    auto mu_hat = m.mu_hat_double();
    double h = 0;
    for (const auto& t : m.transitions) {
        double p = t.p.to_double();
        if (p > 0) h -= mu_hat[t.from - 1] * p * std::log(p);
    }
    return {h, h / std::log(2.0)};
}

// ---------------------------------------------------------------- mass profile

MassProfile lift_mass_profile(const TowerGraph& graph, const PartitionMap& map, const std::vector<std::size_t>& ns,
                              std::size_t depth_cap)
{
    std::size_t built = 0;
    for (const auto& l : graph.levels()) built = std::max(built, l.depth);
    if (!graph.finite() && depth_cap >= built)
        throw LiftError("depth cap " + std::to_string(depth_cap) + " exceeds the built depth " + std::to_string(built));
    MassProfile out;
    out.depth_cap = depth_cap;
    if (ns.empty()) return out;
    std::size_t n_max = *std::max_element(ns.begin(), ns.end());

    auto s_inv = inverse_jacobians(graph, map);
    auto mu_bar = doubles(ref_measure(graph, map));
    double base_mass = 0;
    for (LevelId u = 1; u <= graph.base_size(); ++u) base_mass += mu_bar[u - 1];
    std::vector<double> w(graph.size(), 0.0);
    for (LevelId u = 1; u <= graph.base_size(); ++u) w[u - 1] = 1.0;

    std::vector<double> running(n_max + 1, 0.0); // running[n] = sum_{k<n} retained_k
    for (std::size_t k = 0; k < n_max; ++k) {
        double retained = 0;
        for (const auto& l : graph.levels())
            if (l.depth <= depth_cap) retained += w[l.id - 1] * mu_bar[l.id - 1];
        running[k + 1] = running[k] + retained / base_mass;
        if (k + 1 < n_max) w = apply_w(graph, w, s_inv);
    }
    for (std::size_t n : ns) {
        if (n == 0) throw LiftError("mass profile needs n >= 1");
        out.n.push_back(n);
        out.mass.push_back(running[n] / static_cast<double>(n));
    }
    return out;
}

RationalPoly adjacency_charpoly(const TowerGraph& graph, const std::vector<LevelId>& levels)
{
    const std::size_t n = levels.size();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (graph.has_edge(levels[i], levels[j])) a[i][j] = 1;
    // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k.
    RationalPoly c(n + 1, 0);
    c[n] = 1;
    std::vector<std::vector<Rational>> mk(n, std::vector<Rational>(n, 0));
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<std::vector<Rational>> next(n, std::vector<Rational>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Rational s = 0;
                for (std::size_t l = 0; l < n; ++l) s += a[i][l] * mk[l][j];
                next[i][j] = s;
            }
        for (std::size_t i = 0; i < n; ++i) next[i][i] += c[n - k + 1];
        Rational tr = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l) tr += a[i][l] * next[l][i];
        c[n - k] = -tr / static_cast<long>(k);
        mk = std::move(next);
    }
    return c;
}

} // namespace hofbauer
