#include "hofbauer/mapmodel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace hofbauer {

// ---------------------------------------------------------------- Cell

Cell::Cell(std::vector<Interval> axes) : axes_(std::move(axes))
{
    if (axes_.empty() || axes_.size() > 2) throw GeometryError("cells must have dimension 1 or 2");
}

Scalar Cell::volume() const
{
    Scalar v(1);
    for (const auto& a : axes_) v *= a.length();
    return v;
}

bool Cell::has_positive_volume() const
{
    return std::all_of(axes_.begin(), axes_.end(), [](const Interval& a) { return a.lo < a.hi; });
}

bool Cell::contains(const Point& p) const
{
    if (p.size() != axes_.size()) return false;
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (!axes_[i].contains(p[i])) return false;
    return true;
}

bool Cell::contains(const Cell& c) const
{
    if (c.dim() != dim()) return false;
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (c.axes_[i].lo < axes_[i].lo || axes_[i].hi < c.axes_[i].hi) return false;
    return true;
}

std::optional<Cell> Cell::intersect(const Cell& other) const
{
    if (other.dim() != dim()) throw GeometryError("dimension mismatch in cell intersection");
    std::vector<Interval> out;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        Scalar lo = max(axes_[i].lo, other.axes_[i].lo);
        Scalar hi = min(axes_[i].hi, other.axes_[i].hi);
        if (hi < lo) return std::nullopt;
        out.push_back({lo, hi});
    }
    return Cell(std::move(out));
}

bool Cell::overlaps(const Cell& other) const
{
    auto c = intersect(other);
    return c && c->has_positive_volume();
}

bool Cell::operator==(const Cell& other) const
{
    if (other.dim() != dim()) return false;
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (!(axes_[i].lo == other.axes_[i].lo && axes_[i].hi == other.axes_[i].hi)) return false;
    return true;
}

std::string Cell::key() const
{
    std::string k;
    for (const auto& a : axes_) k += a.lo.key() + ";" + a.hi.key() + "|";
    return k;
}

std::string Cell::to_string() const
{
    std::string s;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (i) s += " x ";
        s += "[" + axes_[i].lo.to_string() + ", " + axes_[i].hi.to_string() + "]";
    }
    return s;
}

std::vector<double> Cell::to_doubles() const
{
    std::vector<double> out;
    for (const auto& a : axes_) {
        out.push_back(a.lo.to_double());
        out.push_back(a.hi.to_double());
    }
    return out;
}

// ---------------------------------------------------------------- Branch

Branch::Branch(std::size_t index, Cell domain, std::vector<AffineAxis> action)
    : index_(index), domain_(std::move(domain)), action_(std::move(action)), jacobian_(1)
{
    if (action_.size() != domain_.dim()) throw GeometryError("branch action dimension differs from its cell");
    for (const auto& a : action_) {
        jacobian_ *= abs(a.scale);
        // A zero scale is reported by validate (c1); inversion is then undefined.
        inverse_scale_.push_back(a.scale.is_zero() ? a.scale : Scalar(1) / a.scale);
    }
    inverse_jacobian_ = jacobian_.is_zero() ? jacobian_ : Scalar(1) / jacobian_;
}

Point Branch::apply(const Point& x) const
{
    Point out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = action_[i].scale * x[i] + action_[i].offset;
    return out;
}

Point Branch::invert(const Point& y) const
{
    Point out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - action_[i].offset) * inverse_scale_[i];
    return out;
}

Cell Branch::image(const Cell& c) const
{
    std::vector<Interval> out;
    for (std::size_t i = 0; i < c.dim(); ++i) {
        Scalar a = action_[i].scale * c.axis(i).lo + action_[i].offset;
        Scalar b = action_[i].scale * c.axis(i).hi + action_[i].offset;
        if (action_[i].scale.sign() < 0) std::swap(a, b);
        out.push_back({a, b});
    }
    return Cell(std::move(out));
}

Cell Branch::preimage(const Cell& c) const
{
    std::vector<Interval> out;
    for (std::size_t i = 0; i < c.dim(); ++i) {
        Scalar a = (c.axis(i).lo - action_[i].offset) / action_[i].scale;
        Scalar b = (c.axis(i).hi - action_[i].offset) / action_[i].scale;
        if (action_[i].scale.sign() < 0) std::swap(a, b);
        out.push_back({a, b});
    }
    return Cell(std::move(out));
}

// ---------------------------------------------------------------- PartitionMap

std::string to_string(Convention c) { return c == Convention::normalized ? "normalized" : "raw"; }

Convention parse_convention(const std::string& s)
{
    if (s == "normalized") return Convention::normalized;
    if (s == "raw") return Convention::raw;
    throw GeometryError("unknown measure convention: " + s);
}

PartitionMap::PartitionMap(std::string name, Cell ambient, std::vector<Cell> cells,
                           std::vector<std::vector<AffineAxis>> actions, NumericMode mode, Convention convention)
    : name_(std::move(name)), ambient_(std::move(ambient)), mode_(std::move(mode)), convention_(convention)
{
    if (cells.empty()) throw GeometryError("partition has no cells");
    if (cells.size() != actions.size()) throw GeometryError("cell and branch counts differ");
    for (std::size_t j = 0; j < cells.size(); ++j) {
        if (cells[j].dim() != ambient_.dim()) throw GeometryError("cell Z" + std::to_string(j + 1) + " has wrong dimension");
        branches_.emplace_back(j + 1, std::move(cells[j]), std::move(actions[j]));
    }
}

PartitionMap PartitionMap::with_convention(Convention c) const
{
    PartitionMap copy = *this;
    copy.convention_ = c;
    return copy;
}

Scalar PartitionMap::measure(const Cell& c) const
{
    if (convention_ == Convention::raw) return c.volume();
    return c.volume() / ambient_.volume();
}

std::optional<std::size_t> PartitionMap::locate(const Point& x) const
{
    for (const auto& b : branches_)
        if (b.domain().contains(x)) return b.index();
    return std::nullopt;
}

ApplyResult apply(const PartitionMap& map, const Point& x)
{
    auto j = map.locate(x);
    if (!j) throw GeometryError("point outside the ambient space");
    return {map.branch(*j).apply(x), *j};
}

Cell branch_image(const PartitionMap& map, std::size_t j, const Cell& c)
{
    if (j < 1 || j > map.size()) throw GeometryError("branch index out of range");
    if (!map.cell(j).contains(c)) throw GeometryError("cell " + c.to_string() + " is not inside Z" + std::to_string(j));
    return map.branch(j).image(c);
}

Cell branch_preimage(const PartitionMap& map, std::size_t j, const Cell& c)
{
    if (j < 1 || j > map.size()) throw GeometryError("branch index out of range");
    const Branch& b = map.branch(j);
    if (!b.image(b.domain()).contains(c))
        throw GeometryError("cell " + c.to_string() + " is outside the image of Z" + std::to_string(j));
    return b.preimage(c);
}

// ---------------------------------------------------------------- validation

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::automatic: return "automatic";
    case Verdict::not_verified: return "not verified";
    }
    return "?";
}

bool ValidationReport::ok() const
{
    return std::none_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.verdict == Verdict::fail; });
}

const ConditionCheck& ValidationReport::get(const std::string& condition) const
{
    for (const auto& c : checks)
        if (c.condition == condition) return c;
    throw std::out_of_range("no check named " + condition);
}

namespace {

std::string zname(std::size_t j) { return "Z" + std::to_string(j); }

// Closure of the boundary-coordinate grid under the branches, per axis.
bool boundary_grid_closes(const PartitionMap& map, std::size_t iterates, std::size_t max_points, std::string& detail)
{
    const std::size_t q = map.dim();
    std::vector<std::vector<Scalar>> grid(q);
    auto insert = [](std::vector<Scalar>& g, const Scalar& v) {
        for (const auto& x : g)
            if (x == v) return false;
        g.push_back(v);
        return true;
    };
    for (std::size_t i = 0; i < q; ++i) {
        insert(grid[i], map.ambient().axis(i).lo);
        insert(grid[i], map.ambient().axis(i).hi);
        for (const auto& b : map.branches()) {
            insert(grid[i], b.domain().axis(i).lo);
            insert(grid[i], b.domain().axis(i).hi);
        }
    }
    for (std::size_t it = 0; it < iterates; ++it) {
        bool grew = false;
        for (std::size_t i = 0; i < q; ++i) {
            std::vector<Scalar> snapshot = grid[i];
            for (const auto& b : map.branches()) {
                const Interval& dom = b.domain().axis(i);
                for (const auto& v : snapshot) {
                    if (v < dom.lo || dom.hi < v) continue;
                    grew |= insert(grid[i], b.action()[i].scale * v + b.action()[i].offset);
                }
            }
            if (grid[i].size() > max_points) {
                detail = "boundary grid exceeded " + std::to_string(max_points) + " coordinates on axis " +
                         std::to_string(i + 1) + " after " + std::to_string(it + 1) + " iterates";
                return false;
            }
        }
        if (!grew) {
            detail = "boundary lines close up after " + std::to_string(it) + " iterates";
            return true;
        }
    }
    detail = "boundary grid still growing after " + std::to_string(iterates) + " iterates";
    return false;
}

} // namespace

ValidationReport validate(const PartitionMap& map, const ValidateOptions& opts)
{
    ValidationReport report;
    const std::size_t n = map.size();

    for (std::size_t j = 1; j <= n; ++j) {
        const Cell& c = map.cell(j);
        if (!c.has_positive_volume()) throw GeometryError("cell " + zname(j) + " has zero volume");
        if (!map.ambient().contains(c)) throw GeometryError("cell " + zname(j) + " extends outside X");
    }
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j)
            if (map.cell(i).overlaps(map.cell(j)))
                throw GeometryError("overlap: cells " + zname(i) + " and " + zname(j) + " share positive volume");
    Scalar covered(0);
    for (std::size_t j = 1; j <= n; ++j) covered += map.cell(j).volume();
    if (!(covered == map.ambient_volume()))
        throw GeometryError("gap: cells cover volume " + covered.to_string() + " of " + map.ambient_volume().to_string());
    report.checks.push_back({"cover", Verdict::pass, "cells tile X up to volume zero"});

    bool injective = true, expanding_jac = true, all_expanding = true, images_inside = true;
    std::string c1_detail, c4_detail, img_detail;
    for (const auto& b : map.branches()) {
        report.jacobians.push_back(b.jacobian());
        for (const auto& a : b.action()) {
            if (a.scale.is_zero()) {
                injective = false;
                c1_detail = "branch " + std::to_string(b.index()) + " has a zero scale";
            }
            if (!(abs(a.scale) > Scalar(1))) all_expanding = false;
        }
        if (b.jacobian() < Scalar(1)) {
            expanding_jac = false;
            c4_detail = "s_" + std::to_string(b.index()) + " = " + b.jacobian().to_string() + " < 1";
        }
        if (injective && !map.ambient().contains(b.image(b.domain()))) {
            images_inside = false;
            img_detail = "image of " + zname(b.index()) + " leaves X";
        }
    }
    report.checks.push_back({"c1", injective ? Verdict::pass : Verdict::fail,
                             injective ? "every branch scale is nonzero" : c1_detail});
    report.checks.push_back({"image", images_inside ? Verdict::pass : Verdict::fail,
                             images_inside ? "every branch image is a box inside X" : img_detail});
    report.checks.push_back({"c2", injective && expanding_jac ? Verdict::automatic : Verdict::fail,
                             "affine branches with s_j >= 1 are nonsingular"});
    report.checks.push_back({"c3", all_expanding ? Verdict::pass : Verdict::not_verified,
                             all_expanding ? "generates: yes (every |scale| > 1)" : "some axis is not expanded"});
    std::string jac;
    for (const auto& s : report.jacobians) jac += (jac.empty() ? "" : ", ") + s.to_string();
    report.checks.push_back({"c4", expanding_jac ? Verdict::pass : Verdict::fail,
                             expanding_jac ? "s = (" + jac + ")" : c4_detail});
    report.checks.push_back({"c5", Verdict::not_verified, "ergodicity is read off the tower's terminal components"});
    if (map.dim() == 1) {
        report.checks.push_back({"c6", Verdict::automatic, "finitely many boundary points in dimension 1"});
    } else {
        std::string detail;
        bool closes = injective && boundary_grid_closes(map, opts.boundary_iterates, opts.max_boundary_points, detail);
        report.checks.push_back({"c6", closes ? Verdict::pass : Verdict::not_verified, detail});
    }
    return report;
}

// ---------------------------------------------------------------- presets

std::vector<std::string> preset_names()
{
    return {"doubling", "baker_check", "beta_pos", "beta_neg", "random_beta_skew", "random_beta_K",
            "skew_nonliftable", "full_shift"};
}

namespace {

NumericMode mode_for(const Scalar& beta)
{
    if (beta.is_float()) return NumericMode::floating(beta.float_value().eps);
    if (auto f = beta.field()) return NumericMode::exact_field(f);
    return NumericMode::exact_rational();
}

Scalar require_beta(const PresetParams& p, const std::string& name)
{
    if (!p.beta) throw GeometryError("preset " + name + " requires beta");
    const Scalar& b = *p.beta;
    if (!(Scalar(1) < b && b < Scalar(2))) throw GeometryError("beta must lie in (1, 2) for preset " + name);
    return b;
}

AffineAxis ax(Scalar scale, Scalar offset) { return {std::move(scale), std::move(offset)}; }

PartitionMap expanding_1d(const std::string& name, std::size_t d, Convention conv)
{
    if (d < 2) throw GeometryError("full shift needs at least 2 symbols");
    std::vector<Cell> cells;
    std::vector<std::vector<AffineAxis>> actions;
    for (std::size_t k = 0; k < d; ++k) {
        cells.push_back(Cell::interval(Scalar(long(k), long(d)), Scalar(long(k + 1), long(d))));
        actions.push_back({ax(Scalar(long(d)), Scalar(-long(k)))});
    }
    PartitionMap m(name, Cell::interval(0, 1), std::move(cells), std::move(actions), NumericMode::exact_rational(), conv);
    m.constant_slope_1d = true;
    return m;
}

} // namespace

PartitionMap preset(const std::string& name, const PresetParams& params)
{
    const Convention conv = params.convention;
    if (name == "doubling" || name == "baker_check") return expanding_1d(name, 2, conv);
    if (name == "full_shift") return expanding_1d(name, params.symbols, conv);

    if (name == "skew_nonliftable") {
        Scalar half(1, 2), two_thirds(2, 3);
        std::vector<Cell> cells{Cell::box(0, half, 0, 1), Cell::box(half, 1, 0, two_thirds),
                                Cell::box(half, 1, two_thirds, 1)};
        std::vector<std::vector<AffineAxis>> actions{{ax(2, 0), ax(Scalar(3, 5), 0)},
                                                     {ax(2, -1), ax(Scalar(3, 2), 0)},
                                                     {ax(2, -1), ax(Scalar(3, 2), -1)}};
        return PartitionMap(name, Cell::box(0, 1, 0, 1), std::move(cells), std::move(actions),
                            NumericMode::exact_rational(), conv);
    }

    if (name == "beta_pos" || name == "beta_neg") {
        Scalar b = require_beta(params, name);
        NumericMode mode = mode_for(b);
        Scalar inv = mode.lift(1) / b;
        Scalar zero = mode.lift(0), one = mode.lift(1);
        std::vector<Cell> cells{Cell::interval(zero, inv), Cell::interval(inv, one)};
        std::vector<std::vector<AffineAxis>> actions;
        if (name == "beta_pos") actions = {{ax(b, zero)}, {ax(b, -one)}};
        else actions = {{ax(-b, one)}, {ax(-b, mode.lift(2))}};
        PartitionMap m(name, Cell::interval(zero, one), std::move(cells), std::move(actions), mode, conv);
        m.beta = b;
        m.constant_slope_1d = true;
        return m;
    }

    if (name == "random_beta_skew") {
        Scalar b = require_beta(params, name);
        NumericMode mode = mode_for(b);
        Scalar zero = mode.lift(0), one = mode.lift(1), half = mode.lift(1, 2);
        Scalar y1 = one / b, y2 = one / (b * (b - one)), y3 = one / (b - one);
        std::vector<Cell> cells;
        std::vector<std::vector<AffineAxis>> actions;
        const Scalar xs[3] = {zero, half, one};
        const Scalar ys[4] = {zero, y1, y2, y3};
        for (int xi = 0; xi < 2; ++xi) {
            for (int yi = 0; yi < 3; ++yi) {
                cells.push_back(Cell::box(xs[xi], xs[xi + 1], ys[yi], ys[yi + 1]));
                // Z1, Z2, Z4 use beta*y; Z3, Z5, Z6 use beta*y - 1.
                bool lower = (xi == 0 && yi < 2) || (xi == 1 && yi == 0);
                actions.push_back({ax(mode.lift(2), xi == 0 ? zero : -one), ax(b, lower ? zero : -one)});
            }
        }
        PartitionMap m(name, Cell::box(zero, one, zero, y3), std::move(cells), std::move(actions), mode, conv);
        m.beta = b;
        return m;
    }

    if (name == "random_beta_K") {
        Scalar b = require_beta(params, name);
        NumericMode mode = mode_for(b);
        Scalar zero = mode.lift(0), one = mode.lift(1), half = mode.lift(1, 2), two = mode.lift(2);
        if (!(b * b == b + one)) throw GeometryError("random_beta_K is defined for the golden ratio only");
        Scalar inv = one / b;
        // Coordinates: (coin in [0,1], point in [0, beta]).
        std::vector<Cell> cells{Cell::box(zero, one, zero, inv), Cell::box(zero, half, inv, one),
                                Cell::box(half, one, inv, one), Cell::box(zero, one, one, b)};
        std::vector<std::vector<AffineAxis>> actions{{ax(one, zero), ax(b, zero)},
                                                     {ax(two, zero), ax(b, zero)},
                                                     {ax(two, -one), ax(b, -one)},
                                                     {ax(one, zero), ax(b, -one)}};
        PartitionMap m(name, Cell::box(zero, one, zero, b), std::move(cells), std::move(actions), mode, conv);
        m.beta = b;
        return m;
    }
    throw GeometryError("unknown preset: " + name);
}

} // namespace hofbauer
