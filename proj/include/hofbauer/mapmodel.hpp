#pragma once

#include "hofbauer/numerics.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hofbauer {

/// Malformed map geometry (gap, overlap, out-of-range branch image, bad preset).
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Interval {
    Scalar lo, hi;

    Scalar length() const { return hi - lo; }
    bool contains(const Scalar& x) const { return lo <= x && x <= hi; }
};

using Point = std::vector<Scalar>;

/// Axis-aligned closed box in dimension 1 or 2.
class Cell {
public:
    Cell() = default;
    explicit Cell(std::vector<Interval> axes);
    static Cell interval(Scalar lo, Scalar hi) { return Cell({Interval{std::move(lo), std::move(hi)}}); }
    static Cell box(Scalar x0, Scalar x1, Scalar y0, Scalar y1)
    {
        return Cell({Interval{std::move(x0), std::move(x1)}, Interval{std::move(y0), std::move(y1)}});
    }

    std::size_t dim() const { return axes_.size(); }
    const Interval& axis(std::size_t i) const { return axes_.at(i); }
    const std::vector<Interval>& axes() const { return axes_; }

    Scalar volume() const;
    bool has_positive_volume() const;
    bool contains(const Point& p) const;
    /// c is a subset of this box (closed containment).
    bool contains(const Cell& c) const;
    /// Intersection box; may be degenerate or empty (then has_positive_volume() is false).
    std::optional<Cell> intersect(const Cell& other) const;
    bool overlaps(const Cell& other) const;

    bool operator==(const Cell& other) const;
    /// Canonical identity key in exact mode.
    std::string key() const;
    std::string to_string() const;
    std::vector<double> to_doubles() const;

private:
    std::vector<Interval> axes_;
};

/// x_i -> scale_i * x_i + offset_i on each axis.
struct AffineAxis {
    Scalar scale, offset;
};

class Branch {
public:
    Branch() = default;
    Branch(std::size_t index, Cell domain, std::vector<AffineAxis> action);

    std::size_t index() const { return index_; }
    const Cell& domain() const { return domain_; }
    const std::vector<AffineAxis>& action() const { return action_; }
    /// Jacobian s_j = product of |scale_i|.
    const Scalar& jacobian() const { return jacobian_; }
    const Scalar& inverse_jacobian() const { return inverse_jacobian_; }

    Point apply(const Point& x) const;
    Point invert(const Point& y) const;
    /// Image of a box (orientation-reversing axes swap endpoint roles).
    Cell image(const Cell& c) const;
    Cell preimage(const Cell& c) const;

private:
    std::size_t index_ = 0;
    Cell domain_;
    std::vector<AffineAxis> action_;
    std::vector<Scalar> inverse_scale_;
    Scalar jacobian_;
    Scalar inverse_jacobian_;
};

enum class Convention { normalized, raw };
std::string to_string(Convention c);
Convention parse_convention(const std::string& s);

/// The system (X, Z, T, mu) with affine signed-diagonal branches.
/// Cells and branches are indexed 1..N.
class PartitionMap {
public:
    PartitionMap(std::string name, Cell ambient, std::vector<Cell> cells, std::vector<std::vector<AffineAxis>> actions,
                 NumericMode mode, Convention convention = Convention::normalized);

    const std::string& name() const { return name_; }
    std::size_t dim() const { return ambient_.dim(); }
    std::size_t size() const { return branches_.size(); }
    const Cell& ambient() const { return ambient_; }
    const Cell& cell(std::size_t j) const { return branches_.at(j - 1).domain(); }
    const Branch& branch(std::size_t j) const { return branches_.at(j - 1); }
    const std::vector<Branch>& branches() const { return branches_; }
    const NumericMode& mode() const { return mode_; }
    Convention convention() const { return convention_; }
    PartitionMap with_convention(Convention c) const;

    /// mu of a box under the active convention.
    Scalar measure(const Cell& c) const;
    Scalar ambient_volume() const { return ambient_.volume(); }

    /// Lowest cell index j with x in Z_j, or nullopt if x lies outside X.
    std::optional<std::size_t> locate(const Point& x) const;

    /// Optional fields carried by presets for reporting.
    std::optional<Scalar> beta;
    bool constant_slope_1d = false;

private:
    std::string name_;
    Cell ambient_;
    std::vector<Branch> branches_;
    NumericMode mode_;
    Convention convention_;
};

struct ApplyResult {
    Point image;
    std::size_t branch; // 1-based
};

/// T(x) together with the index of the cell used (lowest index on shared boundaries).
ApplyResult apply(const PartitionMap& map, const Point& x);
/// Exact image of a sub-box of Z_j. Throws GeometryError if c is not inside Z_j.
Cell branch_image(const PartitionMap& map, std::size_t j, const Cell& c);
/// Preimage inside Z_j of a sub-box of T(Z_j). Throws GeometryError otherwise.
Cell branch_preimage(const PartitionMap& map, std::size_t j, const Cell& c);

enum class Verdict { pass, fail, automatic, not_verified };
std::string to_string(Verdict v);

struct ConditionCheck {
    std::string condition; // "c1", "c2", ...
    Verdict verdict = Verdict::not_verified;
    std::string detail;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;
    std::vector<Scalar> jacobians;

    bool ok() const;
    const ConditionCheck& get(const std::string& condition) const;
};

struct ValidateOptions {
    /// Iterates used when chasing boundary lines for (c6) in dimension 2.
    std::size_t boundary_iterates = 32;
    /// Per-axis cap on boundary coordinates; past it the grid counts as still growing.
    std::size_t max_boundary_points = 512;
};

/// Checks (c1)-(c6) as far as decidable. Throws GeometryError naming the
/// offending cells on positive-volume gaps or overlaps.
ValidationReport validate(const PartitionMap& map, const ValidateOptions& opts = {});

struct PresetParams {
    /// Required by beta presets; a field generator (exact) or a float (float mode).
    std::optional<Scalar> beta;
    /// Alphabet size for full_shift.
    std::size_t symbols = 2;
    Convention convention = Convention::normalized;
};

std::vector<std::string> preset_names();
PartitionMap preset(const std::string& name, const PresetParams& params = {});

} // namespace hofbauer
