#include "hofbauer/natext.hpp"

#include <algorithm>
#include <sstream>

namespace hofbauer {

const Strip& Rug::strip_from(LevelId t) const
{
    for (const auto& s : strips)
        if (s.source == t) return s;
    throw NatExtError("level " + std::to_string(t) + " has no strip in rug " + std::to_string(level));
}

RugSet::RugSet(const TowerGraph& graph, const PartitionMap& map, LevelMeasure measure)
    : graph_(&graph), map_(&map), measure_(std::move(measure))
{
    if (measure_.rho.size() != graph.size()) throw NatExtError("measure does not match the tower");
    const NumericMode& mode = map.mode();
    for (const auto& level : graph.levels()) {
        Rug rug{level.id, level.cell, measure_.rho[level.id - 1], {}};
        std::vector<LevelId> sources = graph.predecessors(level.id);
        std::sort(sources.begin(), sources.end());
        sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
        Scalar offset = mode.lift(0);
        for (LevelId t : sources) {
            std::size_t j = graph.level(t).partition_index;
            Scalar thickness = measure_.rho[t - 1] * map.branch(j).inverse_jacobian();
            rug.strips.push_back({t, j, offset, thickness});
            offset += thickness;
        }
        if (!(offset == rug.height))
            throw NatExtError("strips of rug " + std::to_string(level.id) + " sum to " + offset.to_string() +
                              ", height is " + rug.height.to_string());
        rugs_.push_back(std::move(rug));
    }
}

Scalar RugSet::total_mass() const
{
    Scalar total = map_->mode().lift(0);
    for (std::size_t i = 0; i < rugs_.size(); ++i) total += measure_.mu_bar[i] * rugs_[i].height;
    return total;
}

RugSet build_rugs(const TowerGraph& graph, const PartitionMap& map, const LevelMeasure& measure)
{
    if (!graph.finite()) {
        auto support = measure.support();
        for (LevelId u : support)
            for (LevelId t : graph.predecessors(u))
                if (graph.truncated_levels().count(t))
                    throw NatExtError("rho-support is not closed on the retained tower");
        if (support.empty()) throw NatExtError("empty rho-support on a truncated tower");
    }
    return RugSet(graph, map, measure);
}

bool operator==(const NatExtPoint& a, const NatExtPoint& b)
{
    if (a.level != b.level || a.x.size() != b.x.size() || !(a.y == b.y)) return false;
    for (std::size_t i = 0; i < a.x.size(); ++i)
        if (!(a.x[i] == b.x[i])) return false;
    return true;
}

std::string to_string(const NatExtPoint& z)
{
    std::ostringstream os;
    os << "(u=" << z.level << ", x=(";
    for (std::size_t i = 0; i < z.x.size(); ++i) os << (i ? ", " : "") << z.x[i].to_string();
    os << "), y=" << z.y.to_string() << ")";
    return os.str();
}

void check_inside(const RugSet& rugs, const NatExtPoint& z)
{
    if (z.level < 1 || z.level > rugs.rugs().size()) throw NatExtError("no rug " + std::to_string(z.level));
    const Rug& rug = rugs.rug(z.level);
    if (!rug.base.contains(z.x) || z.y.sign() < 0 || z.y > rug.height)
        throw NatExtError("point outside its rug: " + to_string(z));
}

StepResult step_forward(const RugSet& rugs, const NatExtPoint& z)
{
    check_inside(rugs, z);
    const TowerGraph& graph = rugs.graph();
    const PartitionMap& map = rugs.map();
    const std::size_t j = graph.level(z.level).partition_index;
    const Branch& branch = map.branch(j);

    StepResult out;
    auto located = map.locate(z.x);
    out.boundary = !located || *located != j;

    Point image = branch.apply(z.x);
    std::optional<LevelId> target;
    for (LevelId v : graph.successors(z.level)) {
        if (!graph.level(v).cell.contains(image)) continue;
        if (!target) target = v;
        else if (graph.level(v).partition_index != graph.level(*target).partition_index) out.boundary = true;
    }
    if (!target) {
        if (graph.truncated_levels().count(z.level))
            throw NatExtError("orbit leaves the retained tower at " + to_string(z));
        throw NatExtError("image of " + to_string(z) + " lies in no successor level");
    }
    const Strip& strip = rugs.rug(*target).strip_from(z.level);
    out.point = {*target, std::move(image), z.y * branch.inverse_jacobian() + strip.offset};
    return out;
}

StepResult step_backward(const RugSet& rugs, const NatExtPoint& z)
{
    check_inside(rugs, z);
    const Rug& rug = rugs.rug(z.level);
    StepResult out;
    const Strip* chosen = nullptr;
    for (const auto& s : rug.strips) {
        if (s.thickness.is_zero()) continue;
        Scalar top = s.offset + s.thickness;
        if (z.y < s.offset) continue;
        if (z.y < top) {
            chosen = &s;
            // A point on the floor of a strip that has another strip below is a tie.
            if (z.y == s.offset && s.offset.sign() > 0) out.boundary = true;
            break;
        }
        if (z.y == top) {
            // Lower strip wins on a shared horizontal edge, and the top edge of the rug belongs to the last strip.
            chosen = &s;
            out.boundary = true;
            break;
        }
    }
    if (!chosen) throw NatExtError("fiber height of " + to_string(z) + " is in no strip");
    const Branch& branch = rugs.map().branch(chosen->branch);
    Point pre = branch.invert(z.x);
    if (!rugs.graph().level(chosen->source).cell.contains(pre))
        throw NatExtError("preimage of " + to_string(z) + " leaves level " + std::to_string(chosen->source));
    out.point = {chosen->source, std::move(pre), (z.y - chosen->offset) * branch.jacobian()};
    return out;
}

Orbit orbit(const RugSet& rugs, const NatExtPoint& z, long n)
{
    Orbit out;
    out.points.push_back(z);
    const bool forward = n >= 0;
    const long steps = forward ? n : -n;
    for (long i = 0; i < steps; ++i) {
        StepResult r = forward ? step_forward(rugs, out.points.back()) : step_backward(rugs, out.points.back());
        if (r.boundary) out.flagged.push_back(out.points.size());
        out.points.push_back(std::move(r.point));
    }
    return out;
}

NatExtPoint sample_point(const RugSet& rugs, std::mt19937_64& rng, std::uint64_t grain)
{
    const NumericMode& mode = rugs.map().mode();
    std::vector<double> weights;
    for (std::size_t i = 0; i < rugs.rugs().size(); ++i)
        weights.push_back(rugs.measure().mu_bar[i].to_double() * rugs.rugs()[i].height.to_double());
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const Rug& rug = rugs.rugs().at(pick(rng));
    std::uniform_int_distribution<std::uint64_t> frac(0, grain);
    auto fraction = [&] {
        Rational q(static_cast<unsigned long>(frac(rng)), static_cast<unsigned long>(grain));
        q.canonicalize();
        return mode.lift(q);
    };
    NatExtPoint z;
    z.level = rug.level;
    for (const auto& axis : rug.base.axes()) z.x.push_back(axis.lo + fraction() * axis.length());
    z.y = fraction() * rug.height;
    return z;
}

bool NatExtReport::ok() const
{
    return strips_exact && nu_is_one && measure_preserved && round_trip_failures == 0 &&
           semiconjugacy_failures == 0 && contraction_failures == 0;
}

NatExtReport check_natext(const RugSet& rugs, std::size_t samples, std::uint64_t seed)
{
    NatExtReport rep;
    const PartitionMap& map = rugs.map();
    const TowerGraph& graph = rugs.graph();
    const auto& mu_bar = rugs.measure().mu_bar;

    for (const Rug& rug : rugs.rugs()) {
        Scalar expected = map.mode().lift(0);
        for (const Strip& s : rug.strips) {
            if (!(s.offset == expected) || s.thickness.sign() < 0) {
                rep.strips_exact = false;
                rep.strip_witness = "rug " + std::to_string(rug.level) + " strip from " + std::to_string(s.source);
            }
            expected = s.offset + s.thickness;
        }
        if (!(expected == rug.height)) {
            rep.strips_exact = false;
            rep.strip_witness = "rug " + std::to_string(rug.level) + " strips do not reach the height";
        }
    }
    rep.nu_total = rugs.total_mass();
    rep.nu_is_one = rep.nu_total == map.mode().lift(1);

    for (const auto& e : graph.edges()) {
        const Rug& target = rugs.rug(e.to);
        Scalar image_mass = mu_bar[e.to - 1] * target.strip_from(e.from).thickness;
        Cell pre = branch_preimage(map, e.branch, graph.level(e.to).cell);
        Scalar source_mass = map.measure(pre) * rugs.rug(e.from).height;
        if (!(image_mass == source_mass)) {
            rep.measure_preserved = false;
            rep.measure_witness = "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + ": " +
                                  image_mass.to_string() + " vs " + source_mass.to_string();
        }
    }

    std::mt19937_64 rng(seed);
    auto note = [&](std::size_t& counter, const std::string& what) {
        if (counter++ == 0 && rep.witness.empty()) rep.witness = what;
    };
    for (std::size_t i = 0; i < samples; ++i) {
        NatExtPoint z = sample_point(rugs, rng);
        ++rep.samples;
        StepResult fwd = step_forward(rugs, z);
        StepResult back = step_backward(rugs, fwd.point);
        StepResult fwd_of_back = step_backward(rugs, z);
        if (fwd.boundary || back.boundary || fwd_of_back.boundary) {
            ++rep.flagged;
            continue;
        }
        StepResult again = step_forward(rugs, fwd_of_back.point);
        if (!(back.point == z) || !(again.point == z)) note(rep.round_trip_failures, "round trip at " + to_string(z));

        ApplyResult t = hofbauer::apply(map, z.x);
        bool same = t.image.size() == fwd.point.x.size();
        for (std::size_t k = 0; same && k < t.image.size(); ++k) same = t.image[k] == fwd.point.x[k];
        if (!same) note(rep.semiconjugacy_failures, "semiconjugacy at " + to_string(z));

        NatExtPoint other = z;
        other.y = z.y / map.mode().lift(2);
        StepResult fwd_other = step_forward(rugs, other);
        Scalar s = map.branch(graph.level(z.level).partition_index).jacobian();
        if (fwd_other.point.level != fwd.point.level ||
            !(abs(fwd.point.y - fwd_other.point.y) * s == abs(z.y - other.y)))
            note(rep.contraction_failures, "contraction at " + to_string(z));
    }
    return rep;
}

std::vector<Interval> projected_support(const RugSet& rugs)
{
    if (rugs.map().dim() != 1) throw NatExtError("projected support is implemented for dimension 1");
    std::vector<Interval> pieces;
    for (const Rug& rug : rugs.rugs())
        if (rug.height.sign() > 0) pieces.push_back(rug.base.axis(0));
    std::sort(pieces.begin(), pieces.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& p : pieces) {
        if (!merged.empty() && p.lo <= merged.back().hi) merged.back().hi = max(merged.back().hi, p.hi);
        else merged.push_back(p);
    }
    return merged;
}

} // namespace hofbauer
