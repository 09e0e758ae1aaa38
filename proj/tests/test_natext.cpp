#include "doctest.h"
#include "oracle.hpp"

#include "hofbauer/natext.hpp"

#include <random>

using namespace hofbauer;

namespace {

Scalar plastic_beta() { return Scalar::generator(NumberField::plastic()); }
Scalar golden_beta() { return Scalar::generator(NumberField::golden()); }

PartitionMap beta_preset(const std::string& name, const Scalar& b, Convention c = Convention::normalized)
{
    PresetParams p;
    p.beta = b;
    p.convention = c;
    return preset(name, p);
}

/// Owns the pieces a RugSet points into.
struct Setup {
    PartitionMap map;
    TowerGraph graph;
    RugSet rugs;

    explicit Setup(PartitionMap m)
        : map(std::move(m)), graph(build_tower(map)), rugs(build_rugs(graph, map, rho_limit(graph, map)))
    {
    }
};

NatExtPoint pt(LevelId u, Scalar x, Scalar y) { return {u, {std::move(x)}, std::move(y)}; }

} // namespace

TEST_CASE("doubling rugs are the Baker stacking")
{
    Setup s(preset("doubling"));
    REQUIRE(s.rugs.rugs().size() == 2);
    for (const auto& rug : s.rugs.rugs()) {
        CHECK(rug.height == Scalar(1));
        REQUIRE(rug.strips.size() == 2);
        CHECK(rug.strips[0].source == 1);
        CHECK(rug.strips[0].offset == Scalar(0));
        CHECK(rug.strips[0].thickness == Scalar(1, 2));
        CHECK(rug.strips[1].source == 2);
        CHECK(rug.strips[1].offset == Scalar(1, 2));
        CHECK(rug.strips[1].thickness == Scalar(1, 2));
    }
    CHECK(s.rugs.total_mass() == Scalar(1));
}

TEST_CASE("doubling forward and backward steps")
{
    Setup s(preset("doubling"));
    auto f1 = step_forward(s.rugs, pt(1, Scalar(3, 10), Scalar(1, 2)));
    CHECK(f1.point == pt(2, Scalar(3, 5), Scalar(1, 4)));
    CHECK_FALSE(f1.boundary);
    auto f2 = step_forward(s.rugs, pt(2, Scalar(4, 5), Scalar(1, 2)));
    CHECK(f2.point == pt(2, Scalar(3, 5), Scalar(3, 4)));

    CHECK(step_backward(s.rugs, pt(2, Scalar(3, 5), Scalar(3, 4))).point == pt(2, Scalar(4, 5), Scalar(1, 2)));
    CHECK(step_backward(s.rugs, pt(2, Scalar(3, 5), Scalar(1, 4))).point == pt(1, Scalar(3, 10), Scalar(1, 2)));

    // The strip boundary y = 1/2 is a tie.
    CHECK(step_backward(s.rugs, pt(1, Scalar(1, 5), Scalar(1, 2))).boundary);
}

TEST_CASE("property: the doubling extension is the Baker map")
{
    Setup s(preset("doubling"));
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<long> d(0, 1 << 24);
    for (int i = 0; i < 10000; ++i) {
        Rational x(d(rng), 1 << 24), y(d(rng), 1 << 24);
        x.canonicalize();
        y.canonicalize();
        if (x == Rational(1, 2) || x == 1 || x == 0) continue;
        // Baker: (2x mod 1, (y + floor(2x)) / 2), level = half containing the image.
        Rational two_x = 2 * x;
        int digit = two_x >= 1 ? 1 : 0;
        Rational bx = two_x - digit, by = (y + digit) / 2;
        if (bx == Rational(1, 2) || bx == 0) continue;
        LevelId from = x <= Rational(1, 2) ? 1 : 2, to = bx <= Rational(1, 2) ? 1 : 2;
        auto f = step_forward(s.rugs, pt(from, Scalar(x), Scalar(y)));
        REQUIRE(f.point == pt(to, Scalar(bx), Scalar(by)));
        REQUIRE(step_backward(s.rugs, f.point).point == pt(from, Scalar(x), Scalar(y)));
    }
}

TEST_CASE("doubling orbits invert exactly")
{
    Setup s(preset("doubling"));
    NatExtPoint start = pt(1, Scalar(3, 10), Scalar(1, 3));
    auto fwd = orbit(s.rugs, start, 3);
    REQUIRE(fwd.points.size() == 4);
    auto back = orbit(s.rugs, fwd.points.back(), -3);
    CHECK(back.points.back() == start);
    CHECK(fwd.flagged.empty());
}

TEST_CASE("positive beta rugs")
{
    Scalar b = plastic_beta();
    Setup s(beta_preset("beta_pos", b));
    const auto& rho = s.rugs.measure().rho;
    const Rug& first = s.rugs.rug(1);
    REQUIRE(first.strips.size() == 2);
    CHECK(first.strip_from(1).thickness == rho[0] / b);
    CHECK(first.strip_from(5).thickness == rho[4] / b);
    CHECK(first.strip_from(1).thickness + first.strip_from(5).thickness == rho[0]);
    CHECK(first.strip_from(5).offset == rho[0] / b);
    CHECK_THROWS_AS(first.strip_from(3), NatExtError);
    for (LevelId u = 2; u < 5; ++u) CHECK(rho[u] == rho[u - 1] / b);

    Scalar y = rho[1] / Scalar(3);
    auto f = step_forward(s.rugs, pt(2, Scalar(9, 10), y));
    CHECK(f.point.level == 3);
    CHECK(f.point.y == y / b);
    CHECK(f.point.x[0] == b * Scalar(9, 10) - Scalar(1));
}

TEST_CASE("K-map rugs follow the incoming edges")
{
    Scalar b = golden_beta();
    Setup s(beta_preset("random_beta_K", b, Convention::raw));
    const auto& rho = s.rugs.measure().rho;
    const Rug& second = s.rugs.rug(2);
    REQUIRE(second.strips.size() == 2);
    CHECK(second.strips[0].source == 1);
    CHECK(second.strips[1].source == 4);
    CHECK(second.strips[0].thickness == rho[0] / b);
    CHECK(second.strips[1].thickness == rho[3] / b);
    CHECK(second.strips[0].offset == Scalar(0));
    CHECK(second.strips[1].offset == rho[0] / b);
    CHECK(s.rugs.total_mass() == Scalar(1));

    // A point in rug 4's strip from level 2 steps back to level 2 with the fiber scaled by s_2.
    const Strip& from2 = s.rugs.rug(4).strip_from(2);
    CHECK(from2.thickness == rho[1] / (Scalar(2) * b));
    Scalar y = from2.offset + from2.thickness / Scalar(3);
    auto back = step_backward(s.rugs, {4, {Scalar(1, 3), Scalar(6, 5)}, y});
    CHECK(back.point.level == 2);
    CHECK(back.point.y == (y - from2.offset) * Scalar(2) * b);
}

TEST_CASE("float-mode orbit of positive beta stays inside the rugs")
{
    Setup s(beta_preset("beta_pos", Scalar::from_float(oracle::plastic().root.get_d())));
    std::mt19937_64 rng(99);
    NatExtPoint z = sample_point(s.rugs, rng);
    auto o = orbit(s.rugs, z, 10000);
    REQUIRE(o.points.size() == 10001);
    for (const auto& p : o.points) CHECK_NOTHROW(check_inside(s.rugs, p));
}

TEST_CASE("negative beta orbits leave the transient rugs for good")
{
    Setup s(beta_preset("beta_neg", plastic_beta()));
    CHECK(s.rugs.rug(1).height.is_zero());
    CHECK(s.rugs.rug(2).height.is_zero());
    NatExtPoint z = pt(1, Scalar(1, 7), Scalar(0));
    auto o = orbit(s.rugs, z, 60);
    std::size_t entered = 0;
    while (entered < o.points.size() && o.points[entered].level <= 2) ++entered;
    REQUIRE(entered < o.points.size());
    for (std::size_t i = entered; i < o.points.size(); ++i) {
        CHECK(o.points[i].level >= 3);
        CHECK_NOTHROW(check_inside(s.rugs, o.points[i]));
    }
}

TEST_CASE("natural extension report on the finite presets")
{
    std::vector<PartitionMap> maps{preset("doubling"), beta_preset("beta_pos", plastic_beta()),
                                   beta_preset("beta_neg", plastic_beta()),
                                   beta_preset("random_beta_K", golden_beta(), Convention::raw),
                                   beta_preset("random_beta_skew", golden_beta())};
    for (auto& m : maps) {
        Setup s(std::move(m));
        auto r = check_natext(s.rugs, 2000, 42);
        CAPTURE(s.map.name());
        CHECK(r.ok());
        CHECK(r.strips_exact);
        CHECK(r.nu_is_one);
        CHECK(r.nu_total == Scalar(1));
        CHECK(r.measure_preserved);
        CHECK(r.samples == 2000);
        CHECK(r.round_trip_failures == 0);
        CHECK(r.semiconjugacy_failures == 0);
        CHECK(r.contraction_failures == 0);
    }
}

TEST_CASE("sampling is deterministic and lands inside")
{
    Setup s(beta_preset("random_beta_K", golden_beta(), Convention::raw));
    std::mt19937_64 a(5), b(5);
    for (int i = 0; i < 500; ++i) {
        NatExtPoint p = sample_point(s.rugs, a), q = sample_point(s.rugs, b);
        CHECK(p == q);
        CHECK_NOTHROW(check_inside(s.rugs, p));
        CHECK(s.rugs.rug(p.level).height > Scalar(0));
    }
}

TEST_CASE("points outside their rug are rejected")
{
    Setup s(preset("doubling"));
    CHECK_THROWS_AS(check_inside(s.rugs, pt(1, Scalar(3, 10), Scalar(2))), NatExtError);
    CHECK_THROWS_AS(check_inside(s.rugs, pt(1, Scalar(3, 4), Scalar(1, 2))), NatExtError);
    CHECK_THROWS_AS(step_forward(s.rugs, pt(2, Scalar(1, 10), Scalar(0))), NatExtError);
}

TEST_CASE("projected support of negative beta")
{
    Scalar b = plastic_beta(), one(1);
    Setup s(beta_preset("beta_neg", b));
    auto support = projected_support(s.rugs);
    REQUIRE(support.size() == 2);
    CHECK(support[0].lo == Scalar(0));
    CHECK(support[0].hi == (b - one) * (b - one));
    CHECK(support[1].lo == Scalar(2) - b);
    CHECK(support[1].hi == one);

    Setup d(preset("doubling"));
    auto full = projected_support(d.rugs);
    REQUIRE(full.size() == 1);
    CHECK(full[0].lo == Scalar(0));
    CHECK(full[0].hi == Scalar(1));
}
