#include "doctest.h"
#include "oracle.hpp"

#include "hofbauer/mapmodel.hpp"

#include <cmath>
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

Scalar random_unit(std::mt19937_64& rng, const NumericMode& mode)
{
    std::uniform_int_distribution<long> d(0, 1 << 20);
    return mode.lift(Rational(d(rng), 1 << 20));
}

} // namespace

TEST_CASE("validate: doubling passes every condition")
{
    auto m = preset("doubling");
    auto r = validate(m);
    CHECK(r.ok());
    REQUIRE(r.jacobians.size() == 2);
    CHECK(r.jacobians[0] == Scalar(2));
    CHECK(r.jacobians[1] == Scalar(2));
    CHECK(r.get("c1").verdict == Verdict::pass);
    CHECK(r.get("c4").verdict == Verdict::pass);
}

TEST_CASE("validate: negative beta uses orientation-reversing branches")
{
    Scalar b = plastic_beta();
    auto m = beta_preset("beta_neg", b);
    CHECK(validate(m).ok());
    CHECK(m.branch(1).action()[0].scale == -b);
    CHECK(m.branch(2).action()[0].scale == -b);
    CHECK(m.branch(1).jacobian() == b);
}

TEST_CASE("validate: overlapping cells are rejected")
{
    std::vector<Cell> cells{Cell::interval(0, Scalar(2, 3)), Cell::interval(Scalar(1, 3), 1)};
    std::vector<std::vector<AffineAxis>> actions{{{Scalar(3, 2), Scalar(0)}}, {{Scalar(3, 2), Scalar(-1, 2)}}};
    PartitionMap m("overlap", Cell::interval(0, 1), cells, actions, NumericMode::exact_rational());
    try {
        validate(m);
        FAIL("overlap accepted");
    } catch (const GeometryError& e) {
        CHECK(std::string(e.what()).find("overlap") != std::string::npos);
    }
}

TEST_CASE("validate: gaps are rejected")
{
    std::vector<Cell> cells{Cell::interval(0, Scalar(1, 3)), Cell::interval(Scalar(2, 3), 1)};
    std::vector<std::vector<AffineAxis>> actions{{{Scalar(3), Scalar(0)}}, {{Scalar(3), Scalar(-2)}}};
    PartitionMap m("gap", Cell::interval(0, 1), cells, actions, NumericMode::exact_rational());
    CHECK_THROWS_WITH_AS(validate(m), doctest::Contains("gap"), GeometryError);
}

TEST_CASE("validate: contracting branch fails expansion")
{
    std::vector<Cell> cells{Cell::interval(0, Scalar(1, 2)), Cell::interval(Scalar(1, 2), 1)};
    std::vector<std::vector<AffineAxis>> actions{{{Scalar(1, 2), Scalar(0)}}, {{Scalar(2), Scalar(-1)}}};
    PartitionMap m("contract", Cell::interval(0, 1), cells, actions, NumericMode::exact_rational());
    auto r = validate(m);
    CHECK_FALSE(r.ok());
    CHECK(r.get("c4").verdict == Verdict::fail);
}

TEST_CASE("apply examples")
{
    auto d = preset("doubling");
    auto r = hofbauer::apply(d, {Scalar(3, 10)});
    CHECK(r.image[0] == Scalar(3, 5));
    CHECK(r.branch == 1);
    // Shared boundary goes to the lowest index.
    CHECK(hofbauer::apply(d, {Scalar(1, 2)}).branch == 1);
    CHECK_THROWS_AS(hofbauer::apply(d, {Scalar(2)}), GeometryError);

    Scalar b = plastic_beta();
    auto bp = beta_preset("beta_pos", b);
    auto one = hofbauer::apply(bp, {Scalar(1)});
    CHECK(one.image[0] == b - Scalar(1));
    CHECK(one.branch == 2);
    CHECK(one.image[0].to_double() == doctest::Approx(0.3247179572));

    Scalar g = golden_beta();
    auto k = beta_preset("random_beta_K", g, Convention::raw);
    // Coin 1/4, fiber 0.8 lies in Z2 = [0,1/2] x [1/beta, 1].
    auto kr = hofbauer::apply(k, {Scalar(1, 4), Scalar(4, 5)});
    CHECK(kr.branch == 2);
    CHECK(kr.image[0] == Scalar(1, 2));
    CHECK(kr.image[1] == g * Scalar(4, 5));
}

TEST_CASE("branch images")
{
    Scalar b = plastic_beta(), one(1);
    auto bn = beta_preset("beta_neg", b);
    CHECK(branch_image(bn, 2, Cell::interval(one / b, one)) == Cell::interval(Scalar(2) - b, one));
    CHECK(branch_image(preset("doubling"), 1, Cell::interval(0, Scalar(1, 2))) == Cell::interval(0, 1));
    CHECK_THROWS_AS(branch_image(preset("doubling"), 1, Cell::interval(0, 1)), GeometryError);

    Scalar g = golden_beta();
    auto k = beta_preset("random_beta_K", g);
    CHECK(branch_image(k, 3, k.cell(3)) == k.cell(1));
    CHECK(k.cell(1) == Cell::box(0, 1, 0, one / g));
}

TEST_CASE("branch preimages")
{
    Scalar b = plastic_beta(), one(1);
    CHECK(branch_preimage(preset("doubling"), 2, Cell::interval(0, 1)) == Cell::interval(Scalar(1, 2), 1));
    auto bp = beta_preset("beta_pos", b);
    CHECK(branch_preimage(bp, 1, Cell::interval(0, one / b)) == Cell::interval(0, one / (b * b)));
    auto bn = beta_preset("beta_neg", b);
    Scalar top = (b - one) * (b - one);
    CHECK(branch_preimage(bn, 1, Cell::interval(0, top)) == Cell::interval((one - top) / b, one / b));
    CHECK_THROWS_AS(branch_preimage(bp, 1, Cell::interval(0, b)), GeometryError);
}

TEST_CASE("preset geometry and Jacobians")
{
    Scalar b = plastic_beta(), one(1);
    auto bp = beta_preset("beta_pos", b);
    REQUIRE(bp.size() == 2);
    CHECK(bp.cell(1) == Cell::interval(0, one / b));
    CHECK(bp.cell(2) == Cell::interval(one / b, one));
    CHECK(bp.branch(1).jacobian() == b);
    CHECK(bp.branch(2).jacobian() == b);

    Scalar g = golden_beta();
    auto k = beta_preset("random_beta_K", g);
    REQUIRE(k.size() == 4);
    std::vector<Scalar> expected{g, Scalar(2) * g, Scalar(2) * g, g};
    for (std::size_t j = 1; j <= 4; ++j) CHECK(k.branch(j).jacobian() == expected[j - 1]);
    CHECK(validate(k).ok());
    CHECK(validate(beta_preset("random_beta_skew", g)).ok());

    auto s = preset("skew_nonliftable");
    CHECK(s.branch(1).jacobian() == Scalar(6, 5));
    CHECK(s.branch(2).jacobian() == Scalar(3));
    CHECK(s.branch(3).jacobian() == Scalar(3));
    CHECK(validate(s).ok());

    CHECK_THROWS_AS(beta_preset("random_beta_K", b), GeometryError);
    CHECK_THROWS_AS(preset("beta_pos"), GeometryError);
    CHECK_THROWS_AS(preset("nonexistent"), GeometryError);
}

TEST_CASE("measure conventions")
{
    Scalar g = golden_beta(), one(1);
    auto raw = beta_preset("random_beta_K", g, Convention::raw);
    CHECK(raw.measure(raw.cell(1)) == one / g);
    CHECK(raw.measure(raw.cell(4)) == g - one);
    auto norm = raw.with_convention(Convention::normalized);
    CHECK(norm.measure(norm.cell(1)) == one / (g * g));
    CHECK(norm.measure(norm.ambient()) == one);
    CHECK(parse_convention("raw") == Convention::raw);
    CHECK_THROWS_AS(parse_convention("lebesgue"), GeometryError);
}

TEST_CASE("property: beta_pos agrees with a double-precision oracle")
{
    Scalar b = plastic_beta();
    auto bp = beta_preset("beta_pos", b);
    const double beta = oracle::plastic().root.get_d();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10000; ++i) {
        Scalar x = random_unit(rng, bp.mode());
        double xd = x.to_double();
        auto r = hofbauer::apply(bp, {x});
        double expected = beta * xd;
        if (expected > 1) expected -= 1;
        if (std::fabs(beta * xd - 1) < 1e-9) continue; // branch boundary
        REQUIRE(std::fabs(r.image[0].to_double() - expected) < 1e-12);
        REQUIRE(r.branch == (beta * xd <= 1 ? 1u : 2u));
    }
}

TEST_CASE("property: branches invert exactly and scale measure by the Jacobian")
{
    Scalar g = golden_beta();
    std::vector<PartitionMap> maps{beta_preset("random_beta_K", g), beta_preset("random_beta_skew", g),
                                   beta_preset("beta_neg", plastic_beta()), preset("skew_nonliftable")};
    std::mt19937_64 rng(5);
    for (const auto& m : maps) {
        for (int i = 0; i < 2500; ++i) {
            Point x;
            for (std::size_t a = 0; a < m.dim(); ++a) {
                const Interval& iv = m.ambient().axis(a);
                x.push_back(iv.lo + iv.length() * random_unit(rng, m.mode()));
            }
            auto r = hofbauer::apply(m, x);
            const Branch& br = m.branch(r.branch);
            REQUIRE(br.domain().contains(x));
            REQUIRE(m.ambient().contains(r.image));
            REQUIRE(br.invert(r.image) == x);

            // A small box around x inside its cell maps to a box of measure s_j times larger.
            std::vector<Interval> axes;
            for (std::size_t a = 0; a < m.dim(); ++a) {
                const Interval& d = br.domain().axis(a);
                axes.push_back({d.lo + (x[a] - d.lo) * Scalar(1, 2), x[a]});
            }
            Cell sub(axes);
            if (!sub.has_positive_volume()) continue;
            REQUIRE(m.measure(branch_image(m, r.branch, sub)) == br.jacobian() * m.measure(sub));
        }
    }
}

TEST_CASE("float mode presets")
{
    auto bp = beta_preset("beta_pos", Scalar::from_float(1.3247179572447460));
    CHECK_FALSE(bp.mode().exact());
    CHECK(validate(bp).ok());
    auto r = hofbauer::apply(bp, {Scalar::from_float(0.5)});
    CHECK(r.image[0].to_double() == doctest::Approx(0.6623589786));
}
