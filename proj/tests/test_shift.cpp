#include "doctest.h"
#include "oracle.hpp"

#include "hofbauer/natext.hpp"
#include "hofbauer/shift.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

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

struct Setup {
    PartitionMap map;
    TowerGraph graph;
    LevelMeasure measure;

    explicit Setup(PartitionMap m) : map(std::move(m)), graph(build_tower(map)), measure(rho_limit(graph, map)) {}
};

std::set<std::size_t> times_of(const ReturnPartition& p)
{
    std::set<std::size_t> out;
    for (const auto& a : p.atoms) out.insert(a.time);
    return out;
}

} // namespace

TEST_CASE("doubling itinerary")
{
    Setup s(preset("doubling"));
    RugSet rugs = build_rugs(s.graph, s.map, s.measure);
    auto o = orbit(rugs, {1, {Scalar(3, 10)}, Scalar(1, 2)}, 2);
    auto path = encode(o.points);
    CHECK(path.word == std::vector<LevelId>{1, 2, 1});
    CHECK(path.anchor == 0);
    CHECK(admissible(s.graph, path));
}

TEST_CASE("property: itineraries are admissible and shift-equivariant")
{
    for (const char* name : {"beta_pos", "beta_neg"}) {
        Setup s(beta_preset(name, plastic_beta()));
        RugSet rugs = build_rugs(s.graph, s.map, s.measure);
        std::mt19937_64 rng(23);
        for (int i = 0; i < 50; ++i) {
            NatExtPoint z = sample_point(rugs, rng);
            auto o = orbit(rugs, z, 12);
            auto path = encode(o.points);
            CHECK(admissible(s.graph, path));
            auto advanced = orbit(rugs, o.points[1], 11);
            auto shifted = encode(advanced.points);
            CHECK(std::equal(shifted.word.begin(), shifted.word.end(), path.word.begin() + 1));
        }
    }
    auto g = graph_from_edges(3, {{1, 2}, {2, 3}});
    CHECK_FALSE(admissible(g, {{1, 3}, 0}));
    CHECK(admissible(g, {{1, 2, 3}, 0}));
}

TEST_CASE("doubling first returns are geometric")
{
    Setup s(preset("doubling"));
    auto p = induced_return_partition(s.graph, s.map, s.measure, 1, 3);
    std::map<std::size_t, Scalar> mass;
    for (const auto& a : p.atoms) mass[a.time] = (mass.count(a.time) ? mass[a.time] : Scalar(0)) + a.weight;
    CHECK(times_of(p) == std::set<std::size_t>{1, 2, 3});
    CHECK(mass[1] == Scalar(1, 2));
    CHECK(mass[2] == Scalar(1, 4));
    CHECK(mass[3] == Scalar(1, 8));
    CHECK(p.tail == Scalar(1, 8));
    CHECK(p.mu_hat_base == Scalar(1, 2));

    auto dist = return_time_distribution(s.graph, s.measure, 1, 3);
    CHECK(dist == std::vector<double>{0.5, 0.25, 0.125});
}

TEST_CASE("positive beta returns to the base level")
{
    Setup s(beta_preset("beta_pos", plastic_beta()));
    auto p = induced_return_partition(s.graph, s.map, s.measure, 1, 6);
    CHECK(times_of(p) == std::set<std::size_t>{1, 5});
    bool chain = std::any_of(p.atoms.begin(), p.atoms.end(),
                             [](const ReturnAtom& a) { return a.path == std::vector<LevelId>{1, 2, 3, 4, 5, 1}; });
    CHECK(chain);
    Scalar b = plastic_beta(), one(1);
    for (const auto& a : p.atoms) CHECK(a.weight == (a.time == 1 ? one / b : one - one / b));
    CHECK(p.tail.is_zero());
}

TEST_CASE("negative beta returns include the three-cycle")
{
    Setup s(beta_preset("beta_neg", plastic_beta()));
    auto p = induced_return_partition(s.graph, s.map, s.measure, 3, 5);
    bool cycle = std::any_of(p.atoms.begin(), p.atoms.end(),
                             [](const ReturnAtom& a) { return a.path == std::vector<LevelId>{3, 4, 5, 3}; });
    CHECK(cycle);
    CHECK(times_of(p).count(3) == 1);
    for (const auto& a : p.atoms) {
        CHECK(a.path.front() == 3);
        CHECK(a.path.back() == 3);
        CHECK(std::count(a.path.begin(), a.path.end(), LevelId(3)) == 2);
    }
    CHECK_THROWS_AS(induced_return_partition(s.graph, s.map, s.measure, 1, 5), ShiftError);
    CHECK_THROWS_AS(induced_return_partition(s.graph, s.map, s.measure, 3, 30, {10}), BudgetExceeded);
}

TEST_CASE("property: propagated return distribution matches path enumeration")
{
    std::vector<PartitionMap> maps{beta_preset("beta_neg", plastic_beta()), beta_preset("random_beta_K", golden_beta()),
                                   beta_preset("random_beta_skew", golden_beta())};
    for (auto& m : maps) {
        Setup s(std::move(m));
        for (LevelId u : s.measure.support()) {
            auto p = induced_return_partition(s.graph, s.map, s.measure, u, 8);
            auto dist = return_time_distribution(s.graph, s.measure, u, 8);
            std::vector<double> from_atoms(8, 0.0);
            for (const auto& a : p.atoms) from_atoms[a.time - 1] += a.weight.to_double();
            for (std::size_t n = 0; n < 8; ++n) CHECK(dist[n] == doctest::Approx(from_atoms[n]).epsilon(1e-12));
            // Each atom's geometric mass matches its weight.
            for (const auto& a : p.atoms)
                CHECK(s.map.measure(a.cell) == a.weight * s.map.measure(s.graph.level(u).cell));
        }
    }
}

TEST_CASE("Kac identity")
{
    Setup d(preset("doubling"));
    auto kd = kac_check(d.graph, d.measure, 1, 40);
    CHECK(kd.exact_mean == Scalar(2));
    CHECK(kd.exact_matches);
    CHECK(kd.contains_target());
    CHECK(kd.target == 2.0);
    CHECK(kd.width() < 1e-6);

    Setup bp(beta_preset("beta_pos", plastic_beta()));
    auto kb = kac_check(bp.graph, bp.measure, 1, 40);
    CHECK(kb.contains_target());
    CHECK(kb.width() < 1e-6);
    CHECK(kb.exact_mean == Scalar(1) / bp.measure.mu_hat[0]);

    Setup k(beta_preset("random_beta_K", golden_beta()));
    auto kk = kac_check(k.graph, k.measure, 2, 40);
    CHECK(kk.contains_target());
    CHECK(kk.exact_matches);
    CHECK(kk.lower <= kk.upper);

    // Short horizons still bracket the mean, only more loosely.
    auto loose = kac_check(k.graph, k.measure, 2, 3);
    CHECK(loose.contains_target());
    CHECK(loose.width() > kk.width());
}

TEST_CASE("induced Bernoulli structure")
{
    Setup d(preset("doubling"));
    auto rd = bernoulli_factor_check(d.graph, d.map, d.measure, 1, 4);
    CHECK(rd.ok());
    CHECK(rd.pairs_checked > 0);

    Setup bp(beta_preset("beta_pos", plastic_beta()));
    auto rb = bernoulli_factor_check(bp.graph, bp.map, bp.measure, 1, 10);
    CHECK(rb.ok());
    CHECK(rb.atoms_checked >= 2);

    Setup bn(beta_preset("beta_neg", plastic_beta()));
    auto rn = bernoulli_factor_check(bn.graph, bn.map, bn.measure, 5, 6);
    CHECK(rn.ok());
}

TEST_CASE("mixing verdicts")
{
    Setup bp(beta_preset("beta_pos", plastic_beta()));
    auto mp = mixing_report(bp.graph, bp.measure.support());
    CHECK(mp.irreducible);
    CHECK(mp.period == 1);
    CHECK(mp.cycle_lengths == std::vector<std::size_t>{1, 5});
    CHECK(mp.verdict == "exact / K / strongly mixing");
    CHECK(mp.mixing());

    Setup bn(beta_preset("beta_neg", plastic_beta()));
    auto mn = mixing_report(bn.graph, bn.measure.support());
    CHECK(mn.support == std::vector<LevelId>{3, 4, 5, 6});
    CHECK(mn.irreducible);
    CHECK(mn.period == 1);
    CHECK(mn.cycle_lengths == std::vector<std::size_t>{2, 3});
    CHECK(mn.verdict == "exact / K / strongly mixing");

    auto toy = graph_from_edges(2, {{1, 2}, {2, 1}});
    auto mt = mixing_report(toy, {1, 2});
    CHECK(mt.irreducible);
    CHECK(mt.period == 2);
    CHECK(mt.verdict == "not mixing");
    CHECK_FALSE(mt.mixing());

    auto split = graph_from_edges(2, {{1, 1}, {2, 2}});
    CHECK_FALSE(mixing_report(split, {1, 2}).irreducible);
}

TEST_CASE("stationary vector matches the lifted measure")
{
    std::vector<PartitionMap> maps{preset("doubling"), beta_preset("beta_pos", plastic_beta()),
                                   beta_preset("beta_neg", plastic_beta()), beta_preset("random_beta_K", golden_beta()),
                                   beta_preset("random_beta_skew", golden_beta())};
    for (auto& m : maps) {
        Setup s(std::move(m));
        CHECK(stationary_deviation(s.graph, s.measure) < 1e-12);
    }
}
