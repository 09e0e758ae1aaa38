#include "cli.hpp"

#include "hofbauer/io.hpp"

#include <CLI11.hpp>
#include <gmp.h>
#include <openssl/crypto.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

namespace hofbauer::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.3.0";

struct Flags {
    std::string scenario;
    std::string preset;
    std::string beta;
    std::string mode;
    std::string convention;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_depth;
    std::optional<std::size_t> max_levels;
    std::optional<std::size_t> n_cesaro;
    std::optional<double> tol;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> depth_cap;
    std::size_t steps = 100;
    std::size_t capacity_n = 0;
};

void add_common(CLI::App* app, Flags& f)
{
    app->add_option("--scenario", f.scenario, "scenario JSON file");
    app->add_option("--preset", f.preset, "preset map name");
    app->add_option("--beta", f.beta, "golden, plastic, an integer polynomial, or a decimal");
    app->add_option("--mode", f.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    app->add_option("--convention", f.convention, "normalized or raw")->check(CLI::IsMember({"normalized", "raw"}));
    app->add_option("--out", f.out, "output directory");
    app->add_option("--seed", f.seed, "seed for all sampling");
    app->add_option("--max-depth", f.max_depth, "tower depth cap");
    app->add_option("--max-levels", f.max_levels, "tower level cap");
    app->add_option("--n-cesaro", f.n_cesaro, "Cesaro cross-check horizon");
    app->add_option("--tol", f.tol, "Cesaro cross-check tolerance");
    app->add_option("--samples", f.samples, "sample count for natural-extension checks");
    app->add_option("--depth-cap", f.depth_cap, "depth cap M for the retained-mass profile");
    app->add_option("--steps", f.steps, "trajectory length written by natext");
    app->add_option("--capacity", f.capacity_n, "boundary-count horizon for the capacity estimate (0 = skip)");
}

Scenario load_scenario(const Flags& f)
{
    Scenario s;
    if (!f.scenario.empty()) {
        std::ifstream in(f.scenario);
        if (!in) throw ConfigError("cannot read scenario " + f.scenario);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
        }
        s = parse_scenario(j);
    } else {
        s.map_config = json::object();
    }
    json& m = s.map_config;
    if (!f.preset.empty()) {
        m.erase("custom");
        m["preset"] = f.preset;
    }
    if (!f.beta.empty()) m["beta"] = f.beta;
    if (!f.mode.empty()) m["mode"] = f.mode;
    if (!f.convention.empty()) m["measure"] = f.convention;
    if (!m.contains("preset") && !m.contains("custom")) throw ConfigError("give --preset or --scenario");

    PipelineOptions& o = s.options;
    if (f.seed) o.seed = *f.seed;
    if (f.max_depth) o.max_depth = *f.max_depth;
    if (f.max_levels) o.max_levels = *f.max_levels;
    if (f.n_cesaro) o.n_cesaro = *f.n_cesaro;
    if (f.tol) o.tol = *f.tol;
    if (f.samples) o.samples = *f.samples;
    if (f.depth_cap) o.depth_cap = *f.depth_cap;
    if (!f.out.empty()) s.out_dir = f.out;
    if (o.max_depth < 1 || o.max_levels < 1) throw ConfigError("caps must be at least 1");
    return s;
}

class Run {
public:
    Run(std::string command, Scenario scenario, const Flags& flags)
        : command_(std::move(command)), scenario_(std::move(scenario)), flags_(flags),
          map_(build_map(scenario_.map_config))
    {
    }

    int execute()
    {
        int code = ExitCode::ok;
        auto stage = [&](const std::string& name, auto&& fn) {
            if (code != ExitCode::ok) return;
            auto t0 = std::chrono::steady_clock::now();
            code = fn();
            timing_[name] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        };
        const bool all = command_ == "all";
        if (all || command_ == "validate") stage("validate", [&] { return do_validate(); });
        if (all || command_ == "tower") stage("tower", [&] { return do_tower(); });
        if (all || command_ == "measures") stage("measures", [&] { return do_measures(); });
        if (all && !tower().finite()) {
            notes_.push_back("tower truncated: natext, shift and figure skipped");
        } else {
            if (all || command_ == "natext") stage("natext", [&] { return do_natext(); });
            if (all || command_ == "shift") stage("shift", [&] { return do_shift(); });
            if (all || command_ == "figure") stage("figure", [&] { return do_figure(); });
        }
        if (all || command_ == "liftability") stage("liftability", [&] { return do_liftability(); });
        write_manifest(code);
        return code;
    }

private:
    const TowerGraph& tower()
    {
        if (!graph_) {
            TowerOptions opts{scenario_.options.max_depth, scenario_.options.max_levels};
            graph_ = build_tower(map_, opts);
        }
        return *graph_;
    }

    const LevelMeasure& measure()
    {
        if (!measure_) {
            RhoOptions opts;
            opts.tol = scenario_.options.tol;
            opts.n_check = scenario_.options.n_cesaro;
            measure_ = rho_limit(tower(), map_, opts);
        }
        return *measure_;
    }

    const RugSet& rugs()
    {
        if (!rugs_) rugs_.emplace(build_rugs(tower(), map_, measure()));
        return *rugs_;
    }

    void emit(const std::string& name, const std::string& content)
    {
        write_atomic(scenario_.out_dir / name, content);
        artifacts_[name] = sha256_hex(content);
    }

    int do_validate()
    {
        json checks = json::array();
        bool ok = false;
        try {
            ValidationReport rep = validate(map_);
            for (const auto& c : rep.checks)
                checks.push_back({{"condition", c.condition}, {"verdict", to_string(c.verdict)}, {"detail", c.detail}});
            json jac = json::array();
            for (const auto& s : rep.jacobians) jac.push_back(s.to_string());
            ok = rep.ok();
            emit("validation.json", json{{"map", map_.name()}, {"ok", ok}, {"checks", checks}, {"jacobians", jac}}.dump(2) + "\n");
        } catch (const GeometryError& e) {
            emit("validation.json", json{{"map", map_.name()}, {"ok", false}, {"error", e.what()}}.dump(2) + "\n");
            std::cerr << "validation failed: " << e.what() << "\n";
            return ExitCode::validation_failed;
        }
        if (!ok) {
            std::cerr << "validation failed for " << map_.name() << "\n";
            return ExitCode::validation_failed;
        }
        return ExitCode::ok;
    }

    int do_tower()
    {
        const TowerGraph& g = tower();
        json t = tower_json(g);
        t["markov"] = detect_markov(map_);
        SccDecomposition scc = scc_decompose(g);
        t["transient"] = scc.transient;
        json terminal = json::array();
        for (std::size_t c : scc.terminal) terminal.push_back(scc.components[c]);
        t["terminal_components"] = terminal;
        if (flags_.capacity_n > 0) {
            try {
                CapacityEstimate cap = capacity_estimate(g, map_, flags_.capacity_n);
                t["capacity"] = {{"sup_counts", cap.sup_counts}, {"terms", cap.terms}, {"estimate", cap.estimate}};
            } catch (const BudgetExceeded& e) {
                std::cerr << e.what() << "\n";
                emit("tower.json", t.dump(2) + "\n");
                return ExitCode::budget_exhausted;
            }
        }
        emit("tower.json", t.dump(2) + "\n");
        emit("adjacency.txt", adjacency_text(g));
        if (!g.finite() && command_ == "tower") {
            std::cerr << "tower truncated at max_depth=" << g.options().max_depth
                      << " / max_levels=" << g.options().max_levels << "\n";
            return ExitCode::budget_exhausted;
        }
        return ExitCode::ok;
    }

    int do_measures()
    {
        const LevelMeasure& m = measure();
        emit("measures.csv", measures_csv(tower(), m));
        emit("transitions.csv", transitions_csv(m));
        json summary{{"provenance", to_string(m.provenance)},
                     {"convention", to_string(m.convention)},
                     {"residual", m.residual},
                     {"cesaro_n", m.cesaro_check_n},
                     {"cesaro_deviation", m.cesaro_deviation},
                     {"stationarity_defect", stationarity_defect(m)},
                     {"notes", m.notes}};
        try {
            Entropy h = entropy(m);
            summary["entropy_nats"] = h.nats;
            summary["entropy_bits"] = h.bits;
        } catch (const LiftError& e) {
            summary["entropy_error"] = e.what();
        }
        emit("measures.json", summary.dump(2) + "\n");
        return ExitCode::ok;
    }

    int do_natext()
    {
        const RugSet& r = rugs();
        json rj = json::array();
        for (const auto& rug : r.rugs()) {
            json strips = json::array();
            for (const auto& s : rug.strips)
                strips.push_back({{"source", s.source}, {"branch", s.branch}, {"offset", s.offset.to_string()},
                                  {"thickness", s.thickness.to_string()}});
            rj.push_back({{"level", rug.level}, {"base", cell_json(rug.base)}, {"height", rug.height.to_string()},
                          {"strips", strips}});
        }
        NatExtReport rep = check_natext(r, scenario_.options.samples, scenario_.options.seed);
        json report{{"strips_exact", rep.strips_exact}, {"nu_total", rep.nu_total.to_string()},
                    {"nu_is_one", rep.nu_is_one}, {"measure_preserved", rep.measure_preserved},
                    {"samples", rep.samples}, {"flagged", rep.flagged},
                    {"round_trip_failures", rep.round_trip_failures},
                    {"semiconjugacy_failures", rep.semiconjugacy_failures},
                    {"contraction_failures", rep.contraction_failures}, {"ok", rep.ok()},
                    {"witness", rep.witness + rep.strip_witness + rep.measure_witness},
                    {"coarsest_sigma_algebra", "not machine-checked"}};
        emit("rugs.json", json{{"rugs", rj}, {"nu_total", r.total_mass().to_string()}}.dump(2) + "\n");
        emit("natext_report.json", report.dump(2) + "\n");

        std::mt19937_64 rng(scenario_.options.seed ^ 0x9e3779b97f4a7c15ULL);
        NatExtPoint start = sample_point(r, rng);
        Orbit o = orbit(r, start, static_cast<long>(flags_.steps));
        emit("trajectory.csv", trajectory_csv(o));
        return rep.ok() ? ExitCode::ok : ExitCode::error;
    }

    int do_shift()
    {
        const LevelMeasure& m = measure();
        std::vector<ReturnPartition> parts;
        json kac = json::array();
        for (LevelId u : m.support()) {
            try {
                parts.push_back(induced_return_partition(tower(), map_, m, u, scenario_.options.return_cap));
            } catch (const BudgetExceeded& e) {
                notes_.push_back("returns to level " + std::to_string(u) + ": " + e.what());
            }
            KacResult k = kac_check(tower(), m, u, scenario_.options.return_cap);
            kac.push_back({{"u", u}, {"lower", k.lower}, {"upper", k.upper}, {"target", k.target},
                           {"exact_mean", k.exact_mean.to_string()}, {"exact_matches", k.exact_matches},
                           {"contains_target", k.contains_target()}});
        }
        emit("returns.csv", returns_csv(parts));

        MixingContext ctx;
        ctx.constant_slope_1d = map_.constant_slope_1d;
        try {
            ctx.entropy_nats = entropy(m).nats;
        } catch (const LiftError&) {
        }
        const std::string& name = map_.name();
        if ((name == "beta_pos" || name == "beta_neg") && map_.beta && map_.beta->is_field() && ctx.entropy_nats) {
            PresetParams pp;
            pp.beta = map_.beta;
            PartitionMap partner = preset(name == "beta_pos" ? "beta_neg" : "beta_pos", pp);
            TowerGraph pg = build_tower(partner, {scenario_.options.max_depth, scenario_.options.max_levels});
            if (pg.finite()) {
                RhoOptions ro;
                ro.n_check = 0;
                double h = entropy(rho_limit(pg, partner, ro)).nats;
                ctx.pisot_pair = std::fabs(h - *ctx.entropy_nats) < 1e-10;
            }
        }
        MixingReport mix = mixing_report(tower(), m.support(), ctx);
        json mj = mixing_json(mix);
        mj["stationary_deviation"] = stationary_deviation(tower(), m);
        mj["kac"] = kac;
        emit("mixing_report.json", mj.dump(2) + "\n");
        return ExitCode::ok;
    }

    int do_figure()
    {
        emit("figure.svg", rugs_svg(rugs(), map_.name() + " natural extension"));
        return ExitCode::ok;
    }

    int do_liftability()
    {
        const std::size_t cap = scenario_.options.depth_cap;
        const TowerGraph* g = nullptr;
        std::optional<TowerGraph> own;
        if (flags_.max_depth || (graph_ && graph_->finite())) {
            g = &tower();
        } else {
            own = build_tower(map_, {cap + 10, scenario_.options.max_levels});
            g = &*own;
        }
        MassProfile p = lift_mass_profile(*g, map_, scenario_.options.mass_ns, cap);
        emit("liftability.csv", liftability_csv(p));
        return ExitCode::ok;
    }

    void write_manifest(int code)
    {
        json m{{"tool", "hofbauer"},
               {"version", kVersion},
               {"subcommand", command_},
               {"exit_code", code},
               {"input_hash", sha256_hex(scenario_.canonical().dump())},
               {"inputs", scenario_.canonical()},
               {"seed", scenario_.options.seed},
               {"artifacts", artifacts_},
               {"timing_ms", timing_},
               {"notes", notes_},
               {"libraries", {{"gmp", gmp_version}, {"openssl", OpenSSL_version(OPENSSL_VERSION)}}}};
        write_atomic(scenario_.out_dir / "manifest.json", m.dump(2) + "\n");
    }

    std::string command_;
    Scenario scenario_;
    Flags flags_;
    PartitionMap map_;
    std::optional<TowerGraph> graph_;
    std::optional<LevelMeasure> measure_;
    std::optional<RugSet> rugs_;
    std::map<std::string, std::string> artifacts_;
    std::map<std::string, double> timing_;
    std::vector<std::string> notes_;
};

} // namespace

int run(const std::vector<std::string>& args)
{
    CLI::App app{"Hofbauer towers, lifted measures and natural extensions for piecewise affine maps"};
    app.require_subcommand(1);
    Flags flags;
    std::string chosen;
    for (const char* name : {"validate", "tower", "measures", "natext", "shift", "figure", "liftability", "all"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub, flags);
        sub->callback([&chosen, name] { chosen = name; });
    }
    app.add_subcommand("presets", "list preset names")->callback([&chosen] { chosen = "presets"; });

    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (chosen == "presets") {
        for (const auto& n : preset_names()) std::cout << n << "\n";
        return ExitCode::ok;
    }
    try {
        Run run(chosen, load_scenario(flags), flags);
        return run.execute();
    } catch (const GeometryError& e) {
        std::cerr << "invalid map: " << e.what() << "\n";
        return ExitCode::validation_failed;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return ExitCode::budget_exhausted;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::error;
    }
}

} // namespace hofbauer::cli
