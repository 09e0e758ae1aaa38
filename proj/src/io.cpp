#include "hofbauer/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hofbauer {

using nlohmann::json;

namespace {

// Shortest decimal that reads back to the same double.
std::string shortest(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool is_decimal(const std::string& s)
{
    bool digit = false;
    for (char c : s) {
        if (std::isdigit(static_cast<unsigned char>(c))) digit = true;
        else if (c != '.' && c != '-' && c != '+' && c != 'e' && c != 'E') return false;
    }
    return digit;
}

std::vector<long long> integer_leading_first(const RationalPoly& p)
{
    std::vector<long long> out;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        if (it->get_den() != 1 || !it->get_num().fits_slong_p())
            throw ConfigError("minimal polynomial needs small integer coefficients");
        out.push_back(it->get_num().get_si());
    }
    return out;
}

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

const char* const kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#1f77b4", "#8c564b"};

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string path_text(const std::vector<LevelId>& path)
{
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "-" : "") + std::to_string(path[i]);
    return s;
}

} // namespace

BetaSpec parse_beta(const std::string& text)
{
    BetaSpec out;
    if (text == "golden") out.field = NumberField::golden();
    else if (text == "plastic") out.field = NumberField::plastic();
    else if (is_decimal(text)) {
        try {
            out.value = std::stod(text);
        } catch (const std::exception&) {
            throw ConfigError("bad beta value: " + text);
        }
    } else {
        RationalPoly p;
        try {
            p = parse_polynomial(text);
        } catch (const NumericError& e) {
            throw ConfigError(std::string("bad beta polynomial: ") + e.what());
        }
        out.field = NumberField::create_largest_root(integer_leading_first(p), Rational(1), Rational(2), text);
    }
    return out;
}

BetaSpec parse_beta(const json& j)
{
    if (j.is_string()) return parse_beta(j.get<std::string>());
    if (j.is_number()) return BetaSpec{nullptr, j.get<double>()};
    if (j.is_object() && j.contains("minpoly")) {
        auto poly = j.at("minpoly").get<std::vector<long long>>();
        BetaSpec out;
        if (j.contains("interval")) {
            const auto& iv = j.at("interval");
            if (!iv.is_array() || iv.size() != 2) throw ConfigError("interval must be a pair");
            auto q = [](const json& v) { return parse_rational(v.is_string() ? v.get<std::string>() : v.dump()); };
            out.field = NumberField::create(poly, q(iv[0]), q(iv[1]));
        } else {
            out.field = NumberField::create_largest_root(poly, Rational(1), Rational(2));
        }
        return out;
    }
    throw ConfigError("beta must be a name, a polynomial, a decimal, or {minpoly, interval}");
}

Scalar parse_scalar(const json& j, const NumericMode& mode)
{
    Scalar exact;
    if (j.is_number_integer()) {
        exact = Scalar(Rational(j.dump()));
    } else if (j.is_number()) {
        if (mode.exact()) throw ConfigError("exact mode needs numbers as strings, got " + j.dump());
        return Scalar::from_float(j.get<double>(), mode.eps);
    } else if (j.is_string()) {
        const std::string s = j.get<std::string>();
        bool symbolic = std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isalpha(c); });
        if (symbolic) {
            FieldPtr field = mode.field;
            if (!field) throw ConfigError("\"" + s + "\" needs beta to be given as an algebraic number");
            exact = Scalar::from_coeffs(field, parse_polynomial(s));
        } else {
            exact = Scalar(parse_rational(s));
        }
    } else {
        throw ConfigError("expected a number, got " + j.dump());
    }
    if (!mode.exact()) return Scalar::from_float(exact.to_double(), mode.eps);
    if (mode.field && exact.is_rational()) return mode.lift(exact.rational());
    return exact;
}

namespace {

Cell parse_cell(const json& j, const NumericMode& mode)
{
    if (!j.is_array() || j.empty() || j.size() > 2) throw ConfigError("a cell is a list of 1 or 2 [lo, hi] pairs");
    std::vector<Interval> axes;
    for (const auto& a : j) {
        if (!a.is_array() || a.size() != 2) throw ConfigError("axis must be [lo, hi]");
        axes.push_back({parse_scalar(a[0], mode), parse_scalar(a[1], mode)});
    }
    return Cell(std::move(axes));
}

Convention convention_of(const json& config)
{
    std::string measure = config.value("measure", std::string("normalized"));
    if (measure != "normalized" && measure != "raw")
        throw ConfigError("measure must be \"normalized\" or \"raw\"; per-cell weights are not supported");
    return parse_convention(measure);
}

} // namespace

PartitionMap build_map(const json& config)
{
    if (!config.is_object()) throw ConfigError("map configuration must be an object");
    const Convention conv = convention_of(config);
    const std::string mode_name = config.value("mode", std::string("auto"));
    if (mode_name != "auto" && mode_name != "exact" && mode_name != "float")
        throw ConfigError("mode must be exact or float");
    const double eps = config.value("eps", Scalar::kDefaultEps);

    std::optional<BetaSpec> beta;
    if (config.contains("beta") && !config.at("beta").is_null()) beta = parse_beta(config.at("beta"));
    bool floating = mode_name == "float" || (mode_name == "auto" && beta && !beta->field);

    std::optional<Scalar> beta_scalar;
    NumericMode mode = NumericMode::exact_rational();
    if (beta) {
        if (floating) {
            double v = beta->field ? beta->field->root_approx() : *beta->value;
            beta_scalar = Scalar::from_float(v, eps);
            mode = NumericMode::floating(eps);
        } else if (beta->field) {
            beta_scalar = Scalar::generator(beta->field);
            mode = NumericMode::exact_field(beta->field);
        } else {
            // A decimal beta in exact mode is the rational it spells.
            beta_scalar = Scalar(parse_rational(shortest(*beta->value)));
        }
    } else if (floating) {
        mode = NumericMode::floating(eps);
    }

    if (config.contains("preset")) {
        PresetParams params;
        params.beta = beta_scalar;
        params.convention = conv;
        params.symbols = config.value("symbols", std::size_t{2});
        const std::string name = config.at("preset").get<std::string>();
        auto names = preset_names();
        if (std::find(names.begin(), names.end(), name) == names.end()) throw ConfigError("unknown preset " + name);
        return preset(name, params);
    }
    if (config.contains("custom")) {
        const json& c = config.at("custom");
        Cell ambient = parse_cell(c.at("ambient"), mode);
        std::vector<Cell> cells;
        for (const auto& cj : c.at("cells")) cells.push_back(parse_cell(cj, mode));
        std::vector<std::vector<AffineAxis>> actions;
        for (const auto& bj : c.at("branches")) {
            const auto& sc = bj.at("scale");
            const auto& of = bj.at("offset");
            if (sc.size() != ambient.dim() || of.size() != ambient.dim())
                throw ConfigError("branch scale/offset must match the ambient dimension");
            std::vector<AffineAxis> axes;
            for (std::size_t i = 0; i < sc.size(); ++i)
                axes.push_back({parse_scalar(sc[i], mode), parse_scalar(of[i], mode)});
            actions.push_back(std::move(axes));
        }
        if (actions.size() != cells.size()) throw ConfigError("one branch per cell is required");
        PartitionMap map(c.value("name", std::string("custom")), std::move(ambient), std::move(cells),
                         std::move(actions), mode, conv);
        if (beta_scalar) map.beta = beta_scalar;
        return map;
    }
    throw ConfigError("map configuration needs \"preset\" or \"custom\"");
}

json Scenario::canonical() const
{
    return json{{"map", map_config},
                {"options",
                 {{"max_depth", options.max_depth},
                  {"max_levels", options.max_levels},
                  {"n_cesaro", options.n_cesaro},
                  {"tol", options.tol},
                  {"seed", options.seed},
                  {"samples", options.samples},
                  {"return_cap", options.return_cap},
                  {"depth_cap", options.depth_cap},
                  {"mass_ns", options.mass_ns}}}};
}

Scenario parse_scenario(const json& j)
{
    Scenario s;
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    s.map_config = j.contains("map") ? j.at("map") : j;
    if (s.map_config.is_object()) {
        for (const char* k : {"options", "out"}) s.map_config.erase(k);
    }
    if (j.contains("options")) {
        const json& o = j.at("options");
        PipelineOptions& p = s.options;
        p.max_depth = o.value("max_depth", p.max_depth);
        p.max_levels = o.value("max_levels", p.max_levels);
        p.n_cesaro = o.value("n_cesaro", p.n_cesaro);
        p.tol = o.value("tol", p.tol);
        p.seed = o.value("seed", p.seed);
        p.samples = o.value("samples", p.samples);
        p.return_cap = o.value("return_cap", p.return_cap);
        p.depth_cap = o.value("depth_cap", p.depth_cap);
        p.mass_ns = o.value("mass_ns", p.mass_ns);
    }
    if (j.contains("out")) s.out_dir = j.at("out").get<std::string>();
    const PipelineOptions& p = s.options;
    if (p.max_depth < 1 || p.max_levels < 1) throw ConfigError("max_depth and max_levels must be at least 1");
    if (p.n_cesaro < 1) throw ConfigError("n_cesaro must be at least 1");
    if (!(p.tol > 0)) throw ConfigError("tol must be positive");
    if (p.return_cap < 1) throw ConfigError("return_cap must be at least 1");
    return s;
}

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

json scalar_json(const Scalar& s) { return s.to_string(); }

json cell_json(const Cell& c)
{
    json out = json::array();
    for (const auto& a : c.axes()) out.push_back({a.lo.to_string(), a.hi.to_string()});
    return out;
}

json tower_json(const TowerGraph& graph)
{
    json levels = json::array();
    for (const auto& l : graph.levels())
        levels.push_back({{"id", l.id}, {"cell", cell_json(l.cell)}, {"j", l.partition_index}, {"depth", l.depth},
                          {"word", l.word}});
    json edges = json::array();
    for (const auto& e : graph.edges()) edges.push_back({e.from, e.to, e.branch});
    json out{{"levels", levels}, {"edges", edges}, {"finite", graph.finite()},
             {"max_depth", graph.options().max_depth}, {"max_levels", graph.options().max_levels}};
    if (!graph.finite()) out["truncated"] = graph.truncated_levels();
    out["warnings"] = graph.warnings;
    return out;
}

std::string adjacency_text(const TowerGraph& graph)
{
    std::ostringstream os;
    for (const auto& l : graph.levels()) {
        os << l.id << ":";
        for (LevelId v : graph.successors(l.id)) os << ' ' << v;
        os << '\n';
    }
    return os.str();
}

std::string measures_csv(const TowerGraph& graph, const LevelMeasure& m)
{
    std::ostringstream os;
    os << "id,depth,j,mu_bar,rho,mu_hat,mu_bar_float,rho_float,mu_hat_float\n";
    for (const auto& l : graph.levels()) {
        std::size_t i = l.id - 1;
        os << l.id << ',' << l.depth << ',' << l.partition_index << ',' << csv_escape(m.mu_bar[i].to_string()) << ','
           << csv_escape(m.rho[i].to_string()) << ',' << csv_escape(m.mu_hat[i].to_string()) << ','
           << shortest(m.mu_bar[i].to_double()) << ',' << shortest(m.rho[i].to_double()) << ','
           << shortest(m.mu_hat[i].to_double()) << '\n';
    }
    return os.str();
}

std::string transitions_csv(const LevelMeasure& m)
{
    std::ostringstream os;
    os << "t,u,p,p_float\n";
    for (const auto& t : m.transitions)
        os << t.from << ',' << t.to << ',' << csv_escape(t.p.to_string()) << ',' << shortest(t.p.to_double()) << '\n';
    return os.str();
}

std::string returns_csv(const std::vector<ReturnPartition>& partitions)
{
    std::ostringstream os;
    os << "u,n,path,weight_exact,weight_float\n";
    for (const auto& part : partitions) {
        for (const auto& a : part.atoms)
            os << part.base << ',' << a.time << ',' << path_text(a.path) << ',' << csv_escape(a.weight.to_string())
               << ',' << shortest(a.weight.to_double()) << '\n';
        os << part.base << ",tail,," << csv_escape(part.tail.to_string()) << ',' << shortest(part.tail.to_double()) << '\n';
    }
    return os.str();
}

json mixing_json(const MixingReport& rep)
{
    json out{{"support", rep.support},
             {"irreducible", rep.irreducible},
             {"period", rep.period},
             {"cycle_lengths", rep.cycle_lengths},
             {"verdict", rep.verdict},
             {"annotations", rep.annotations}};
    out["entropy_nats"] = rep.entropy_nats ? json(*rep.entropy_nats) : json(nullptr);
    return out;
}

std::string liftability_csv(const MassProfile& profile)
{
    std::ostringstream os;
    os << "depth_cap,n,mass\n";
    for (std::size_t i = 0; i < profile.n.size(); ++i)
        os << profile.depth_cap << ',' << profile.n[i] << ',' << shortest(profile.mass[i]) << '\n';
    return os.str();
}

std::string trajectory_csv(const Orbit& orbit)
{
    std::ostringstream os;
    std::size_t dim = orbit.points.empty() ? 1 : orbit.points.front().x.size();
    os << "step,level";
    for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
    os << ",y,flagged\n";
    for (std::size_t k = 0; k < orbit.points.size(); ++k) {
        const auto& z = orbit.points[k];
        bool flag = std::find(orbit.flagged.begin(), orbit.flagged.end(), k) != orbit.flagged.end();
        os << k << ',' << z.level;
        for (const auto& c : z.x) os << ',' << shortest(c.to_double());
        os << ',' << shortest(z.y.to_double()) << ',' << (flag ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string rugs_svg(const RugSet& rugs, const std::string& title)
{
    const auto& all = rugs.rugs();
    const PartitionMap& map = rugs.map();
    // The horizontal extent of a panel is the cell's last axis (the point coordinate in dimension 2).
    const std::size_t axis = map.dim() - 1;
    const double span = map.ambient().axis(axis).length().to_double();
    double max_height = 0;
    for (const auto& r : all) max_height = std::max(max_height, r.height.to_double());
    if (max_height <= 0) max_height = 1;

    const double panel_w = 180, panel_h = 180, gap = 30, margin = 40, legend_h = 24;
    std::vector<const Rug*> shown;
    for (const auto& r : all)
        if (r.height.sign() > 0) shown.push_back(&r);
    const double width = margin * 2 + static_cast<double>(shown.size()) * (panel_w + gap) - gap;
    const double height = margin * 2 + panel_h + legend_h * 2;
    const double sx = panel_w / span, sy = panel_h / max_height;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\"" << fixed(height)
       << "\" data-rugs=\"" << shown.size() << "\">\n";
    os << "<title>" << title << "</title>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << fixed(width) << "\" height=\"" << fixed(height) << "\" fill=\"white\"/>\n";
    double x0 = margin;
    const double floor_y = margin + panel_h;
    for (const Rug* r : shown) {
        const Interval& base = r->base.axis(axis);
        const double lo = x0 + (base.lo - map.ambient().axis(axis).lo).to_double() * sx;
        const double w = base.length().to_double() * sx;
        os << "<g class=\"rug\" data-level=\"" << r->level << "\" data-height=\"" << r->height.to_string()
           << "\" data-base=\"" << r->base.to_string() << "\">\n";
        for (const auto& s : r->strips) {
            if (s.thickness.is_zero()) continue;
            const double y_top = floor_y - (s.offset + s.thickness).to_double() * sy;
            const double h = s.thickness.to_double() * sy;
            os << "  <rect class=\"strip\" data-source=\"" << s.source << "\" data-offset=\"" << s.offset.to_string()
               << "\" data-thickness=\"" << s.thickness.to_string() << "\" x=\"" << fixed(lo) << "\" y=\""
               << fixed(y_top) << "\" width=\"" << fixed(w) << "\" height=\"" << fixed(h) << "\" fill=\""
               << kPalette[(s.source - 1) % std::size(kPalette)] << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
        }
        os << "  <rect x=\"" << fixed(x0) << "\" y=\"" << fixed(margin) << "\" width=\"" << fixed(panel_w)
           << "\" height=\"" << fixed(panel_h) << "\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"3,3\"/>\n";
        os << "  <text x=\"" << fixed(x0 + panel_w / 2) << "\" y=\"" << fixed(floor_y + 16)
           << "\" text-anchor=\"middle\" font-size=\"12\">R" << r->level << " (h=" << fixed(r->height.to_double())
           << ")</text>\n";
        os << "</g>\n";
        x0 += panel_w + gap;
    }
    double lx = margin;
    const double ly = floor_y + legend_h + 8;
    std::vector<LevelId> sources;
    for (const Rug* r : shown)
        for (const auto& s : r->strips)
            if (!s.thickness.is_zero()) sources.push_back(s.source);
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    os << "<g class=\"legend\">\n";
    for (LevelId t : sources) {
        os << "  <rect x=\"" << fixed(lx) << "\" y=\"" << fixed(ly) << "\" width=\"12\" height=\"12\" fill=\""
           << kPalette[(t - 1) % std::size(kPalette)] << "\"/>\n";
        os << "  <text x=\"" << fixed(lx + 16) << "\" y=\"" << fixed(ly + 10) << "\" font-size=\"11\">from D" << t
           << "</text>\n";
        lx += 70;
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

} // namespace hofbauer
