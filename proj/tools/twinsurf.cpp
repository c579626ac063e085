// twinsurf: residual verification, twin construction, catalog regression and conformal charts.

#include "twinsurf/catalog.hpp"
#include "twinsurf/conformal.hpp"
#include "twinsurf/io.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace twinsurf;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kDomainExit = 3, kConstruction = 4 };

struct Config {
    double kappa = 0, tau = 0, H = 0;
    int eps = 1;
    std::string grid;
    std::string bounds;
    std::string mask;
    std::string anchor;
    std::string input;
    std::string output;
    std::string report;
    std::string obj;
    std::string expect;
    std::optional<double> tol;
    int codim = 0;
    std::vector<std::string> params;
    std::string name;
    std::string ambient = "bcv";
};

std::vector<double> split_numbers(const std::string& s, std::size_t expected, const std::string& flag)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw Error(ErrorKind::kParse, "bad number '" + cell + "' in " + flag);
        }
    }
    if (expected && out.size() != expected) throw Error(ErrorKind::kParse, flag + " expects " + std::to_string(expected) + " values");
    return out;
}

std::pair<int, int> parse_grid(const std::string& s, int fallback)
{
    if (s.empty()) return {fallback, fallback};
    const auto v = split_numbers(s, 0, "--grid");
    if (v.size() == 1) return {int(v[0]), int(v[0])};
    if (v.size() == 2) return {int(v[0]), int(v[1])};
    throw Error(ErrorKind::kParse, "--grid expects N or NX,NY");
}

catalog::Params parse_params(const std::vector<std::string>& kv)
{
    catalog::Params p;
    for (const auto& s : kv) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::kParse, "--param expects key=value, got '" + s + "'");
        try {
            p[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
        } catch (const std::exception&) {
            throw Error(ErrorKind::kParse, "bad value in --param '" + s + "'");
        }
    }
    return p;
}

catalog::Params example_params(const catalog::SurfaceExample& ex, const std::vector<std::string>& kv)
{
    const catalog::Params given = parse_params(kv);
    for (const auto& [k, v] : given) {
        if (!ex.defaults.count(k)) throw Error(ErrorKind::kParse, "example '" + ex.name + "' has no parameter '" + k + "'");
    }
    return catalog::merged_params(ex, given);
}

std::optional<std::pair<double, double>> parse_anchor(const std::string& s)
{
    if (s.empty()) return std::nullopt;
    const auto v = split_numbers(s, 2, "--anchor");
    return std::make_pair(v[0], v[1]);
}

/// Applies --bounds, --mask and --anchor on top of an example's domain.
catalog::DomainSpec override_domain(catalog::DomainSpec d, const Config& c)
{
    if (!c.bounds.empty()) {
        const auto b = split_numbers(c.bounds, 4, "--bounds");
        d.xmin = b[0];
        d.xmax = b[1];
        d.ymin = b[2];
        d.ymax = b[3];
        d.anchor_x = 0.5 * (b[0] + b[1]);
        d.anchor_y = 0.5 * (b[2] + b[3]);
    }
    if (!c.mask.empty()) {
        if (c.mask == "rect") {
            d.kind = catalog::DomainKind::kRect;
        } else if (c.mask.rfind("disk:", 0) == 0) {
            d.kind = catalog::DomainKind::kDisk;
            d.r1 = split_numbers(c.mask.substr(5), 1, "--mask disk")[0];
        } else if (c.mask.rfind("slit-annulus:", 0) == 0) {
            const auto r = split_numbers(c.mask.substr(13), 2, "--mask slit-annulus");
            d.kind = catalog::DomainKind::kSlitAnnulus;
            d.r0 = r[0];
            d.r1 = r[1];
            d.anchor_x = 0.5 * (r[0] + r[1]);
            d.anchor_y = 0;
        } else {
            throw Error(ErrorKind::kParse, "unknown --mask '" + c.mask + "'");
        }
    }
    if (const auto a = parse_anchor(c.anchor)) {
        d.anchor_x = a->first;
        d.anchor_y = a->second;
    }
    return d;
}

void emit(const json& j, const std::string& path)
{
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::kParse, "cannot write '" + path + "'");
    os << text;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::kParse, "cannot write '" + path + "'");
    os << text;
}

json error_json(const std::string& command, const Error& e)
{
    json nodes = json::array();
    for (std::size_t k = 0; k < e.nodes().size() && k < 50; ++k) nodes.push_back({e.nodes()[k].i, e.nodes()[k].j});
    return {{"schema", 1},
            {"command", command},
            {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}, {"value", e.value()}, {"node_count", e.nodes().size()}, {"nodes", nodes}}}};
}

int exit_for(ErrorKind k, bool construction)
{
    switch (k) {
    case ErrorKind::kParse:
    case ErrorKind::kUnknownName: return kUsage;
    case ErrorKind::kNotAGradient:
    case ErrorKind::kLightlike:
    case ErrorKind::kNotAreaDecreasing: return construction ? kConstruction : kDomainExit;
    default: return kDomainExit;
    }
}

double default_tol(const GridHandle& g, double factor = 10)
{
    return factor * g->h() * g->h();
}

CmcParams cmc_of(const Config& c)
{
    return {c.kappa, c.tau, c.H, c.eps};
}

Signature signature_of(const Config& c)
{
    if (c.eps != 1 && c.eps != -1) throw Error(ErrorKind::kParse, "--eps must be 1 or -1");
    return c.eps == 1 ? Signature::kRiemannian : Signature::kLorentzian;
}

io::CsvTable load_input(const Config& c)
{
    if (c.input.empty()) throw Error(ErrorKind::kParse, "--input is required");
    io::CsvTable t = io::read_csv(c.input, parse_anchor(c.anchor));
    if (c.codim && c.codim != int(t.fields.size())) {
        throw Error(ErrorKind::kParse, "--codim " + std::to_string(c.codim) + " but the CSV has " + std::to_string(t.fields.size()) + " value columns");
    }
    spdlog::info("read {} nodes, {} field(s) from {}", t.grid->node_count(), t.fields.size(), c.input);
    return t;
}

// ---------------------------------------------------------------------------

int cmd_verify(const Config& c)
{
    const io::CsvTable t = load_input(c);
    ResidualReport r;
    std::string equation;
    if (t.fields.size() == 1) {
        r = core_report(cmc_residual(make_graph_data(t.fields.front(), cmc_of(c))));
        equation = "cmc";
    } else {
        const MultiGraph mg{t.fields};
        const Signature sig = signature_of(c);
        const FirstFundamental ff = first_fundamental(mg, sig);
        const SystemResidual sys = sig == Signature::kRiemannian ? minimal_system_residual(mg, ff) : maximal_system_residual(mg, ff);
        r = sys.nondivergence_report();
        equation = sig == Signature::kRiemannian ? "minimal-system" : "maximal-system";
    }
    const double tol = c.tol.value_or(default_tol(t.grid));
    const bool pass = r.max_abs <= tol;
    emit({{"schema", 1}, {"command", "verify"}, {"equation", equation}, {"report", io::to_json(r)}, {"tol", tol}, {"pass", pass}}, c.output);
    spdlog::info("verify: max residual {:.3e}, tol {:.3e}", r.max_abs, tol);
    return pass ? kOk : kFail;
}

/// Anchored max |computed - s * expected(x + dx, y + dy)| over all heights.
double compare_expected(const std::vector<ScalarField>& computed, const Config& c, json& out)
{
    const catalog::SurfaceExample& ex = catalog::find_example(c.expect);
    const catalog::Params p = example_params(ex, c.params);
    const auto fns = ex.heights(p);
    if (fns.size() != computed.size()) throw Error(ErrorKind::kDomain, "expected example has a different codimension");

    double s = 1, dx = 0, dy = 0;
    bool found = false;
    for (const auto& pair : catalog::twin_pairs()) {
        if (pair.target == c.expect) {
            s = pair.orientation, dx = pair.shift_x, dy = pair.shift_y;
            found = true;
            break;
        }
        if (pair.source == c.expect) {
            s = pair.orientation, dx = -pair.shift_x, dy = -pair.shift_y;
            found = true;
            break;
        }
    }
    auto error_for = [&](double sign) {
        double worst = 0;
        for (std::size_t k = 0; k < computed.size(); ++k) {
            const auto grid = computed[k].grid_ptr();
            ScalarField e = ScalarField::sample(grid, [&](double x, double y) { return sign * fns[k](x + dx, y + dy); });
            e -= e.at(grid->anchor());
            worst = std::max(worst, (computed[k] - e).max_abs());
        }
        return worst;
    };
    double err = error_for(s);
    if (!found) {
        const double other = error_for(-s);
        if (other < err) {
            err = other;
            s = -s;
        }
    }
    out = {{"name", c.expect}, {"orientation", s}, {"shift", {dx, dy}}, {"max_abs_error", err}};
    return err;
}

int cmd_twin(const Config& c)
{
    const io::CsvTable t = load_input(c);
    json j{{"schema", 1}, {"command", "twin"}};
    std::vector<ScalarField> twin;
    try {
        if (t.fields.size() == 1) {
            const TwinResult r = any_twin_transform(make_graph_data(t.fields.front(), cmc_of(c)));
            twin = {r.g};
            j["twin_params"] = {{"kappa", r.params.kappa}, {"tau", r.params.tau}, {"H", r.params.H}, {"eps", r.params.epsilon}};
            j["curl"] = io::to_json(r.curl_report);
            j["dual_pde"] = io::to_json(r.dual_pde_report);
            j["spacelike_margin"] = r.spacelike_margin;
            j["path_discrepancy"] = r.path_discrepancy;
        } else {
            const CodimTwinResult r = twin_transform_codim(MultiGraph{t.fields}, signature_of(c));
            twin = r.twin.f;
            ResidualReport curl;
            for (const auto& cr : r.curl) curl = curl.node_count ? merge(curl, cr) : cr;
            j["twin_signature"] = r.signature == Signature::kRiemannian ? "riemannian" : "lorentzian";
            j["curl"] = io::to_json(curl);
            j["dual_system"] = io::to_json(r.dual_system);
            j["spacelike_margin"] = r.spacelike_margin;
            j["path_discrepancy"] = r.path_discrepancy;
        }
    } catch (const Error& e) {
        const int code = exit_for(e.kind(), true);
        emit(error_json("twin", e), c.report);
        spdlog::error("twin: {}", e.what());
        return code;
    }

    if (!c.output.empty()) io::write_csv(c.output, twin);
    if (!c.obj.empty()) {
        write_text(c.obj + ".source.obj", catalog::export_mesh(t.fields));
        write_text(c.obj + ".twin.obj", catalog::export_mesh(twin));
    }
    int code = kOk;
    if (!c.expect.empty()) {
        json ej;
        const double err = compare_expected(twin, c, ej);
        const double tol = c.tol.value_or(default_tol(t.grid));
        ej["tol"] = tol;
        ej["pass"] = err <= tol;
        j["expect"] = ej;
        if (!(err <= tol)) code = kFail;
    }
    emit(j, c.report);
    return code;
}

int cmd_catalog_list(bool as_json)
{
    if (as_json) {
        json arr = json::array();
        for (const auto& ex : catalog::list_examples()) {
            const auto amb = ex.ambient(ex.defaults);
            arr.push_back({{"name", ex.name},
                           {"description", ex.description},
                           {"space", amb.space},
                           {"codim", amb.codim},
                           {"cmc", {{"kappa", amb.cmc.kappa}, {"tau", amb.cmc.tau}, {"H", amb.cmc.H}, {"eps", amb.cmc.epsilon}}},
                           {"params", ex.defaults},
                           {"expected_twin", ex.expected_twin ? json(*ex.expected_twin) : json(nullptr)}});
        }
        std::cout << json{{"schema", 1}, {"examples", arr}}.dump(2) << "\n";
        return kOk;
    }
    for (const auto& ex : catalog::list_examples()) {
        const auto amb = ex.ambient(ex.defaults);
        std::cout << ex.name << "  [" << amb.space << "]  twin: " << ex.expected_twin.value_or("-") << "\n    " << ex.description;
        for (const auto& [k, v] : ex.defaults) std::cout << "  " << k << "=" << v;
        std::cout << "\n";
    }
    return kOk;
}

int cmd_catalog_check(const std::string& name, const Config& c)
{
    const int n = parse_grid(c.grid, 201).first;
    std::vector<catalog::TwinPair> pairs;
    if (name == "all") {
        pairs = catalog::twin_pairs();
    } else {
        pairs = catalog::pairs_for(name);
        if (pairs.empty()) {
            spdlog::error("example '{}' has no registered twin pair", name);
            return kUsage;
        }
    }
    bool all = true;
    json arr = json::array();
    for (const auto& p : pairs) {
        try {
            const auto r = catalog::check_pair(p, n);
            spdlog::info("{}: {:.2f} s", r.label, r.seconds);
            all = all && r.pass;
            std::printf("%s  %-62s fwd %.3e (x%.2f)  inv %.3e (x%.2f)  invol %.3e  tol %.3e\n", r.pass ? "PASS" : "FAIL",
                        r.label.c_str(), r.forward_error, r.forward_ratio, r.inverse_error, r.inverse_ratio, r.involution_error, r.tol);
            arr.push_back({{"label", r.label}, {"pass", r.pass}, {"forward_error", r.forward_error}, {"inverse_error", r.inverse_error},
                           {"forward_ratio", r.forward_ratio}, {"inverse_ratio", r.inverse_ratio}, {"involution_error", r.involution_error},
                           {"tol", r.tol}, {"involution_tol", r.involution_tol}, {"h", r.h}});
        } catch (const Error& e) {
            all = false;
            std::printf("FAIL  %-62s %s: %s\n", p.label.c_str(), to_string(e.kind()), e.what());
            arr.push_back({{"label", p.label}, {"pass", false}, {"error", e.what()}});
        }
    }
    if (!c.report.empty()) emit({{"schema", 1}, {"command", "catalog check"}, {"grid", n}, {"pairs", arr}}, c.report);
    return all ? kOk : kFail;
}

int cmd_catalog_eval(const std::string& name, const Config& c)
{
    const catalog::SurfaceExample& ex = catalog::find_example(name);
    const catalog::Params p = example_params(ex, c.params);
    const auto [nx, ny] = parse_grid(c.grid, 201);
    const GridHandle grid = catalog::make_domain_grid(override_domain(ex.domain(p), c), nx, ny);
    const auto heights = catalog::sample_heights(ex, p, grid);
    if (!c.output.empty()) {
        io::write_csv(c.output, heights);
    } else {
        std::cout << io::to_csv(heights);
    }
    if (!c.obj.empty()) write_text(c.obj, catalog::export_mesh(heights));
    const auto amb = ex.ambient(p);
    spdlog::info("{} on {} nodes, ambient {} (kappa={}, tau={}, H={}, eps={})", name, grid->node_count(), amb.space, amb.cmc.kappa,
                 amb.cmc.tau, amb.cmc.H, amb.cmc.epsilon);
    return kOk;
}

int cmd_conformal(const Config& c)
{
    const io::CsvTable t = load_input(c);
    const MultiGraph mg{t.fields};
    json j{{"schema", 1}, {"command", "conformal"}};
    try {
        if (signature_of(c) != Signature::kRiemannian) throw Error(ErrorKind::kParse, "conformal expects a minimal (eps = 1) input");
        const FirstFundamental ff = first_fundamental(mg, Signature::kRiemannian);
        const CodimTwinResult tw = twin_transform_codim(mg, Signature::kRiemannian);
        const ConformalChart chart = build_conformal_chart(mg, ff);
        const WeierstrassData wf = weierstrass_data(chart, mg, Signature::kRiemannian);
        const WeierstrassData wg = weierstrass_data(chart, tw.twin, Signature::kLorentzian);
        const WeierstrassData wr = weierstrass_data(chart, reflect_heights(tw.twin), Signature::kLorentzian);
        j["J_psi_min"] = chart.J_psi.min_value();
        j["xi_nodes"] = chart.xi_grid->node_count();
        j["dropped_nodes"] = chart.dropped_nodes;
        j["conformality"] = io::to_json(conformality_residual(chart, mg, Signature::kRiemannian));
        j["conformality_twin"] = io::to_json(conformality_residual(chart, tw.twin, Signature::kLorentzian));
        j["nullity"] = io::to_json(nullity_residual(wf));
        j["nullity_twin"] = io::to_json(nullity_residual(wg));
        j["twin_relation"] = io::to_json(weierstrass_twin_residual(wf, wg));
        j["twin_relation_reflected"] = io::to_json(weierstrass_twin_residual(wf, wr));
        if (!c.output.empty()) {
            std::filesystem::create_directories(c.output);
            write_text(c.output + "/phi.csv", io::weierstrass_csv(wf));
            write_text(c.output + "/phi_twin.csv", io::weierstrass_csv(wg));
            emit(j, c.output + "/report.json");
        }
    } catch (const Error& e) {
        emit(error_json("conformal", e), c.report);
        spdlog::error("conformal: {}", e.what());
        return exit_for(e.kind(), true);
    }
    emit(j, c.report);
    return kOk;
}

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("twinsurf");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("TWINSURF_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

void add_ambient(CLI::App* app, Config& c)
{
    app->add_option("--kappa", c.kappa, "base curvature");
    app->add_option("--tau", c.tau, "bundle curvature");
    app->add_option("--H", c.H, "mean curvature");
    app->add_option("--eps", c.eps, "1 Riemannian, -1 Lorentzian")->check(CLI::IsMember({1, -1}));
    app->add_option("--codim", c.codim, "expected number of height columns");
    app->add_option("--anchor", c.anchor, "X,Y anchor for integration");
    app->add_option("--tol", c.tol, "tolerance override");
    app->add_option("--ambient", c.ambient, "ambient family (bcv)")->check(CLI::IsMember({"bcv", "flat"}));
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();
    CLI::App app{"twinsurf: twin correspondences for CMC, minimal and maximal graphs"};
    app.require_subcommand(1);
    Config c;

    auto* verify = app.add_subcommand("verify", "residual of an input graph (CSV)");
    add_ambient(verify, c);
    verify->add_option("--input", c.input, "input CSV")->required();
    verify->add_option("--output", c.output, "report JSON (default stdout)");

    auto* twin = app.add_subcommand("twin", "construct the twin of an input graph (CSV)");
    add_ambient(twin, c);
    twin->add_option("--input", c.input, "input CSV")->required();
    twin->add_option("--output", c.output, "twin CSV");
    twin->add_option("--report", c.report, "report JSON (default stdout)");
    twin->add_option("--obj", c.obj, "write BASE.source.obj and BASE.twin.obj");
    twin->add_option("--expect", c.expect, "compare with a catalog example");
    twin->add_option("--param", c.params, "key=value parameter for --expect");

    auto* cat = app.add_subcommand("catalog", "example registry and pair regression");
    cat->require_subcommand(1);
    bool list_json = false;
    auto* list = cat->add_subcommand("list", "print the registry");
    list->add_flag("--json", list_json, "JSON output");
    auto* check = cat->add_subcommand("check", "run the twin-pair regression for NAME or all");
    check->add_option("name", c.name, "example name or 'all'")->required();
    check->add_option("--grid", c.grid, "N (nodes per axis)");
    check->add_option("--report", c.report, "JSON report path");
    auto* eval = cat->add_subcommand("eval", "sample an example to CSV");
    eval->add_option("name", c.name, "example name")->required();
    eval->add_option("--grid", c.grid, "N or NX,NY");
    eval->add_option("--bounds", c.bounds, "XMIN,XMAX,YMIN,YMAX");
    eval->add_option("--mask", c.mask, "rect | disk:R | slit-annulus:R0,R1");
    eval->add_option("--anchor", c.anchor, "X,Y");
    eval->add_option("--param", c.params, "key=value");
    eval->add_option("--output", c.output, "CSV path (default stdout)");
    eval->add_option("--obj", c.obj, "OBJ path");

    auto* conf = app.add_subcommand("conformal", "simultaneous conformal chart and Weierstrass data");
    add_ambient(conf, c);
    conf->add_option("--input", c.input, "minimal graph CSV")->required();
    conf->add_option("--output", c.output, "directory for phi.csv, phi_twin.csv, report.json");
    conf->add_option("--report", c.report, "report JSON (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify(c);
        if (twin->parsed()) return cmd_twin(c);
        if (conf->parsed()) return cmd_conformal(c);
        if (list->parsed()) return cmd_catalog_list(list_json);
        if (check->parsed()) return cmd_catalog_check(c.name, c);
        if (eval->parsed()) return cmd_catalog_eval(c.name, c);
    } catch (const Error& e) {
        spdlog::error("{}: {}", to_string(e.kind()), e.what());
        std::cerr << "error: " << e.what() << "\n";
        return exit_for(e.kind(), false);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomainExit;
    }
    return kUsage;
}
