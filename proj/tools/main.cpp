// acsens: accuracy and sensitivity of binary classifiers from the command line.
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "acsens/adversary_sim.hpp"
#include "acsens/boundary_solver.hpp"
#include "acsens/csv.hpp"
#include "acsens/param_designer.hpp"
#include "acsens/theory_checks.hpp"
#include "acsens/tradeoff.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace acsens;

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

HypothesisPair preset_pair(const std::string& name) {
    if (name == "table1" || name == "fig2a" || name == "fig2b")
        return {DensityModel::gaussian(0, 9), DensityModel::gaussian(9, 4), 0.5};
    if (name == "fig2c") return {DensityModel::gaussian(0, 4), DensityModel::gaussian(5, 3), 0.5};
    throw InvalidParameter("unknown preset '" + name + "' (expected table1 or fig2c)");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidParameter(path + ": " + e.what());
    }
}

struct ProblemArgs {
    std::string problem;
    std::string preset;

    void add(CLI::App* app) {
        app->add_option("--problem", problem, "Hypothesis pair JSON file");
        app->add_option("--preset", preset, "Built-in pair: table1 | fig2c");
    }
    HypothesisPair load() const {
        if (!problem.empty() && !preset.empty()) throw InvalidParameter("give either --problem or --preset");
        if (!preset.empty()) return preset_pair(preset);
        if (problem.empty()) throw InvalidParameter("--problem or --preset is required");
        try {
            return HypothesisPair::from_json(read_json_file(problem));
        } catch (const InvalidParameter& e) {
            throw InvalidParameter(problem + ": " + e.what());
        }
    }
};

void emit(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-") {
        std::cout << content;
        return;
    }
    const fs::path p(out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InvalidParameter("cannot write '" + out + "'");
    f << content;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidParameter("not a number: '" + item + "'");
        }
    }
    return v;
}

struct ParsedClassifier {
    BoundarySet boundaries;
    json descriptor;
};

// ml:<eta> | linear:<y>[:orientation] | general:<y1,y2,...>[:orientation]
ParsedClassifier parse_classifier(const std::string& spec, const HypothesisPair& pair) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw InvalidParameter("classifier '" + spec + "': expected kind:value");
    const std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    Orientation o = Orientation::H0First;
    if (const auto c2 = rest.find(':'); c2 != std::string::npos) {
        o = orientation_from_string(rest.substr(c2 + 1));
        rest = rest.substr(0, c2);
    }
    const auto values = parse_list(rest);
    if (kind == "ml") {
        if (values.size() != 1) throw InvalidParameter("classifier 'ml' takes one threshold");
        const auto spec_ml = resolve_ml(pair, values[0]);
        return {spec_ml.boundary_set(), spec_ml.to_json()};
    }
    if (values.empty()) throw InvalidParameter("classifier '" + kind + "' needs boundaries");
    if (kind == "linear") {
        if (values.size() != 1) throw InvalidParameter("classifier 'linear' takes one boundary");
        const auto c = ClassifierSpec::linear(values[0], o);
        return {c.boundary_set(), c.to_json()};
    }
    if (kind == "general") {
        const auto c = ClassifierSpec::general(BoundarySet(values, o));
        return {c.boundary_set(), c.to_json()};
    }
    throw InvalidParameter("unknown classifier kind '" + kind + "' (expected ml, linear or general)");
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
}

std::string config_line(const json& cfg) { return "# config: " + cfg.dump() + "\n"; }

void check_format(const std::string& f, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (f == a) return;
    throw InvalidParameter("unsupported --format '" + f + "'");
}

// ---------------------------------------------------------------- boundaries

struct BoundariesCmd {
    ProblemArgs problem;
    double eta = 1.0;
    std::string format = "text";
    std::string out;

    int run() const {
        check_format(format, {"text", "json", "csv"});
        const auto pair = problem.load();
        const auto rep = ml_boundaries(pair, eta);
        const json cfg{{"command", "boundaries"}, {"problem", pair.to_json()}, {"eta", eta}};
        std::ostringstream o;
        if (format == "json") {
            o << json{{"config", cfg}, {"report", rep.to_json()}}.dump(2) << '\n';
        } else if (format == "csv") {
            write_comment_header(o, {{"config", cfg}});
            o << "root,residual\n";
            for (std::size_t i = 0; i < rep.roots.size(); ++i)
                o << format_number(rep.roots[i]) << ','
                  << format_number(i < rep.residuals.size() ? rep.residuals[i] : 0.0) << '\n';
        } else {
            o << config_line(cfg);
            o << "roots: " << join(rep.roots) << '\n';
            o << "leftmost: " << to_string(rep.orientation) << '\n';
            o << "method: " << to_string(rep.method) << '\n';
        }
        emit(out, o.str());
        return 0;
    }
};

// ---------------------------------------------------- accuracy / sensitivity

struct EvalCmd {
    ProblemArgs problem;
    std::string classifier = "ml:1";
    std::string norm = "inf";
    std::string format = "text";
    std::string out;
    bool with_sensitivity = false;

    int run() const {
        check_format(format, {"text", "json"});
        const auto pair = problem.load();
        const auto c = parse_classifier(classifier, pair);
        const Norm n = norm_from_string(norm);
        json cfg{{"command", with_sensitivity ? "sensitivity" : "accuracy"},
                 {"problem", pair.to_json()},
                 {"classifier", c.descriptor}};
        if (with_sensitivity) cfg["norm"] = to_string(n);
        json res{{"boundaries", c.boundaries.to_json()}, {"accuracy", accuracy(c.boundaries, pair)}};
        if (with_sensitivity) {
            res["sensitivity"] = sensitivity(c.boundaries, pair, n);
            res["gradient"] = accuracy_gradient(c.boundaries, pair);
        }
        std::ostringstream o;
        if (format == "json") {
            o << json{{"config", cfg}, {"result", res}}.dump(2) << '\n';
        } else {
            o << config_line(cfg);
            o << "boundaries: " << join(c.boundaries.boundaries()) << " (" << to_string(c.boundaries.orientation())
              << ")\n";
            o << "accuracy: " << format_number(res["accuracy"].get<double>()) << '\n';
            if (with_sensitivity) {
                o << "sensitivity: " << format_number(res["sensitivity"].get<double>()) << '\n';
                o << "gradient: [" << join(res["gradient"].get<std::vector<double>>()) << "]\n";
            }
        }
        emit(out, o.str());
        return 0;
    }
};

// --------------------------------------------------------------------- curve

struct CurveArgs {
    std::string norm = "inf";
    std::string eta_grid;
    std::string y_grid;
    std::string zeta_grid;
    std::size_t zeta_steps = 60;
    std::size_t grid = 600;
    std::size_t boundaries = 2;

    void add(CLI::App* app) {
        app->add_option("--norm", norm, "inf | two")->capture_default_str();
        app->add_option("--eta-grid", eta_grid, "Comma-separated thresholds (ml); default 400 log-spaced + 1");
        app->add_option("--y-grid", y_grid, "Comma-separated boundaries (linear); default 2001 uniform");
        app->add_option("--zeta-grid", zeta_grid, "Comma-separated accuracy targets (general)");
        app->add_option("--zeta-steps", zeta_steps, "Uniform targets from 0.5 to the max accuracy")->capture_default_str();
        app->add_option("--grid", grid, "Stage-1 grid per axis (general, n = 2)")->capture_default_str();
        app->add_option("--boundaries", boundaries, "Boundaries of the general classifier")->capture_default_str();
    }
};

TradeoffCurve build_curve(const std::string& kind, const HypothesisPair& pair, const CurveArgs& a,
                          bool grid_given) {
    const Norm n = norm_from_string(a.norm);
    TradeoffCurve c;
    if (kind == "ml") {
        const auto g = a.eta_grid.empty() && !grid_given ? default_eta_grid() : parse_list(a.eta_grid);
        c = ml_curve(pair, g, n);
        c.metadata["eta_grid_size"] = g.size();
    } else if (kind == "linear") {
        const auto g = a.y_grid.empty() && !grid_given ? default_linear_grid(pair) : parse_list(a.y_grid);
        c = linear_curve(pair, g, n);
        c.metadata["y_grid_size"] = g.size();
    } else if (kind == "general") {
        const auto g = a.zeta_grid.empty() && !grid_given ? default_zeta_grid(pair, a.zeta_steps)
                                                          : parse_list(a.zeta_grid);
        GeneralCurveOptions opt;
        opt.grid = a.grid;
        opt.n_boundaries = a.boundaries;
        c = general_curve(pair, g, n, opt);
    } else {
        throw InvalidParameter("unknown curve kind '" + kind + "' (expected ml, linear or general)");
    }
    c.metadata["problem"] = pair.to_json();
    return c;
}

tools::Series to_series(const TradeoffCurve& c, const std::string& name, const std::string& color, bool dashed) {
    tools::Series s{name, {}, {}, color, dashed};
    for (const auto& p : c.points) {
        s.x.push_back(p.accuracy);
        s.y.push_back(p.sensitivity);
    }
    return s;
}

struct CurveCmd {
    ProblemArgs problem;
    CurveArgs args;
    std::string kind;
    std::string format = "csv";
    std::string out;
    CLI::App* app = nullptr;

    int run() const {
        check_format(format, {"csv", "json", "svg"});
        const auto pair = problem.load();
        const bool grid_given = app->count("--eta-grid") + app->count("--y-grid") + app->count("--zeta-grid") > 0;
        auto c = build_curve(kind, pair, args, grid_given);
        c.metadata["command"] = "curve " + kind;
        std::ostringstream o;
        if (format == "csv") {
            c.write_csv(o);
        } else if (format == "json") {
            o << c.to_json().dump(2) << '\n';
        } else {
            tools::Plot p{kind + " classifier tradeoff", "accuracy", "sensitivity (" + to_string(c.norm) + ")",
                          {to_series(c, kind, "#1f77b4", false)}, {}, c.metadata};
            o << tools::render_svg(p);
        }
        emit(out, o.str());
        return 0;
    }
};

// --------------------------------------------------------------------- check

std::string a1_line(const A1Result& a1) {
    switch (a1.verdict) {
        case A1Verdict::Holds:
            return "A1: PASS (unique max component " + std::to_string(a1.index_j) + ", gap " + format_number(a1.gap) + ")";
        case A1Verdict::Fragile:
            return "A1: FRAGILE (gap " + format_number(a1.gap) + " below tolerance)";
        case A1Verdict::Fails:
            break;
    }
    const std::string count = a1.max_count == 2 ? "two" : std::to_string(a1.max_count);
    return "A1: FAIL (" + count + " max components)";
}

std::string witness_line(const char* label, const GradientWitness& w) {
    std::string s = std::string("Witness (") + label + "): ";
    if (!w.verdict_available) return s + "not available (sensitivity not differentiable)";
    s += w.nonzero ? "dS/dy nonzero" : "dS/dy vanishes";
    s += " (|dS/dy| = " + format_number(w.gradient_norm) + "), identity residual " + format_number(w.identity_residual);
    s += w.probe_reduces ? ", descent step found" : ", no descent step";
    return s;
}

struct CheckCmd {
    ProblemArgs problem;
    std::string format = "text";
    std::string out;

    int run() const {
        check_format(format, {"text", "json"});
        const auto pair = problem.load();
        const auto r = check_assumptions(pair);
        const json cfg{{"command", "check"}, {"problem", pair.to_json()}, {"options", r.options.to_json()}};
        std::ostringstream o;
        if (format == "json") {
            o << json{{"config", cfg}, {"report", r.to_json()}}.dump(2) << '\n';
        } else {
            o << config_line(cfg);
            o << "y*: " << join(r.y_star) << '\n';
            o << "dA/dtheta: [" << join(r.a1.gradient) << "]\n";
            o << a1_line(r.a1) << '\n';
            o << "A2: " << (r.a2.holds ? "PASS" : "FAIL") << " (boundary " << r.a2.witness_index << ", w dy/dtheta "
              << format_number(r.a2.witness_value) << ")\n";
            if (!r.a3.precondition_met)
                o << "A3: SKIPPED (requires A1)\n";
            else
                o << "A3: " << (r.a3.holds ? "PASS" : "FAIL") << " (inner product "
                  << format_number(r.a3.inner_product) << ")\n";
            o << witness_line("inf", r.witness_inf) << '\n';
            o << witness_line("two", r.witness_two) << '\n';
        }
        emit(out, o.str());
        return 0;
    }
};

// ------------------------------------------------------------------ simulate

struct SimulateCmd {
    ProblemArgs problem;
    std::string scenario_name = "s1";
    std::string perturbation;
    std::string classifier = "ml:1";
    std::uint64_t seed = 42;
    std::size_t n_obs = 10000;
    std::size_t n_trials = 100;
    std::size_t threads = 0;
    std::string format = "text";
    std::string out;

    int run() const {
        check_format(format, {"text", "json", "csv"});
        const auto pair = problem.load();
        const auto c = parse_classifier(classifier, pair);
        const auto pert = perturbation.empty() ? scenario(scenario_name)
                                               : PerturbationSpec::from_json(read_json_file(perturbation));
        ExperimentOptions opt;
        opt.n_obs = n_obs;
        opt.n_trials = n_trials;
        opt.base_seed = seed;
        opt.threads = threads;
        const auto r = run_experiment(pair, c.boundaries, pert, opt);
        const json cfg{{"command", "simulate"},
                       {"problem", pair.to_json()},
                       {"classifier", c.descriptor},
                       {"scenario", perturbation.empty() ? scenario_name : perturbation},
                       {"experiment", opt.to_json()}};
        std::ostringstream o;
        if (format == "json") {
            o << json{{"config", cfg}, {"report", r.to_json()}}.dump(2) << '\n';
        } else if (format == "csv") {
            write_comment_header(o, {{"config", cfg}});
            r.write_csv(o);
        } else {
            char buf[256];
            o << config_line(cfg);
            o << "classifier       nominal_A  S_inf    mean_A   std_A    analytic_A  3SE\n";
            std::snprintf(buf, sizeof buf, "%-16s %.4f     %.4f   %.4f   %.4f   %.4f      %.4f\n",
                          classifier.c_str(), accuracy(c.boundaries, pair),
                          sensitivity(c.boundaries, pair, Norm::Inf), r.mean_accuracy, r.std_accuracy,
                          r.analytic_accuracy, 3 * r.standard_error);
            o << buf;
        }
        emit(out, o.str());
        return 0;
    }
};

// -------------------------------------------------------------------- design

struct DesignCmd {
    std::string box;
    std::optional<double> gamma;
    std::string gammas;
    std::string norm;
    std::size_t multistarts = 30;
    std::string format = "csv";
    std::string out;

    int run() const {
        check_format(format, {"csv", "json"});
        ParamDesignProblem p = box.empty() ? gaussian_design_box(0.9) : ParamDesignProblem::from_json(read_json_file(box));
        if (gamma) p.gamma = *gamma;
        if (!norm.empty()) p.norm = norm_from_string(norm);
        p.validate();
        DesignOptions opt;
        opt.multistarts = multistarts;
        const auto gs = gammas.empty() ? std::vector<double>{p.gamma} : parse_list(gammas);
        const auto rows = gamma_sweep(p, gs, opt);
        const json cfg{{"command", "design"}, {"problem", p.to_json()}, {"options", opt.to_json()},
                       {"theta_names", p.base.theta_names()}};
        std::ostringstream o;
        if (format == "json") {
            json rs = json::array();
            for (const auto& r : rows) rs.push_back({{"gamma", r.gamma}, {"result", r.result.to_json()}});
            o << json{{"config", cfg}, {"rows", rs}}.dump(2) << '\n';
        } else {
            write_sweep_csv(o, rows, cfg);
        }
        emit(out, o.str());
        for (const auto& r : rows)
            if (!r.result.feasible) {
                std::cerr << "no feasible design at gamma " << format_number(r.gamma) << '\n';
                return kSolverError;
            }
        return 0;
    }
};

// ----------------------------------------------------------------- reproduce

struct ReproduceCmd {
    std::string target;
    std::string out;
    std::uint64_t seed = 42;
    std::size_t zeta_steps = 60;
    std::size_t grid = 600;
    std::size_t gamma_steps = 20;
    std::size_t multistarts = 30;

    void write(const fs::path& dir, const std::string& name, const std::string& content, json& files) const {
        emit((dir / name).string(), content);
        files.push_back(name);
    }

    void fig2(const std::string& which, const fs::path& dir, json& meta, json& files) const {
        const auto pair = preset_pair(which);
        const Norm n = which == "fig2b" ? Norm::Two : Norm::Inf;
        CurveArgs a;
        a.norm = to_string(n);
        a.zeta_steps = zeta_steps;
        a.grid = grid;
        const auto ml = build_curve("ml", pair, a, false);
        const auto lin = build_curve("linear", pair, a, false);
        const auto gen = build_curve("general", pair, a, false);
        for (const auto& [name, c] : {std::pair{"ml.csv", &ml}, {"linear.csv", &lin}, {"general.csv", &gen}}) {
            std::ostringstream o;
            c->write_csv(o);
            write(dir, name, o.str(), files);
        }
        const auto top = resolve_ml(pair, 1.0).boundary_set();
        const auto green = resolve_ml(pair, 0.46).boundary_set();
        const auto lin_top = lin.points.back();
        tools::Plot p{which + ": sensitivity vs accuracy",
                      "accuracy",
                      "sensitivity (" + to_string(n) + "-norm)",
                      {to_series(gen, "general (n=2)", "#d62728", false), to_series(ml, "ML", "#1f77b4", false),
                       to_series(lin, "linear", "#ff7f0e", true)},
                      {{"ML eta=1", accuracy(top, pair), sensitivity(top, pair, n), "red", false},
                       {"ML eta=0.46", accuracy(green, pair), sensitivity(green, pair, n), "green", false},
                       {"linear max", lin_top.accuracy, lin_top.sensitivity, "red", true}},
                      {{"target", which}, {"problem", pair.to_json()}}};
        write(dir, which + ".svg", tools::render_svg(p), files);
        meta["problem"] = pair.to_json();
        meta["norm"] = to_string(n);
        meta["curves"] = {{"ml", ml.metadata}, {"linear", lin.metadata}, {"general", gen.metadata}};
        meta["points"] = {{"ml", ml.points.size()}, {"linear", lin.points.size()}, {"general", gen.points.size()}};
        meta["inversions"] = {{"ml", count_inversions(ml)}, {"linear", count_inversions(lin)},
                              {"general", count_inversions(gen)}};
    }

    void fig3(const fs::path& dir, json& meta, json& files) const {
        if (gamma_steps < 2) throw InvalidParameter("--gamma-steps must be at least 2");
        auto p = gaussian_design_box(0.9);
        std::vector<double> gs;
        for (std::size_t k = 0; k < gamma_steps; ++k) gs.push_back(0.55 + 0.44 * k / (gamma_steps - 1));
        DesignOptions opt;
        opt.multistarts = multistarts;
        const auto rows = gamma_sweep(p, gs, opt);
        const json cfg{{"problem", p.to_json()}, {"options", opt.to_json()}, {"theta_names", p.base.theta_names()}};
        std::ostringstream o;
        write_sweep_csv(o, rows, cfg);
        write(dir, "sweep.csv", o.str(), files);

        tools::Series s{"S*", {}, {}, "#1f77b4", false}, dmu{"delta mu*", {}, {}, "#1f77b4", false},
            s0{"sigma0*", {}, {}, "#d62728", false}, s1{"sigma1*", {}, {}, "#2ca02c", true};
        for (const auto& r : rows) {
            if (!r.result.feasible) continue;
            const auto& t = r.result.theta;
            s.x.push_back(r.gamma);
            s.y.push_back(r.result.sensitivity);
            for (auto* ser : {&dmu, &s0, &s1}) ser->x.push_back(r.gamma);
            dmu.y.push_back(std::abs(t[2] - t[0]));
            s0.y.push_back(t[1]);
            s1.y.push_back(t[3]);
        }
        write(dir, "fig3a.svg",
              tools::render_svg({"minimum sensitivity", "gamma", "S* (" + to_string(p.norm) + "-norm)", {s}, {}, cfg}),
              files);
        write(dir, "fig3b.svg", tools::render_svg({"optimal parameters", "gamma", "value", {dmu, s0, s1}, {}, cfg}),
              files);
        meta["design"] = cfg;
        std::size_t infeasible = 0;
        for (const auto& r : rows) infeasible += !r.result.feasible;
        meta["infeasible_rows"] = infeasible;
    }

    void table1(const fs::path& dir, json& meta, json& files) const {
        const auto pair = preset_pair("table1");
        ExperimentOptions opt;
        opt.base_seed = seed;
        std::ostringstream o;
        json rows = json::array();
        write_comment_header(o, {{"problem", pair.to_json()}, {"experiment", opt.to_json()}});
        o << "classifier,eta,y1,y2,accuracy,sensitivity_inf,mc_s1,mc_s2,analytic_s1,analytic_s2,se_s1,se_s2\n";
        for (const auto& [name, eta] : {std::pair{"c1", 1.0}, {"c2", 0.4603}}) {
            const auto b = resolve_ml(pair, eta).boundary_set();
            const auto r1 = run_experiment(pair, b, scenario("s1"), opt);
            const auto r2 = run_experiment(pair, b, scenario("s2"), opt);
            const double a = accuracy(b, pair), s = sensitivity(b, pair, Norm::Inf);
            o << name << ',' << format_number(eta) << ',' << format_number(b[0]) << ',' << format_number(b[1]) << ','
              << format_number(a) << ',' << format_number(s) << ',' << format_number(r1.mean_accuracy) << ','
              << format_number(r2.mean_accuracy) << ',' << format_number(r1.analytic_accuracy) << ','
              << format_number(r2.analytic_accuracy) << ',' << format_number(r1.standard_error) << ','
              << format_number(r2.standard_error) << '\n';
            rows.push_back({{"classifier", name},
                            {"eta", eta},
                            {"boundaries", b.to_json()},
                            {"accuracy", a},
                            {"sensitivity_inf", s},
                            {"s1", r1.to_json()},
                            {"s2", r2.to_json()}});
        }
        write(dir, "table1.csv", o.str(), files);
        write(dir, "table1.json", json{{"problem", pair.to_json()}, {"rows", rows}}.dump(2) + "\n", files);
        meta["problem"] = pair.to_json();
        meta["experiment"] = opt.to_json();
    }

    int run() const {
        const fs::path dir = out.empty() ? fs::path("reproduce") / target : fs::path(out);
        const auto t0 = std::chrono::steady_clock::now();
        json meta{{"target", target}, {"seed", seed}}, files = json::array();
        if (target == "fig2a" || target == "fig2b" || target == "fig2c") {
            meta["zeta_steps"] = zeta_steps;
            meta["grid"] = grid;
            fig2(target, dir, meta, files);
        } else if (target == "fig3") {
            meta["gamma_steps"] = gamma_steps;
            fig3(dir, meta, files);
        } else if (target == "table1") {
            table1(dir, meta, files);
        } else {
            throw InvalidParameter("unknown target '" + target + "' (expected fig2a, fig2b, fig2c, fig3 or table1)");
        }
        meta["files"] = files;
        meta["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit((dir / "metadata.json").string(), meta.dump(2) + "\n");
        std::cout << "wrote " << files.size() + 1 << " files to " << dir.string() << '\n';
        return 0;
    }
};

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UnresolvedClassifier& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accuracy and sensitivity of binary classifiers"};
    app.require_subcommand(1);

    BoundariesCmd bnd;
    auto* sb = app.add_subcommand("boundaries", "Likelihood-ratio boundaries at a threshold");
    bnd.problem.add(sb);
    sb->add_option("--eta", bnd.eta, "Threshold on p1 f1 / p0 f0")->capture_default_str();
    sb->add_option("--format", bnd.format, "text | json | csv")->capture_default_str();
    sb->add_option("--out", bnd.out, "Output file (default stdout)");

    EvalCmd acc, sens;
    sens.with_sensitivity = true;
    auto* sa = app.add_subcommand("accuracy", "Accuracy of a classifier");
    auto* ss = app.add_subcommand("sensitivity", "Sensitivity of a classifier");
    for (auto [cmd, sub] : {std::pair{&acc, sa}, {&sens, ss}}) {
        cmd->problem.add(sub);
        sub->add_option("--classifier", cmd->classifier, "ml:<eta> | linear:<y>[:h0_first|h1_first] | general:<y1,y2,..>[:...]")
            ->capture_default_str();
        sub->add_option("--format", cmd->format, "text | json")->capture_default_str();
        sub->add_option("--out", cmd->out, "Output file (default stdout)");
    }
    ss->add_option("--norm", sens.norm, "inf | two")->capture_default_str();

    CurveCmd curve;
    auto* sc = app.add_subcommand("curve", "Tradeoff curve: ml | linear | general");
    curve.app = sc;
    sc->add_option("kind", curve.kind, "ml | linear | general")->required();
    curve.problem.add(sc);
    curve.args.add(sc);
    sc->add_option("--format", curve.format, "csv | json | svg")->capture_default_str();
    sc->add_option("--out", curve.out, "Output file (default stdout)");

    CheckCmd check;
    auto* sk = app.add_subcommand("check", "Assumption checks at the ML optimum");
    check.problem.add(sk);
    sk->add_option("--format", check.format, "text | json")->capture_default_str();
    sk->add_option("--out", check.out, "Output file (default stdout)");

    SimulateCmd sim;
    auto* sm = app.add_subcommand("simulate", "Monte Carlo accuracy under adversarial shifts");
    sim.problem.add(sm);
    sm->add_option("--scenario", sim.scenario_name, "s1 | s2 | none")->capture_default_str();
    sm->add_option("--perturbation", sim.perturbation, "Perturbation JSON (overrides --scenario)");
    sm->add_option("--classifier", sim.classifier, "Classifier designed on the nominal pair")->capture_default_str();
    sm->add_option("--seed", sim.seed, "Base seed; trial t uses seed + t")->capture_default_str();
    sm->add_option("--n-obs", sim.n_obs, "Observations per trial")->capture_default_str();
    sm->add_option("--n-trials", sim.n_trials, "Trials")->capture_default_str();
    sm->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sm->add_option("--format", sim.format, "text | json | csv")->capture_default_str();
    sm->add_option("--out", sim.out, "Output file (default stdout)");

    DesignCmd design;
    auto* sd = app.add_subcommand("design", "Distribution parameters of least sensitivity at an accuracy");
    sd->add_option("--box", design.box, "Design problem JSON (default: built-in Gaussian box)");
    sd->add_option("--gamma", design.gamma, "Target accuracy (overrides the file)");
    sd->add_option("--gammas", design.gammas, "Comma-separated targets for a sweep");
    sd->add_option("--norm", design.norm, "inf | two (overrides the file)");
    sd->add_option("--multistarts", design.multistarts, "Simplex restarts")->capture_default_str();
    sd->add_option("--format", design.format, "csv | json")->capture_default_str();
    sd->add_option("--out", design.out, "Output file (default stdout)");

    ReproduceCmd rep;
    auto* sr = app.add_subcommand("reproduce", "Regenerate a figure or table as CSV + SVG");
    sr->add_option("target", rep.target, "fig2a | fig2b | fig2c | fig3 | table1")->required();
    sr->add_option("--out", rep.out, "Output directory (default reproduce/<target>)");
    sr->add_option("--seed", rep.seed, "Base seed for simulations")->capture_default_str();
    sr->add_option("--zeta-steps", rep.zeta_steps, "Accuracy targets on the general curve")->capture_default_str();
    sr->add_option("--grid", rep.grid, "Stage-1 grid per axis")->capture_default_str();
    sr->add_option("--gamma-steps", rep.gamma_steps, "Targets in the design sweep")->capture_default_str();
    sr->add_option("--multistarts", rep.multistarts, "Design restarts")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    if (*sb) return guarded([&] { return bnd.run(); });
    if (*sa) return guarded([&] { return acc.run(); });
    if (*ss) return guarded([&] { return sens.run(); });
    if (*sc) return guarded([&] { return curve.run(); });
    if (*sk) return guarded([&] { return check.run(); });
    if (*sm) return guarded([&] { return sim.run(); });
    if (*sd) return guarded([&] { return design.run(); });
    if (*sr) return guarded([&] { return rep.run(); });
    return kConfigError;
}
