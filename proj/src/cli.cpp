#include "heatctrl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "heatctrl/expr.hpp"
#include "heatctrl/synth.hpp"

namespace heatctrl::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kSqrt2 = 1.4142135623730950488;

json default_config() {
    return json{
        {"coefficients", {{"preset", "example1"}}},
        {"truncation_x", 0.0},   // 0 = preset default
        {"horizon", 0.0},        // 0 = preset default (1.0; example2: 0.5)
        {"output_dir", "out"},
        {"grids",
         {{"x_nodes", 2049},
          {"lambda_nodes", 2049},
          {"kernel_nodes", 0},
          {"l_kernel_nodes", 0},
          {"time_nodes", 17},
          {"volterra_first_step", 1e-5},
          {"volterra_ratio", 1.15},
          {"volterra_uniform_cells", 256}}},
        {"tolerances",
         {{"kernel_tol", 1e-10},
          {"volterra_tol", 1e-12},
          {"quad_tol", 1e-11},
          {"sigma_horizon", 8.0}}},
        {"transform", {{"op", "That"}, {"input", "exp(-abs(x)/2)"}}},
        {"solve",
         {{"z0", "exp(-abs(x)/2)"},
          {"u", "-(1/2)*exp(x/4)"},
          {"times", json::array({0.25, 0.5, 1.0})}}},
        {"map",
         {{"direction", "forward"},
          {"u", "-(1/2)*exp(x/4)"},
          {"z0", "exp(-abs(x)/2)"},
          {"w0", ""}}},
        {"synth",
         {{"target", ""},
          {"target_side", "Z"},
          {"n_list", json::array({1, 2, 4, 8})},
          {"mu", 1e-10}}},
    };
}

void merge_defaults(json& cfg, const json& defaults) {
    for (auto it = defaults.begin(); it != defaults.end(); ++it) {
        if (!cfg.contains(it.key()))
            cfg[it.key()] = it.value();
        else if (it.value().is_object() && cfg[it.key()].is_object())
            merge_defaults(cfg[it.key()], it.value());
    }
}

void check_known_keys(const json& cfg, const json& defaults, const std::string& prefix) {
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it.key() == "rho" || it.key() == "kappa" || it.key() == "gamma" ||
            it.key() == "preset")
            continue;   // alternatives inside "coefficients"
        if (!defaults.contains(it.key()))
            throw ConfigError("unknown config key '" + path + "'");
        if (it.value().is_object() && defaults[it.key()].is_object())
            check_known_keys(it.value(), defaults[it.key()], path);
    }
}

void apply_override(json& cfg, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + spec + "'");
    const std::string key = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;   // plain string
    }
    json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot == std::string::npos
                                                     ? std::string::npos
                                                     : dot - pos);
        if (part.empty())
            throw ConfigError("empty path component in --set key '" + key + "'");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
}

json load_config(const std::string& config_path, const std::vector<std::string>& overrides) {
    json cfg = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw ConfigError("cannot open config file '" + config_path + "'");
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw ConfigError("config is not valid JSON: " + std::string(e.what()));
        }
    }
    for (const auto& o : overrides)
        apply_override(cfg, o);
    const json defaults = default_config();
    check_known_keys(cfg, defaults, "");
    merge_defaults(cfg, defaults);

    for (const auto& [name, value] : cfg["tolerances"].items())
        if (!value.is_number() || value.get<double>() <= 0.0)
            throw ConfigError("tolerances." + name + " must be a positive number");
    for (const char* name : {"x_nodes", "lambda_nodes", "time_nodes"})
        if (cfg["grids"][name].get<long long>() < 3)
            throw ConfigError(std::string("grids.") + name + " must be at least 3");
    return cfg;
}

std::function<double(double)> compile_expr(const std::string& src, const char* what) {
    try {
        auto ast = std::make_shared<expr::Ast>(expr::Ast::parse(src));
        return [ast](double x) { return ast->eval(x); };
    } catch (const expr::ParseError& e) {
        throw ConfigError(std::string("bad expression for ") + what + ": " + e.what());
    }
}

// Expression config entries may arrive as JSON numbers via --set.
std::string expr_source(const json& v, const char* what) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
        return buf;
    }
    throw ConfigError(std::string(what) + " must be an expression string or a number");
}

CoefficientSet coefficients_from_config(const json& cfg) {
    const auto& co = cfg["coefficients"];
    const double tx = cfg["truncation_x"].get<double>();
    if (co.contains("preset")) {
        auto preset = preset_by_name(co["preset"].get<std::string>(), tx > 0 ? tx : -1.0);
        if (!preset)
            throw ConfigError("unknown coefficient preset '" +
                              co["preset"].get<std::string>() + "'");
        return *preset;
    }
    for (const char* k : {"rho", "kappa", "gamma"})
        if (!co.contains(k))
            throw ConfigError("coefficients need either a preset or rho/kappa/gamma "
                              "expressions");
    CoefficientSet c;
    c.rho = compile_expr(expr_source(co["rho"], "rho"), "rho");
    c.kappa = compile_expr(expr_source(co["kappa"], "kappa"), "kappa");
    c.gamma = compile_expr(expr_source(co["gamma"], "gamma"), "gamma");
    c.scheme = CoefficientSet::DerivativeScheme::CentralRichardson;
    c.truncation_x = tx > 0 ? tx : 30.0;
    c.label = "custom";
    return c;
}

double horizon_from_config(const json& cfg, const CoefficientSet& c) {
    const double t = cfg["horizon"].get<double>();
    if (t > 0) return t;
    return c.label == "example2" ? 0.5 : 1.0;
}

TransformOptions transform_options(const json& cfg) {
    TransformOptions opt;
    opt.x_nodes = cfg["grids"]["x_nodes"].get<std::size_t>();
    opt.lambda_nodes = cfg["grids"]["lambda_nodes"].get<std::size_t>();
    opt.kernel_nodes = cfg["grids"]["kernel_nodes"].get<std::size_t>();
    opt.l_kernel_nodes = cfg["grids"]["l_kernel_nodes"].get<std::size_t>();
    opt.kernel_tol = cfg["tolerances"]["kernel_tol"].get<double>();
    return opt;
}

GridSpec time_grid_from_config(const json& cfg, double T) {
    return volterra_time_grid(T, cfg["grids"]["volterra_first_step"].get<double>(),
                              cfg["grids"]["volterra_ratio"].get<double>(),
                              cfg["grids"]["volterra_uniform_cells"].get<std::size_t>());
}

fs::path ensure_outdir(const json& cfg) {
    fs::path dir = cfg["output_dir"].get<std::string>();
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::string text = header + "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) text += ',';
            text += fmt(row[i]);
        }
        text += '\n';
    }
    write_text(path, text);
}

json validation_to_json(const ValidationReport& rep) {
    json items = json::array();
    for (const auto& i : rep.items)
        items.push_back({{"name", i.name},
                         {"passed", i.passed},
                         {"value", i.value},
                         {"detail", i.detail}});
    return json{{"items", items}, {"all_passed", rep.all_passed()}};
}

json estimates_to_json(const EstimateReport& r) {
    return json{{"T", r.T},
                {"sup_u110", r.sup_u110},
                {"sup_urkg", r.sup_urkg},
                {"z0_h1", r.z0_h1},
                {"w0_hh1", r.w0_hh1},
                {"sigma0_0", r.sigma0_0},
                {"R", r.R},
                {"R0", r.R0},
                {"M1_fitted", r.M1},
                {"G0", r.G0},
                {"E1_surrogate", r.E1_surrogate},
                {"est2_holds", r.est2_ok},
                {"E2_fitted", r.E2_fitted},
                {"G1", r.G1},
                {"E3_surrogate", r.E3_surrogate},
                {"est4_holds", r.est4_ok},
                {"z_h1_max", r.z_h1_max},
                {"zz_bound", r.zz_bound},
                {"estzz_holds", r.estzz_ok},
                {"volterra_sup", r.volterra_sup},
                {"gronwall_bound", r.gronwall_bound},
                {"estvvv_holds", r.estvvv_ok},
                {"note", "E1/E2/E3 are fitted surrogates; the source result "
                         "states existence only"}};
}

// ----------------------------------------------------------------- commands

int cmd_check(const json& cfg) {
    auto c = coefficients_from_config(cfg);
    ValidationOptions vopt;
    vopt.sigma_horizon = cfg["tolerances"]["sigma_horizon"].get<double>();
    auto rep = validate_assumptions(c, vopt);
    auto dir = ensure_outdir(cfg);
    write_json(dir / "check_report.json", validation_to_json(rep));
    std::cout << (rep.all_passed() ? "all assumptions hold" : "assumption check FAILED")
              << " (report: " << (dir / "check_report.json").string() << ")\n";
    return rep.all_passed() ? 0 : 1;
}

int cmd_kernel(const json& cfg) {
    auto c = coefficients_from_config(cfg);
    auto ctx = build_context(c, transform_options(cfg));
    auto dir = ensure_outdir(cfg);

    const auto& k = ctx.kernel_k;
    std::vector<std::vector<double>> rows;
    const std::size_t step = std::max<std::size_t>(1, k.axis_nodes() / 128);
    for (std::size_t i = 0; i < k.axis_nodes(); i += step)
        for (std::size_t j = 0; j <= i; j += step) {
            const double xi = static_cast<double>(i) * k.step();
            const double eta = static_cast<double>(j) * k.step();
            rows.push_back({xi - eta, xi + eta, k.at(i, j)});
        }
    write_csv(dir / "kernel.csv", "y1,y2,K", rows);

    std::vector<std::vector<double>> brows;
    for (std::size_t i = 0; i < ctx.k_boundary.size(); i += 2)
        brows.push_back({ctx.k_boundary.grid()[i], ctx.k_boundary.values()[i]});
    write_csv(dir / "kernel_boundary.csv", "x,K_y1_0_x", brows);

    json diag{{"K00", k(0.0, 0.0)},
              {"diagonal_data_at_0", k.diagonal(0.0)},
              {"sweeps", k.sweep_residuals().size()},
              {"trivial_zero", k.trivial_zero()},
              {"M0_fitted", ctx.bounds.M0},
              {"M1_fitted", ctx.bounds.M1},
              {"truncation_bound", ctx.bounds.truncation_bound},
              {"consistent", ctx.bounds.consistent},
              {"lambda_max", ctx.derived.lambda_max},
              {"sigma0_0", ctx.derived.sigma0_0},
              {"R", ctx.derived.R},
              {"R0", ctx.derived.R0}};
    if (!k.sweep_residuals().empty())
        diag["last_residual"] = k.sweep_residuals().back();
    write_json(dir / "kernel_report.json", diag);
    std::cout << "kernel solved: K(0,0) = " << fmt(k(0.0, 0.0)) << ", files in "
              << dir.string() << "\n";
    return 0;
}

int cmd_transform(const json& cfg) {
    auto c = coefficients_from_config(cfg);
    auto ctx = build_context(c, transform_options(cfg));
    auto dir = ensure_outdir(cfg);

    const std::string op = cfg["transform"]["op"].get<std::string>();
    auto f = compile_expr(expr_source(cfg["transform"]["input"], "transform.input"), "transform.input");

    const bool input_on_x = (op == "S_inv" || op == "That_inv" || op == "D");
    const GridSpec& in_grid = input_on_x ? ctx.x_grid : ctx.lambda_grid;
    auto input = SampledFunction::from_function(in_grid, f);

    SampledFunction output;
    if (op == "S") output = apply_S(ctx, input);
    else if (op == "S_inv") output = apply_S_inv(ctx, input);
    else if (op == "Tr") output = apply_Tr(ctx, input);
    else if (op == "Tr_inv") output = apply_Tr_inv(ctx, input);
    else if (op == "That") output = apply_That(ctx, input);
    else if (op == "That_inv") output = apply_That_inv(ctx, input);
    else if (op == "D") output = apply_D_rhok(ctx, input);
    else throw ConfigError("transform.op must be one of S, S_inv, Tr, Tr_inv, That, "
                           "That_inv, D (got '" + op + "')");

    std::vector<std::vector<double>> in_rows, out_rows;
    for (std::size_t i = 0; i < input.size(); ++i)
        in_rows.push_back({input.grid()[i], input.values()[i]});
    for (std::size_t i = 0; i < output.size(); ++i)
        out_rows.push_back({output.grid()[i], output.values()[i]});
    write_csv(dir / "transform_input.csv", "arg,value", in_rows);
    write_csv(dir / "transform_output.csv", "arg,value", out_rows);

    const bool output_on_x = (op == "S" || op == "That" || op == "D");
    json rep{{"op", op},
             {"input_norm_h1", input_on_x ? norm_HH1(ctx, input) : norm_H1(input)},
             {"output_norm_h1", output_on_x ? norm_HH1(ctx, output) : norm_H1(output)},
             {"tail_bound", tr_tail_bound(ctx, input)},
             {"lambda_max", ctx.derived.lambda_max}};
    write_json(dir / "transform_report.json", rep);
    std::cout << "transform " << op << " done, files in " << dir.string() << "\n";
    return 0;
}

int cmd_solve(const json& cfg) {
    auto c = coefficients_from_config(cfg);
    auto ctx = build_context(c, transform_options(cfg));
    const double T = horizon_from_config(cfg, c);
    auto dir = ensure_outdir(cfg);

    auto z0f = compile_expr(expr_source(cfg["solve"]["z0"], "solve.z0"), "solve.z0");
    auto uf = compile_expr(expr_source(cfg["solve"]["u"], "solve.u"), "solve.u");
    auto z0 = SampledFunction::from_function(ctx.lambda_grid, z0f);
    auto u = ControlSignal::from_function(uf, T, 513);

    std::vector<double> times;
    for (const auto& t : cfg["solve"]["times"])
        times.push_back(t.get<double>());
    for (double t : times)
        if (t < 0 || t > T)
            throw ConfigError("solve.times must lie in [0, horizon]");

    auto states = solve_heat_line(z0, u, times, ctx.lambda_grid);
    json slices = json::array();
    for (std::size_t s = 0; s < states.size(); ++s) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < states[s].field.size(); ++i)
            rows.push_back({states[s].field.grid()[i], states[s].field.values()[i]});
        char name[32];
        std::snprintf(name, sizeof(name), "state_%03zu.csv", s);
        write_csv(dir / name, "x,Z", rows);
        slices.push_back({{"file", name},
                          {"t", states[s].time},
                          {"h1_norm", norm_H1(states[s].field)},
                          {"trace", states[s].time > 0 ? boundary_trace(states[s])
                                                       : 0.0},
                          {"control", u(states[s].time)}});
    }
    write_json(dir / "solve_report.json",
               json{{"horizon", T}, {"slices", slices}, {"z0_h1", norm_H1(z0)}});
    std::cout << "solved " << states.size() << " time slices, files in " << dir.string()
              << "\n";
    return 0;
}

int cmd_map(const json& cfg) {
    auto c = coefficients_from_config(cfg);
    auto ctx = build_context(c, transform_options(cfg));
    const double T = horizon_from_config(cfg, c);
    auto dir = ensure_outdir(cfg);
    const std::string direction = cfg["map"]["direction"].get<std::string>();
    auto uf = compile_expr(expr_source(cfg["map"]["u"], "map.u"), "map.u");
    auto u_in = ControlSignal::from_function(uf, T, 513);

    std::vector<std::vector<double>> rows;
    json rep;
    if (direction == "forward") {
        auto z0f = compile_expr(expr_source(cfg["map"]["z0"], "map.z0"), "map.z0");
        auto z0 = SampledFunction::from_function(ctx.lambda_grid, z0f);
        const auto nt = cfg["grids"]["time_nodes"].get<std::size_t>();
        std::vector<double> times(nt);
        for (std::size_t j = 0; j < nt; ++j)
            times[j] = T * static_cast<double>(j) / static_cast<double>(nt - 1);
        auto states = solve_heat_line(z0, u_in, times, ctx.lambda_grid);
        auto mapped = map_control_forward(ctx, u_in, states);
        for (double t : times)
            rows.push_back({t, u_in(t), mapped(t)});
        write_csv(dir / "map_control.csv", "t,u110,u_rkg", rows);
        auto w0 = apply_That(ctx, z0);
        rep = json{{"direction", "forward"},
                   {"estimates", estimates_to_json(verify_estimates(
                                     ctx, u_in, mapped, z0, w0, states, nullptr))}};
    } else if (direction == "inverse") {
        const std::string w0src = cfg["map"]["w0"].is_string() && cfg["map"]["w0"].get<std::string>().empty() ? std::string() : expr_source(cfg["map"]["w0"], "map.w0");
        auto w0 = w0src.empty()
                      ? SampledFunction::zero(ctx.x_grid)
                      : SampledFunction::from_function(ctx.x_grid,
                                                       compile_expr(w0src, "map.w0"));
        VolterraSolveInfo info;
        auto tg = time_grid_from_config(cfg, T);
        auto u110 = map_control_inverse(ctx, u_in, w0, tg, &info);
        for (std::size_t j = 0; j < tg.size(); ++j)
            rows.push_back({tg[j], u_in(tg[j]), u110(tg[j])});
        write_csv(dir / "map_control.csv", "t,u_rkg,u110", rows);
        auto z0 = apply_That_inv(ctx, w0);
        rep = json{{"direction", "inverse"},
                   {"volterra",
                    {{"sweeps", info.sweeps},
                     {"last_change", info.last_change},
                     {"sup_norm", info.sup_norm},
                     {"gronwall_bound", info.gronwall_bound},
                     {"gronwall_holds", info.gronwall_ok}}},
                   {"estimates", estimates_to_json(verify_estimates(
                                     ctx, u110, u_in, z0, w0, {}, &info))}};
    } else {
        throw ConfigError("map.direction must be 'forward' or 'inverse'");
    }
    write_json(dir / "map_report.json", rep);
    std::cout << "control map (" << direction << ") done, files in " << dir.string()
              << "\n";
    return 0;
}

int cmd_synth(const json& cfg) {
    auto c = coefficients_from_config(cfg);
    auto ctx = build_context(c, transform_options(cfg));
    const double T = horizon_from_config(cfg, c);
    auto dir = ensure_outdir(cfg);

    const std::string target_src = cfg["synth"]["target"].is_string() && cfg["synth"]["target"].get<std::string>().empty() ? std::string() : expr_source(cfg["synth"]["target"], "synth.target");
    if (target_src.empty())
        throw ConfigError("synth.target expression is required");
    const std::string side = cfg["synth"]["target_side"].get<std::string>();
    auto tf = compile_expr(target_src, "synth.target");

    SampledFunction target_z;
    SampledFunction target_w = SampledFunction::zero(ctx.x_grid);
    bool have_w_target = false;
    if (side == "Z") {
        target_z = SampledFunction::from_function(ctx.lambda_grid, tf);
    } else if (side == "W") {
        target_w = SampledFunction::from_function(ctx.x_grid, tf);
        target_z = apply_That_inv(ctx, target_w);
        have_w_target = true;
    } else {
        throw ConfigError("synth.target_side must be 'Z' or 'W'");
    }

    SynthesisSpec spec;
    spec.horizon = T;
    spec.target = target_z;
    spec.regularization = cfg["synth"]["mu"].get<double>();
    auto z0 = SampledFunction::zero(ctx.lambda_grid);

    json runs = json::array();
    for (const auto& nval : cfg["synth"]["n_list"]) {
        spec.intervals = nval.get<std::size_t>();
        auto res = synthesize_piecewise(spec, z0);

        // residual at a refined evaluation level as well (the construction's
        // second limit index)
        auto fine = GridSpec::uniform(ctx.lambda_grid.a(), ctx.lambda_grid.b(),
                                      2 * ctx.lambda_grid.size() - 1);
        std::vector<double> fine_diff(fine.size());
        for (std::size_t i = 0; i < fine.size(); ++i) {
            const double zi = heat_control_term(res.control, T, fine[i]);
            const double tz = target_z.grid().contains(fine[i]) ? target_z(fine[i]) : 0.0;
            fine_diff[i] = tz - zi;
        }
        const double fine_residual = norm_H1(SampledFunction(fine, fine_diff));

        auto lift = lift_synthesis(ctx, res, target_w);
        runs.push_back({{"N", spec.intervals},
                        {"amplitudes", res.amplitudes},
                        {"residual_z_h1", res.residual_h1},
                        {"residual_z_h1_fine", fine_residual},
                        {"residual_w_hh1", have_w_target ? lift.residual_hh1 : 0.0},
                        {"condition", res.condition},
                        {"condition_warning", res.condition_warning}});

        char name[48];
        std::snprintf(name, sizeof(name), "synth_profile_N%03zu.csv",
                      static_cast<std::size_t>(spec.intervals));
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < target_z.size(); ++i)
            rows.push_back({target_z.grid()[i], target_z.values()[i],
                            res.achieved.field.values()[i]});
        write_csv(dir / name, "x,target,achieved", rows);
    }
    write_json(dir / "synth_report.json",
               json{{"horizon", T},
                    {"target_side", side},
                    {"runs", runs},
                    {"plot_manifest",
                     {{"x_column", "x"},
                      {"series", json::array({"target", "achieved"})}}}});
    std::cout << "synthesis done for " << runs.size() << " interval counts, files in "
              << dir.string() << "\n";
    return 0;
}

// -------------------------------------------------------------- reproduce

struct Verdict {
    json criteria = json::array();
    bool all_passed = true;

    void add(int id, const std::string& what, double measured, double threshold,
             bool pass, bool gate = true) {
        criteria.push_back({{"criterion", id},
                            {"check", what},
                            {"measured", measured},
                            {"threshold", threshold},
                            {"passed", pass},
                            {"gating", gate}});
        if (gate && !pass) all_passed = false;
        std::cout << (gate ? (pass ? "[PASS] " : "[FAIL] ") : "[INFO] ") << "criterion "
                  << id << ": " << what << " (measured " << fmt(measured)
                  << ", threshold " << fmt(threshold) << ")\n";
    }
};

int cmd_reproduce(const json& cfg, int example) {
    auto dir = ensure_outdir(cfg);
    Verdict verdict;

    if (example == 1) {
        auto c = preset_example1(cfg["truncation_x"].get<double>() > 0
                                     ? cfg["truncation_x"].get<double>()
                                     : 40.0);
        auto ctx = build_context(c, transform_options(cfg));
        const double T = 1.0;
        auto z0 = SampledFunction::from_function(
            ctx.lambda_grid, [](double l) { return std::exp(-l / 2.0); });
        auto u110 = ControlSignal::from_function(
            [](double t) { return -0.5 * std::exp(t / 4.0); }, T, 513);

        // criterion 1: forward control formula at t in {0, T/2, T}
        const double contr = (bessel_i(3, 1.0) - 5.0 * bessel_i(1, 1.0)) / (4.0 * kSqrt2);
        auto states = solve_heat_line(z0, u110, {0.0, 0.5 * T, T}, ctx.lambda_grid);
        auto u_rkg = map_control_forward(ctx, u110, states);
        double worst1 = 0.0;
        for (double t : {0.0, 0.5 * T, T}) {
            const double expected = contr * std::exp(t / 4.0);
            worst1 = std::max(worst1, std::abs(u_rkg(t) - expected) / std::abs(expected));
        }
        verdict.add(1, "u_rkg(t)/e^{t/4} equals (I3(1)-5I1(1))/(4 sqrt 2), rel err",
                    worst1, 1e-3, worst1 <= 1e-3);

        // criterion 2: kernel against the closed form on the y1 = 0 edge
        double worst2 = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double x = 10.0 * i / 400.0;
            const double e = std::exp(-x / 2.0);
            const double s2 = 1.0 - e;
            const double closed =
                s2 < 1e-20 ? 0.125
                           : 0.25 * e * bessel_i(1, std::sqrt(s2)) / std::sqrt(s2);
            worst2 = std::max(worst2, std::abs(ctx.kernel_k(0.0, x) - closed));
        }
        verdict.add(2, "max |K_num(0,x) - K_closed(0,x)| on [0,10]", worst2, 1e-4,
                    worst2 <= 1e-4);

        // criterion 3: transform oracle
        auto trz = apply_Tr(ctx, z0);
        double worst3 = 0.0;
        for (int i = 0; i <= 240; ++i) {
            const double lam = 6.0 * i / 240.0;
            worst3 = std::max(worst3, std::abs(trz(lam) -
                                               2.0 * bessel_i(1, std::exp(-lam / 2.0))));
        }
        verdict.add(3, "max |Tr(e^{-l/2}) - 2 I1(e^{-l/2})| on [0,6]", worst3, 1e-3,
                    worst3 <= 1e-3);
        auto w0 = apply_That(ctx, z0);
        const double w0_err = std::abs(w0.values().front() - kSqrt2 * bessel_i(1, 1.0));
        verdict.add(3, "|W0(0) - sqrt 2 I1(1)|", w0_err, 1e-3, w0_err <= 1e-3);

        // criterion 5: boundary trace identity on [0.05, 1]
        double worst5 = 0.0;
        {
            auto grid = GridSpec::uniform(0.0, 0.12, 9);
            for (int i = 0; i <= 19; ++i) {
                const double t = 0.05 + (1.0 - 0.05) * i / 19.0;
                std::vector<double> v(grid.size());
                for (std::size_t m = 0; m < grid.size(); ++m)
                    v[m] = heat_free_term(z0, t, grid[m]) +
                           heat_control_term(u110, t, grid[m]);
                HeatState st{HeatState::Side::ConstantCoeff,
                             SampledFunction(grid, std::move(v)), t};
                worst5 = std::max(worst5,
                                  std::abs(boundary_trace(st) + 0.5 * std::exp(t / 4.0)));
            }
        }
        verdict.add(5, "|Z_x(0+,t) + e^{t/4}/2| on [0.05, 1]", worst5, 1e-2,
                    worst5 <= 1e-2);

        // criterion 7: round trips of the control maps
        VolterraSolveInfo info;
        auto tg = time_grid_from_config(cfg, T);
        auto u110_rec = map_control_inverse(ctx, u_rkg, w0, tg, &info);
        double worst7 = 0.0;
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
            worst7 = std::max(worst7, std::abs(u110_rec(t) - u110(t)) /
                                          (1.0 + std::abs(u110(t))));
        auto states_rec = solve_heat_line(z0, u110_rec, {0.0, 0.5, 1.0}, ctx.lambda_grid);
        auto u_rkg_rec = map_control_forward(ctx, u110_rec, states_rec);
        for (double t : {0.0, 0.5, 1.0})
            worst7 = std::max(worst7, std::abs(u_rkg_rec(t) - u_rkg(t)) /
                                          (1.0 + std::abs(u_rkg(t))));
        verdict.add(7, "round-trip control maps, rel sup err", worst7, 1e-2,
                    worst7 <= 1e-2);

        // criterion 9: estimate audit
        auto est = verify_estimates(ctx, u110, u_rkg, z0, w0, states, &info);
        const bool ok9 = est.est2_ok && est.est4_ok && est.estzz_ok && est.estvvv_ok;
        verdict.add(9, "estimate audit (est2/est4/estzz/estvvv)", ok9 ? 1.0 : 0.0, 1.0,
                    ok9);
        write_json(dir / "reproduce1_estimates.json", estimates_to_json(est));

        std::vector<std::vector<double>> rows;
        for (double t : {0.0, 0.5 * T, T})
            rows.push_back({t, u_rkg(t), contr * std::exp(t / 4.0)});
        write_csv(dir / "reproduce1_control.csv", "t,u_rkg,closed_form", rows);
    } else if (example == 2) {
        auto c = preset_example2(cfg["truncation_x"].get<double>() > 0
                                     ? cfg["truncation_x"].get<double>()
                                     : 7.0);
        auto ctx = build_context(c, transform_options(cfg));
        const double T = 0.5;

        // criterion 4: pure scaling of both control maps
        auto u110 = ControlSignal::from_function(
            [](double t) { return std::cos(3.0 * t) - 0.5; }, T, 513);
        auto z0 = SampledFunction::zero(ctx.lambda_grid);
        auto states = solve_heat_line(z0, u110, {0.0, 0.25, 0.5}, ctx.lambda_grid);
        auto u_rkg = map_control_forward(ctx, u110, states);
        double worst4 = 0.0;
        for (double t : {0.0, 0.25, 0.5})
            worst4 = std::max(worst4, std::abs(u110(t) - 2.0 * u_rkg(t)));
        auto u110_rec = map_control_inverse(ctx, u_rkg, SampledFunction::zero(ctx.x_grid),
                                            time_grid_from_config(cfg, T));
        for (double t : {0.0, 0.25, 0.5})
            worst4 = std::max(worst4, std::abs(u110_rec(t) - u110(t)));
        verdict.add(4, "u110 = 2 u_rkg for both map directions, abs err", worst4, 1e-10,
                    worst4 <= 1e-10);

        // criterion 8: approximate controllability by nested synthesis
        auto target_z_fn = [T](double xi) {
            return std::cosh(xi / std::sqrt(2.0 * T)) *
                   std::exp(-xi * xi / (4.0 * T) - 0.25);
        };
        auto target_w = SampledFunction::from_function(ctx.x_grid, [&](double x) {
            const double lam = 0.5 * x * (x + 6.0);
            return target_z_fn(lam) / std::sqrt(4.0 + x * x);
        });
        SynthesisSpec spec;
        spec.horizon = T;
        spec.target = SampledFunction::from_function(ctx.lambda_grid, target_z_fn);
        spec.regularization = cfg["synth"]["mu"].get<double>();

        std::vector<double> residuals, lifted;
        json runs = json::array();
        SynthesisResult res8;
        for (std::size_t n : {1u, 2u, 4u, 8u}) {
            spec.intervals = n;
            auto res = synthesize_piecewise(spec, z0);
            auto lift = lift_synthesis(ctx, res, target_w);
            residuals.push_back(res.residual_h1);
            lifted.push_back(lift.residual_hh1);
            runs.push_back({{"N", n},
                            {"residual_z_h1", res.residual_h1},
                            {"residual_w_hh1", lift.residual_hh1},
                            {"amplitudes", res.amplitudes}});
            if (n == 8u) res8 = res;
        }
        bool monotone = true, monotone_w = true;
        for (std::size_t i = 1; i < residuals.size(); ++i) {
            monotone = monotone && residuals[i] <= residuals[i - 1] * (1.0 + 1e-9);
            monotone_w = monotone_w && lifted[i] <= lifted[i - 1] * (1.0 + 1e-9);
        }
        verdict.add(8, "Z residual non-increasing over N in {1,2,4,8}",
                    monotone ? 1.0 : 0.0, 1.0, monotone);
        verdict.add(8, "Z residual drop from N=1 to N=8 (ratio)",
                    residuals.back() / residuals.front(), 0.5,
                    residuals.back() <= 0.5 * residuals.front());
        verdict.add(8, "lifted W residual decreases correspondingly",
                    monotone_w ? 1.0 : 0.0, 1.0, monotone_w);
        write_json(dir / "reproduce2_synth.json", json{{"runs", runs}});

        // criterion 9: estimate audit on the synthesized run (largest N)
        std::vector<double> times{0.0, 0.125, 0.25, 0.375, 0.5};
        auto synth_states = solve_heat_line(z0, res8.control, times, ctx.lambda_grid);
        auto synth_rkg = map_control_forward(ctx, res8.control, synth_states);
        auto est = verify_estimates(ctx, res8.control, synth_rkg, z0,
                                    SampledFunction::zero(ctx.x_grid), synth_states,
                                    nullptr);
        verdict.add(9, "estimate audit (est2/estzz) on the synthesized control",
                    (est.est2_ok && est.estzz_ok) ? 1.0 : 0.0, 1.0,
                    est.est2_ok && est.estzz_ok);
        write_json(dir / "reproduce2_estimates.json", estimates_to_json(est));

        // criterion 10: null-target experiment, logged only (the rigidity
        // theorem forbids steering a nonzero state exactly to zero; the
        // finite-N residuals are observational)
        {
            auto z0n = apply_That_inv(ctx, target_w);
            SynthesisSpec nspec;
            nspec.horizon = T;
            nspec.target = SampledFunction::zero(ctx.lambda_grid);
            json obs = json::array();
            const double base = norm_H1(z0n);
            for (std::size_t n : {1u, 2u, 4u, 8u}) {
                nspec.intervals = n;
                auto nres = synthesize_piecewise(nspec, z0n);
                obs.push_back({{"N", n}, {"residual_to_zero", nres.residual_h1}});
            }
            write_json(dir / "reproduce2_null_target.json",
                       json{{"initial_h1", base},
                            {"observations", obs},
                            {"note", "logged only: no convergence to zero is asserted "
                                     "either way"}});
            verdict.add(10, "null-target residuals recorded (observation only)", 0.0,
                        0.0, true, /*gate=*/false);
        }
    } else {
        throw ConfigError("reproduce example must be 1 or 2");
    }

    write_json(dir / (example == 1 ? "reproduce1_verdict.json"
                                   : "reproduce2_verdict.json"),
               json{{"example", example},
                    {"criteria", verdict.criteria},
                    {"all_passed", verdict.all_passed}});
    std::cout << (verdict.all_passed ? "verdict: PASS" : "verdict: FAIL") << "\n";
    return verdict.all_passed ? 0 : 1;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Transformation-operator toolkit for Neumann boundary control of the "
                 "1-D heat equation with variable coefficients"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--set", overrides, "override a config entry, key.path=value");

    app.fallthrough(true);
    auto* sub_check = app.add_subcommand("check", "validate the standing assumptions");
    auto* sub_kernel = app.add_subcommand("kernel", "solve the transmutation kernel");
    auto* sub_transform =
        app.add_subcommand("transform", "apply S/Tr/That/D to a function");
    auto* sub_solve = app.add_subcommand("solve", "solve the controlled heat system");
    auto* sub_map = app.add_subcommand("map", "map a control between the systems");
    auto* sub_synth =
        app.add_subcommand("synth", "synthesize piecewise-constant controls");
    auto* sub_repro = app.add_subcommand("reproduce", "run a worked example end to end");
    int example = 1;
    sub_repro->add_option("--example", example, "worked example id (1 or 2)")
        ->check(CLI::Range(1, 2));

    std::vector<char*> argv_mut(argc);
    std::vector<std::string> argv_store(argc);
    for (int i = 0; i < argc; ++i) {
        argv_store[i] = argv[i];
        argv_mut[i] = argv_store[i].data();
    }
    try {
        app.parse(argc, argv_mut.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const json cfg = load_config(config_path, overrides);
        if (sub_check->parsed()) return cmd_check(cfg);
        if (sub_kernel->parsed()) return cmd_kernel(cfg);
        if (sub_transform->parsed()) return cmd_transform(cfg);
        if (sub_solve->parsed()) return cmd_solve(cfg);
        if (sub_map->parsed()) return cmd_map(cfg);
        if (sub_synth->parsed()) return cmd_synth(cfg);
        if (sub_repro->parsed()) return cmd_reproduce(cfg, example);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const expr::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace heatctrl::cli
