#include "thermorel/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace thermorel {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError("config error at " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing required key '" + key + "'");
    return *it;
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double get_number(const json& obj, const std::string& path, const std::string& key, double dflt) {
    if (!obj.contains(key)) return dflt;
    return get_number(obj, path, key);
}

int get_int(const json& obj, const std::string& path, const std::string& key, int dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& dflt) {
    if (!obj.contains(key)) return dflt;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::vector<std::string> get_string_array(const json& obj, const std::string& path,
                                          const std::string& key) {
    if (!obj.contains(key)) return {};
    const json& v = obj.at(key);
    if (!v.is_array()) fail(path + "." + key, "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) fail(path + "." + key, "expected an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

GeometryConfig parse_geometry(const json& g) {
    const std::string path = "geometry";
    reject_unknown(g, path,
                   {"outer_radius", "hole_center", "hole_radius", "ext_radius", "resolution",
                    "dim", "thickness", "layers", "basis_modes", "bound_K", "det_floor",
                    "vol_tol"});
    GeometryConfig out;
    out.design.outer_radius = get_number(g, path, "outer_radius");
    out.design.hole_radius = get_number(g, path, "hole_radius");
    out.design.ext_radius = get_number(g, path, "ext_radius");
    if (g.contains("hole_center")) {
        const json& c = g.at("hole_center");
        if (!c.is_array() || c.size() < 2) fail(path + ".hole_center", "expected [x, y]");
        out.design.hole_center = {c[0].get<double>(), c[1].get<double>(), 0.0};
    }
    out.resolution = get_number(g, path, "resolution");
    out.dim = get_int(g, path, "dim", 2);
    if (out.dim != 2 && out.dim != 3) fail(path + ".dim", "must be 2 or 3");
    out.thickness = get_number(g, path, "thickness", 0.0);
    out.layers = get_int(g, path, "layers", 0);
    if (out.dim == 3 && !(out.thickness > 0.0))
        fail(path + ".thickness", "required and positive for dim = 3");
    out.basis_modes = get_int(g, path, "basis_modes", 4);
    out.bound_K = get_number(g, path, "bound_K", 10.0);
    out.det_floor = get_number(g, path, "det_floor", 0.1);
    out.vol_tol = get_number(g, path, "vol_tol", 1e-3);
    out.design.validate();
    return out;
}

void parse_material(const json& m, ProblemConfig& cfg) {
    const std::string path = "material";
    reject_unknown(m, path,
                   {"stress_unit", "lambda", "mu", "E", "rho_cte", "k_cond", "K_hard", "n_hard",
                    "sigma_f", "eps_f", "b_exp", "c_exp", "Q_act", "T0", "m_weib",
                    "consistency_rtol"});
    const std::string unit = get_string(m, path, "stress_unit", "Pa");
    double scale = 1.0;
    if (unit == "MPa")
        scale = 1e6;
    else if (unit != "Pa")
        fail(path + ".stress_unit", "expected \"Pa\" or \"MPa\"");

    MaterialParams& p = cfg.material;
    p.lambda = scale * get_number(m, path, "lambda");
    p.mu = scale * get_number(m, path, "mu");
    p.E = scale * get_number(m, path, "E");
    p.rho_cte = get_number(m, path, "rho_cte");
    p.k_cond = get_number(m, path, "k_cond");
    p.K_hard = scale * get_number(m, path, "K_hard");
    p.n_hard = get_number(m, path, "n_hard");
    p.sigma_f = scale * get_number(m, path, "sigma_f");
    p.eps_f = get_number(m, path, "eps_f");
    p.b_exp = get_number(m, path, "b_exp");
    p.c_exp = get_number(m, path, "c_exp");
    p.Q_act = get_number(m, path, "Q_act");
    p.T0 = get_number(m, path, "T0");
    p.m_weib = get_number(m, path, "m_weib", 0.0);  // may come from reliability.m instead
    cfg.consistency_rtol = get_number(m, path, "consistency_rtol", 1e-6);
}

void parse_reliability(const json& r, ProblemConfig& cfg) {
    const std::string path = "reliability";
    reject_unknown(r, path, {"m", "time_grid", "include_dirichlet_boundary"});
    if (r.contains("m")) {
        const double m = get_number(r, path, "m");
        if (cfg.material.m_weib != 0.0 && cfg.material.m_weib != m)
            fail(path + ".m", "conflicts with material.m_weib");
        cfg.material.m_weib = m;
    }
    if (r.contains("time_grid")) {
        const json& tg = r.at("time_grid");
        if (tg.is_array()) {
            for (const auto& t : tg) cfg.reliability.time_grid.push_back(t.get<double>());
        } else if (tg.is_object()) {
            reject_unknown(tg, path + ".time_grid", {"t_max", "points"});
            const double t_max = get_number(tg, path + ".time_grid", "t_max");
            const int points = get_int(tg, path + ".time_grid", "points", 21);
            for (int i = 0; i < points; ++i)
                cfg.reliability.time_grid.push_back(t_max * i / std::max(1, points - 1));
        } else {
            fail(path + ".time_grid", "expected array or {t_max, points}");
        }
    }
    cfg.reliability.include_dirichlet_boundary =
        get_bool(r, path, "include_dirichlet_boundary", true);
}

void parse_optimizer(const json& o, OptimizationConfig& opt) {
    const std::string path = "optimizer";
    reject_unknown(o, path,
                   {"initial_theta", "step", "max_evals", "w_volume", "w_det", "w_norm", "tol_J",
                    "seed", "restarts", "checkpoint"});
    if (o.contains("initial_theta")) {
        const json& t = o.at("initial_theta");
        if (!t.is_array()) fail(path + ".initial_theta", "expected an array of numbers");
        for (const auto& v : t) opt.initial_theta.push_back(v.get<double>());
    }
    opt.step = get_number(o, path, "step", 0.05);
    opt.max_evals = get_int(o, path, "max_evals", 300);
    opt.w_volume = get_number(o, path, "w_volume", 1e4);
    opt.w_det = get_number(o, path, "w_det", 1e3);
    opt.w_norm = get_number(o, path, "w_norm", 1e3);
    opt.tol_J = get_number(o, path, "tol_J", 1e-10);
    opt.seed = static_cast<uint64_t>(get_int(o, path, "seed", 1));
    opt.restarts = get_int(o, path, "restarts", 0);
    opt.checkpoint_path = get_string(o, path, "checkpoint", "");
    opt.validate();
}

}  // namespace

ProblemConfig parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse error in " + origin + ": " + e.what());
    }
    if (!root.is_object()) throw ValidationError("config root must be an object");
    reject_unknown(root, "<root>",
                   {"geometry", "material", "loads", "reliability", "optimizer", "sample",
                    "output"});

    ProblemConfig cfg;
    if (!root.contains("geometry")) fail("<root>", "missing required key 'geometry'");
    cfg.geometry = parse_geometry(root.at("geometry"));
    if (!root.contains("material")) fail("<root>", "missing required key 'material'");
    parse_material(root.at("material"), cfg);

    if (!root.contains("loads")) fail("<root>", "missing required key 'loads'");
    {
        const json& l = root.at("loads");
        reject_unknown(l, "loads", {"f", "g", "T_e", "eta", "traction_bound"});
        cfg.loads.f_expr = get_string_array(l, "loads", "f");
        cfg.loads.g_expr = get_string_array(l, "loads", "g");
        cfg.loads.Te_expr = get_string(l, "loads", "T_e", "");
        cfg.loads.eta_expr = get_string(l, "loads", "eta", "");
        cfg.loads.traction_bound = get_number(l, "loads", "traction_bound",
                                              std::numeric_limits<double>::infinity());
        if (cfg.loads.Te_expr.empty()) fail("loads", "missing required key 'T_e'");
        if (cfg.loads.eta_expr.empty()) fail("loads", "missing required key 'eta'");
        const size_t d = static_cast<size_t>(cfg.geometry.dim);
        if (!cfg.loads.f_expr.empty() && cfg.loads.f_expr.size() != d)
            fail("loads.f", "expected one expression per dimension");
        if (!cfg.loads.g_expr.empty() && cfg.loads.g_expr.size() != d)
            fail("loads.g", "expected one expression per dimension");
    }

    if (root.contains("reliability")) parse_reliability(root.at("reliability"), cfg);
    if (!(cfg.material.m_weib > 0.0))
        fail("reliability", "missing Weibull shape: set reliability.m or material.m_weib");
    if (root.contains("optimizer")) parse_optimizer(root.at("optimizer"), cfg.optimizer);

    if (root.contains("sample")) {
        const json& s = root.at("sample");
        reject_unknown(s, "sample", {"t_max", "replications", "seed"});
        cfg.sample.t_max = get_number(s, "sample", "t_max", 0.0);
        cfg.sample.replications = get_int(s, "sample", "replications", 10000);
        cfg.sample.seed = static_cast<uint64_t>(get_int(s, "sample", "seed", 42));
    }

    if (root.contains("output")) {
        const json& o = root.at("output");
        reject_unknown(o, "output", {"directory", "formats", "gnuplot"});
        cfg.output.directory = get_string(o, "output", "directory", "out");
        if (o.contains("formats")) {
            cfg.output.csv = cfg.output.json = false;
            for (const auto& f : get_string_array(o, "output", "formats")) {
                if (f == "csv")
                    cfg.output.csv = true;
                else if (f == "json")
                    cfg.output.json = true;
                else
                    fail("output.formats", "unknown format '" + f + "'");
            }
        }
        cfg.output.gnuplot = get_bool(o, "output", "gnuplot", false);
    }

    // module invariants re-checked at load time
    cfg.material.validate(cfg.consistency_rtol);
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

Problem build_problem(const ProblemConfig& cfg) {
    std::shared_ptr<const Mesh> mesh;
    if (cfg.geometry.dim == 2) {
        mesh = std::make_shared<const Mesh>(build_baseline(cfg.geometry.design,
                                                           cfg.geometry.resolution));
    } else {
        const int layers =
            cfg.geometry.layers > 0
                ? cfg.geometry.layers
                : std::max(1, static_cast<int>(std::ceil(cfg.geometry.thickness /
                                                         cfg.geometry.resolution)));
        mesh = std::make_shared<const Mesh>(build_baseline(
            cfg.geometry.design, cfg.geometry.resolution, cfg.geometry.thickness, layers));
    }

    const DeformationMap map_template =
        make_map(cfg.geometry.design, {}, cfg.geometry.bound_K, cfg.geometry.basis_modes);

    RobinData robin;
    robin.k_cond = cfg.material.k_cond;
    {
        const Expression eta = Expression::parse(cfg.loads.eta_expr);
        const Expression te = Expression::parse(cfg.loads.Te_expr);
        robin.eta = [eta](const Vec3& x, const Vec3&) { return eta.eval(x); };
        robin.T_ambient = [te](const Vec3& x, const Vec3&) { return te.eval(x); };
    }

    LoadData loads;
    if (!cfg.loads.f_expr.empty()) {
        std::vector<Expression> fe;
        for (const auto& s : cfg.loads.f_expr) fe.push_back(Expression::parse(s));
        loads.f = [fe](const Vec3& x) {
            Vec3 v;
            for (size_t i = 0; i < fe.size(); ++i) v[static_cast<int>(i)] = fe[i].eval(x);
            return v;
        };
    }
    if (!cfg.loads.g_expr.empty()) {
        std::vector<Expression> ge;
        for (const auto& s : cfg.loads.g_expr) ge.push_back(Expression::parse(s));
        loads.g = [ge](const Vec3& x, const Vec3&) {
            Vec3 v;
            for (size_t i = 0; i < ge.size(); ++i) v[static_cast<int>(i)] = ge[i].eval(x);
            return v;
        };
    }
    loads.traction_bound = cfg.loads.traction_bound;

    ReliabilityOptions rel;
    rel.include_dirichlet_boundary = cfg.reliability.include_dirichlet_boundary;

    return make_problem(cfg.geometry.design, map_template, mesh, cfg.material, std::move(robin),
                        std::move(loads), rel, cfg.geometry.det_floor, cfg.geometry.vol_tol);
}

}  // namespace thermorel
