#include "thermorel/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace thermorel {

namespace {

using json = nlohmann::json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open for reading: " + path);
    return in;
}

const char* tag_name(BoundaryTag t) {
    return t == BoundaryTag::Dirichlet ? "dirichlet" : "robin_neumann";
}

BoundaryTag tag_from(const std::string& s) {
    if (s == "dirichlet") return BoundaryTag::Dirichlet;
    if (s == "robin_neumann") return BoundaryTag::RobinNeumann;
    throw ValidationError("unknown boundary tag: " + s);
}

}  // namespace

void write_mesh_text(const Mesh& mesh, const std::string& path) {
    auto out = open_out(path);
    out << "thermorel-mesh 1\n";
    out << "dim " << mesh.dim << "\n";
    out << "nodes " << mesh.n_nodes() << "\n";
    for (const auto& p : mesh.nodes) {
        out << fmt_full(p.x) << " " << fmt_full(p.y);
        if (mesh.dim == 3) out << " " << fmt_full(p.z);
        out << "\n";
    }
    out << "cells " << mesh.n_cells() << "\n";
    for (const auto& c : mesh.cells) {
        out << c[0] << " " << c[1] << " " << c[2];
        if (mesh.dim == 3) out << " " << c[3];
        out << "\n";
    }
    out << "facets " << mesh.boundary_facets.size() << "\n";
    for (const auto& f : mesh.boundary_facets) {
        out << f.nodes[0] << " " << f.nodes[1];
        if (mesh.dim == 3) out << " " << f.nodes[2];
        out << " " << f.cell << " " << tag_name(f.tag) << "\n";
    }
}

Mesh read_mesh_text(const std::string& path) {
    auto in = open_in(path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "thermorel-mesh" || version != 1)
        throw ValidationError("not a thermorel mesh file: " + path);

    Mesh mesh;
    std::string section;
    int count = 0;
    in >> section >> mesh.dim;
    if (section != "dim" || (mesh.dim != 2 && mesh.dim != 3))
        throw ValidationError("mesh file: bad dim section");

    in >> section >> count;
    if (section != "nodes") throw ValidationError("mesh file: expected nodes section");
    mesh.nodes.resize(count);
    for (auto& p : mesh.nodes) {
        in >> p.x >> p.y;
        if (mesh.dim == 3) in >> p.z;
    }

    in >> section >> count;
    if (section != "cells") throw ValidationError("mesh file: expected cells section");
    mesh.cells.resize(count);
    for (auto& c : mesh.cells) {
        c = {-1, -1, -1, -1};
        in >> c[0] >> c[1] >> c[2];
        if (mesh.dim == 3) in >> c[3];
    }

    in >> section >> count;
    if (section != "facets") throw ValidationError("mesh file: expected facets section");
    mesh.boundary_facets.resize(count);
    for (auto& f : mesh.boundary_facets) {
        std::string tag;
        in >> f.nodes[0] >> f.nodes[1];
        if (mesh.dim == 3) in >> f.nodes[2];
        in >> f.cell >> tag;
        f.tag = tag_from(tag);
    }
    if (!in) throw ValidationError("mesh file truncated: " + path);
    return mesh;
}

namespace {
json mesh_to_json(const Mesh& mesh) {
    json j;
    j["format"] = "thermorel-mesh";
    j["version"] = 1;
    j["dim"] = mesh.dim;
    json nodes = json::array();
    for (const auto& p : mesh.nodes) {
        json n = json::array({p.x, p.y});
        if (mesh.dim == 3) n.push_back(p.z);
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    json cells = json::array();
    for (const auto& c : mesh.cells) {
        json e = json::array({c[0], c[1], c[2]});
        if (mesh.dim == 3) e.push_back(c[3]);
        cells.push_back(std::move(e));
    }
    j["cells"] = std::move(cells);
    json facets = json::array();
    for (const auto& f : mesh.boundary_facets) {
        json nodes_j = json::array({f.nodes[0], f.nodes[1]});
        if (mesh.dim == 3) nodes_j.push_back(f.nodes[2]);
        facets.push_back({{"nodes", nodes_j}, {"cell", f.cell}, {"tag", tag_name(f.tag)}});
    }
    j["facets"] = std::move(facets);
    return j;
}
}  // namespace

void write_mesh_json(const Mesh& mesh, const std::string& path) {
    auto out = open_out(path);
    out << mesh_to_json(mesh).dump(2) << "\n";
}

Mesh read_mesh_json(const std::string& path) {
    auto in = open_in(path);
    json j;
    in >> j;
    if (j.value("format", "") != "thermorel-mesh" || j.value("version", 0) != 1)
        throw ValidationError("not a thermorel mesh JSON file: " + path);
    Mesh mesh;
    mesh.dim = j.at("dim").get<int>();
    for (const auto& n : j.at("nodes"))
        mesh.nodes.push_back({n[0].get<double>(), n[1].get<double>(),
                              mesh.dim == 3 ? n[2].get<double>() : 0.0});
    for (const auto& c : j.at("cells")) {
        std::array<int, 4> cell{-1, -1, -1, -1};
        for (size_t i = 0; i < c.size(); ++i) cell[i] = c[i].get<int>();
        mesh.cells.push_back(cell);
    }
    for (const auto& f : j.at("facets")) {
        Facet facet;
        const auto& nodes = f.at("nodes");
        for (size_t i = 0; i < nodes.size(); ++i) facet.nodes[i] = nodes[i].get<int>();
        facet.cell = f.at("cell").get<int>();
        facet.tag = tag_from(f.at("tag").get<std::string>());
        mesh.boundary_facets.push_back(facet);
    }
    return mesh;
}

void write_scalar_field_csv(const ScalarField& f, const std::string& path) {
    auto out = open_out(path);
    const int d = f.mesh->dim;
    out << (d == 3 ? "node_id,x,y,z,value\n" : "node_id,x,y,value\n");
    for (int i = 0; i < f.mesh->n_nodes(); ++i) {
        const Vec3& p = f.mesh->nodes[i];
        out << i << "," << fmt_full(p.x) << "," << fmt_full(p.y);
        if (d == 3) out << "," << fmt_full(p.z);
        out << "," << fmt_full(f.values[i]) << "\n";
    }
}

void write_scalar_field_json(const ScalarField& f, const std::string& path) {
    json j;
    j["dim"] = f.mesh->dim;
    j["values"] = f.values;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_vector_field_csv(const VectorField& f, const std::string& path) {
    auto out = open_out(path);
    const int d = f.mesh->dim;
    out << (d == 3 ? "node_id,x,y,z,u_x,u_y,u_z\n" : "node_id,x,y,u_x,u_y\n");
    for (int i = 0; i < f.mesh->n_nodes(); ++i) {
        const Vec3& p = f.mesh->nodes[i];
        const Vec3 u = f.at_node(i);
        out << i << "," << fmt_full(p.x) << "," << fmt_full(p.y);
        if (d == 3) out << "," << fmt_full(p.z);
        out << "," << fmt_full(u.x) << "," << fmt_full(u.y);
        if (d == 3) out << "," << fmt_full(u.z);
        out << "\n";
    }
}

void write_vector_field_json(const VectorField& f, const std::string& path) {
    json j;
    j["dim"] = f.mesh->dim;
    j["values"] = f.values;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_stress_csv(const StressField& s, const std::string& path) {
    auto out = open_out(path);
    const int d = s.mesh->dim;
    out << (d == 3 ? "cell_id,cx,cy,cz,s11,s22,s33,s12,s13,s23\n"
                   : "cell_id,cx,cy,s11,s22,s33,s12,s13,s23\n");
    for (int c = 0; c < s.mesh->n_cells(); ++c) {
        const Vec3 ctr = s.mesh->cell_centroid(c);
        const Mat3& t = s.cell_stress[c];
        out << c << "," << fmt_full(ctr.x) << "," << fmt_full(ctr.y);
        if (d == 3) out << "," << fmt_full(ctr.z);
        out << "," << fmt_full(t(0, 0)) << "," << fmt_full(t(1, 1)) << "," << fmt_full(t(2, 2))
            << "," << fmt_full(t(0, 1)) << "," << fmt_full(t(0, 2)) << "," << fmt_full(t(1, 2))
            << "\n";
    }
}

void write_stress_json(const StressField& s, const std::string& path) {
    json cells = json::array();
    for (int c = 0; c < s.mesh->n_cells(); ++c) {
        const Mat3& t = s.cell_stress[c];
        cells.push_back({{"cell", c},
                         {"s", {t(0, 0), t(1, 1), t(2, 2), t(0, 1), t(0, 2), t(1, 2)}}});
    }
    json j;
    j["dim"] = s.mesh->dim;
    j["cells"] = std::move(cells);
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_report_json(const ReliabilityReport& report, const std::vector<double>& time_grid,
                       const std::string& path) {
    json j;
    j["J"] = report.J;
    j["m"] = report.m;
    j["volume_term"] = report.volume_term;
    if (report.N_scale.is_infinite())
        j["N_scale"] = "inf";
    else
        j["N_scale"] = report.N_scale.cycles();

    json cdf = json::array();
    for (double t : time_grid)
        cdf.push_back({{"t", t}, {"F", failure_cdf(t, report)}});
    j["cdf"] = std::move(cdf);

    json table = json::array();
    for (const auto& s : report.samples) {
        json row;
        row["facet"] = s.facet;
        row["x"] = s.point.x;
        row["y"] = s.point.y;
        row["z"] = s.point.z;
        row["weight"] = s.weight;
        if (s.n_sur.is_infinite())
            row["N_sur"] = "inf";
        else
            row["N_sur"] = s.n_sur.cycles();
        table.push_back(std::move(row));
    }
    j["n_sur_table"] = std::move(table);
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_events_csv(const CrackEventSet& events, int dim, const std::string& path) {
    auto out = open_out(path);
    out << (dim == 3 ? "time,x,y,z,facet\n" : "time,x,y,facet\n");
    for (const auto& e : events.events) {
        out << fmt_full(e.time) << "," << fmt_full(e.location.x) << "," << fmt_full(e.location.y);
        if (dim == 3) out << "," << fmt_full(e.location.z);
        out << "," << e.facet << "\n";
    }
}

void write_trace_csv(const OptimizationTrace& trace, const std::string& path) {
    auto out = open_out(path);
    out << "eval,J,penalized,volume_rel_dev,min_det,coeff_budget,feasible,incumbent_J";
    const size_t n_theta = trace.entries.empty() ? 0 : trace.entries.front().theta.size();
    for (size_t i = 0; i < n_theta; ++i) out << ",theta" << i;
    out << "\n";
    for (const auto& e : trace.entries) {
        out << e.eval << "," << fmt_full(e.J) << "," << fmt_full(e.penalized) << ","
            << fmt_full(e.volume_rel_dev) << "," << fmt_full(e.min_det) << ","
            << fmt_full(e.coeff_budget) << "," << (e.feasible ? 1 : 0) << ","
            << fmt_full(e.incumbent_J);
        for (double t : e.theta) out << "," << fmt_full(t);
        out << "\n";
    }
}

void write_trace_json(const OptimizationTrace& trace, const std::string& path) {
    json entries = json::array();
    for (const auto& e : trace.entries)
        entries.push_back({{"eval", e.eval},
                           {"theta", e.theta},
                           {"J", e.J},
                           {"penalized", e.penalized},
                           {"volume_rel_dev", e.volume_rel_dev},
                           {"min_det", e.min_det},
                           {"coeff_budget", e.coeff_budget},
                           {"feasible", e.feasible},
                           {"incumbent_J", e.incumbent_J}});
    json j;
    j["entries"] = std::move(entries);
    j["best_theta"] = trace.best_theta;
    j["best_J"] = trace.best_J;
    j["has_feasible"] = trace.has_feasible;
    j["evals"] = trace.evals;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_gnuplot_script(const std::string& csv_path, const std::string& title,
                          const std::string& path) {
    auto out = open_out(path);
    out << "set datafile separator ','\n";
    out << "set key autotitle columnhead\n";
    out << "set title '" << title << "'\n";
    out << "plot '" << csv_path << "' using 1:2 with lines\n";
}

}  // namespace thermorel
