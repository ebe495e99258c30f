#pragma once

#include <string>
#include <vector>

#include "thermorel/elasticity.hpp"
#include "thermorel/fields.hpp"
#include "thermorel/mesh.hpp"
#include "thermorel/optimize.hpp"
#include "thermorel/reliability.hpp"

namespace thermorel {

/// Plain-text mesh format (nodes / cells / facets sections, %.17g floats) and
/// a JSON mirror; both round-trip losslessly. Layout documented in docs/FORMATS.md.
void write_mesh_text(const Mesh& mesh, const std::string& path);
Mesh read_mesh_text(const std::string& path);
void write_mesh_json(const Mesh& mesh, const std::string& path);
Mesh read_mesh_json(const std::string& path);

/// CSV: node_id,x,y[,z],value — ordered by node id.
void write_scalar_field_csv(const ScalarField& f, const std::string& path);
void write_scalar_field_json(const ScalarField& f, const std::string& path);

/// CSV: node_id,x,y[,z],u_x,u_y[,u_z].
void write_vector_field_csv(const VectorField& f, const std::string& path);
void write_vector_field_json(const VectorField& f, const std::string& path);

/// CSV: cell_id,cx,cy[,cz],s11,s22,s33,s12,s13,s23.
void write_stress_csv(const StressField& s, const std::string& path);
void write_stress_json(const StressField& s, const std::string& path);

/// J, N_scale, m, CDF samples on the given time grid, per-facet N_sur table.
void write_report_json(const ReliabilityReport& report, const std::vector<double>& time_grid,
                       const std::string& path);

/// CSV: time,x,y[,z],facet.
void write_events_csv(const CrackEventSet& events, int dim, const std::string& path);

void write_trace_csv(const OptimizationTrace& trace, const std::string& path);
void write_trace_json(const OptimizationTrace& trace, const std::string& path);

/// Minimal gnuplot script plotting a two-column CSV.
void write_gnuplot_script(const std::string& csv_path, const std::string& title,
                          const std::string& path);

}  // namespace thermorel
