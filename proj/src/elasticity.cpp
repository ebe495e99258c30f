#include "thermorel/elasticity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "thermorel/linalg.hpp"

namespace thermorel {

ElasticitySystem assemble_elasticity_system(const Shape& shape, const LoadData& loads,
                                            const ScalarField& T, const MaterialParams& p) {
    const Mesh& mesh = *shape.mesh;
    if (T.mesh.get() != shape.mesh.get() || static_cast<int>(T.values.size()) != mesh.n_nodes())
        throw ValidationError("solve_elasticity: temperature field not on the shape's mesh");

    const int d = mesh.dim;
    const int n_dof = mesh.n_nodes() * d;
    const double c_th = p.thermal_stress_coeff();

    std::vector<char> fixed(mesh.n_nodes(), 0);
    for (const auto& f : mesh.boundary_facets)
        if (f.tag == BoundaryTag::Dirichlet)
            for (int i = 0; i < d; ++i) fixed[f.nodes[i]] = 1;
    if (std::find(fixed.begin(), fixed.end(), 1) == fixed.end())
        throw ValidationError("solve_elasticity: empty Dirichlet set leaves rigid modes");

    TripletList triplets(n_dof);
    std::vector<double> rhs(n_dof, 0.0);
    auto dof = [d](int node, int comp) { return node * d + comp; };

    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto grads = mesh.shape_gradients(c);
        const double vol = mesh.cell_volume(c);
        const auto& cell = mesh.cells[c];

        // stiffness: lambda (div u)(div v) + mu (grad u + grad u^T) : grad v
        for (int i = 0; i <= d; ++i)
            for (int j = 0; j <= d; ++j) {
                const double gij = grads[i].dot(grads[j]);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) {
                        const double k = vol * (p.lambda * grads[i][a] * grads[j][b] +
                                                p.mu * grads[i][b] * grads[j][a] +
                                                (a == b ? p.mu * gij : 0.0));
                        triplets.add(dof(cell[i], a), dof(cell[j], b), k);
                    }
            }

        // thermal domain term rho(3l+2m)(T - T0) div v: exact for P1 temperature
        double t_mean = 0.0;
        for (int i = 0; i <= d; ++i) t_mean += T.values[cell[i]];
        t_mean /= (d + 1);
        for (int i = 0; i <= d; ++i)
            for (int a = 0; a < d; ++a)
                rhs[dof(cell[i], a)] += c_th * (t_mean - p.T0) * grads[i][a] * vol;

        // volume force, order-2 quadrature with P1 test-function weights
        if (loads.f) {
            const Vec3 x0 = mesh.nodes[cell[0]];
            for (const auto& qp : mesh.cell_quadrature(c)) {
                const Vec3 fv = loads.f(qp.point);
                // P1 shape values: lambda_i(x) = grad lambda_i . (x - x0), lambda_0 = 1 - sum
                std::array<double, 4> w{};
                w[0] = 1.0;
                for (int i = 1; i <= d; ++i) {
                    w[i] = grads[i].dot(qp.point - x0);
                    w[0] -= w[i];
                }
                for (int i = 0; i <= d; ++i)
                    for (int a = 0; a < d; ++a) rhs[dof(cell[i], a)] += qp.weight * fv[a] * w[i];
            }
        }
    }

    // tractions on the Robin/Neumann part
    if (loads.g) {
        for (const auto& f : mesh.boundary_facets) {
            if (f.tag != BoundaryTag::RobinNeumann) continue;
            const Vec3 normal = mesh.facet_normal(f);
            for (const auto& qp : mesh.facet_quadrature(f)) {
                const Vec3 gv = loads.g(qp.point, normal);
                if (gv.norm() > loads.traction_bound)
                    throw ValidationError("solve_elasticity: traction exceeds the configured "
                                          "bound at a boundary quadrature point");
                const auto w = facet_weights(mesh, f, qp.point);
                for (int i = 0; i < d; ++i)
                    for (int a = 0; a < d; ++a)
                        rhs[dof(f.nodes[i], a)] += qp.weight * gv[a] * w[i];
            }
        }
    }

    // Dirichlet elimination, symmetry-preserving
    std::vector<double> bc_value(n_dof, 0.0);
    for (int node = 0; node < mesh.n_nodes(); ++node) {
        if (!fixed[node]) continue;
        const Vec3 uD = loads.dirichlet_values ? loads.dirichlet_values(mesh.nodes[node]) : Vec3{};
        for (int a = 0; a < d; ++a) bc_value[dof(node, a)] = uD[a];
    }
    std::vector<char> fixed_dof(n_dof, 0);
    for (int node = 0; node < mesh.n_nodes(); ++node)
        if (fixed[node])
            for (int a = 0; a < d; ++a) fixed_dof[dof(node, a)] = 1;

    CsrMatrix A = CsrMatrix::from_triplets(triplets);
    for (int i = 0; i < A.n; ++i) {
        if (fixed_dof[i]) {
            for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
                A.val[k] = (A.col[k] == i) ? 1.0 : 0.0;
            rhs[i] = bc_value[i];
        } else {
            for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
                if (fixed_dof[A.col[k]]) {
                    rhs[i] -= A.val[k] * bc_value[A.col[k]];
                    A.val[k] = 0.0;
                }
            }
        }
    }
    return {std::move(A), std::move(rhs), std::move(bc_value), std::move(fixed_dof)};
}

VectorField solve_elasticity(const Shape& shape, const LoadData& loads, const ScalarField& T,
                             const MaterialParams& p) {
    ElasticitySystem sys = assemble_elasticity_system(shape, loads, T, p);
    const int n_dof = sys.A.n;

    std::vector<double> x = sys.bc_values;  // warm start satisfying the constraints
    const CgResult cg = cg_solve(sys.A, sys.rhs, x, 1e-12);
    if (!cg.converged || relative_residual(sys.A, sys.rhs, x) > 1e-10)
        throw NumericalError("solve_elasticity: linear solver stalled");
    for (int i = 0; i < n_dof; ++i)
        if (sys.fixed_dof[i]) x[i] = sys.bc_values[i];  // exact values on the clamped set

    VectorField u;
    u.mesh = shape.mesh;
    u.values = std::move(x);
    return u;
}

StressField stress(const Shape& shape, const VectorField& u, const ScalarField& T,
                   const MaterialParams& p) {
    const Mesh& mesh = *shape.mesh;
    if (u.mesh.get() != shape.mesh.get() || T.mesh.get() != shape.mesh.get())
        throw ValidationError("stress: fields not on the shape's mesh");

    StressField s;
    s.mesh = shape.mesh;
    s.cell_stress.resize(mesh.n_cells());
    const auto grad_u = cell_gradient_tensors(u);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        double t_mean = 0.0;
        for (int i = 0; i <= mesh.dim; ++i) t_mean += T.values[mesh.cells[c][i]];
        t_mean /= (mesh.dim + 1);
        s.cell_stress[c] = thermo_stress_tensor(grad_u[c], mesh.dim, t_mean, p);
    }
    return s;
}

}  // namespace thermorel
