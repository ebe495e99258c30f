#include "thermorel/fields.hpp"

#include <algorithm>
#include <cmath>

namespace thermorel {

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }

double VectorField::max_norm() const {
    double m = 0.0;
    for (int i = 0; i < mesh->n_nodes(); ++i) m = std::max(m, at_node(i).norm());
    return m;
}

std::vector<Vec3> cell_gradients(const ScalarField& f) {
    const Mesh& mesh = *f.mesh;
    std::vector<Vec3> g(mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto grads = mesh.shape_gradients(c);
        Vec3 s;
        for (int i = 0; i <= mesh.dim; ++i) s += grads[i] * f.values[mesh.cells[c][i]];
        g[c] = s;
    }
    return g;
}

std::vector<Vec3> recovered_nodal_gradients(const ScalarField& f) {
    const Mesh& mesh = *f.mesh;
    const auto cg = cell_gradients(f);
    std::vector<Vec3> g(mesh.n_nodes());
    std::vector<double> w(mesh.n_nodes(), 0.0);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        for (int i = 0; i <= mesh.dim; ++i) {
            g[mesh.cells[c][i]] += cg[c] * vol;
            w[mesh.cells[c][i]] += vol;
        }
    }
    for (int i = 0; i < mesh.n_nodes(); ++i) g[i] = g[i] / w[i];
    return g;
}

std::vector<Mat3> cell_gradient_tensors(const VectorField& u) {
    const Mesh& mesh = *u.mesh;
    std::vector<Mat3> g(mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto grads = mesh.shape_gradients(c);
        Mat3 t;
        for (int i = 0; i <= mesh.dim; ++i) {
            const Vec3 ui = u.at_node(mesh.cells[c][i]);
            for (int a = 0; a < mesh.dim; ++a)
                for (int b = 0; b < mesh.dim; ++b) t(a, b) += ui[a] * grads[i][b];
        }
        g[c] = t;
    }
    return g;
}

std::vector<Mat3> recovered_nodal_gradient_tensors(const VectorField& u) {
    const Mesh& mesh = *u.mesh;
    const auto cg = cell_gradient_tensors(u);
    std::vector<Mat3> g(mesh.n_nodes());
    std::vector<double> w(mesh.n_nodes(), 0.0);
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const double vol = mesh.cell_volume(c);
        for (int i = 0; i <= mesh.dim; ++i) {
            g[mesh.cells[c][i]] += cg[c] * vol;
            w[mesh.cells[c][i]] += vol;
        }
    }
    for (int i = 0; i < mesh.n_nodes(); ++i) g[i] = g[i] * (1.0 / w[i]);
    return g;
}

std::array<double, 3> facet_weights(const Mesh& mesh, const Facet& f, const Vec3& p) {
    if (mesh.dim == 2) {
        const Vec3& a = mesh.nodes[f.nodes[0]];
        const Vec3& b = mesh.nodes[f.nodes[1]];
        const Vec3 e = b - a;
        double s = e.dot(p - a) / e.dot(e);
        s = std::clamp(s, 0.0, 1.0);
        return {1.0 - s, s, 0.0};
    }
    const Vec3& a = mesh.nodes[f.nodes[0]];
    const Vec3 e1 = mesh.nodes[f.nodes[1]] - a;
    const Vec3 e2 = mesh.nodes[f.nodes[2]] - a;
    const Vec3 d = p - a;
    const double m11 = e1.dot(e1), m12 = e1.dot(e2), m22 = e2.dot(e2);
    const double r1 = e1.dot(d), r2 = e2.dot(d);
    const double det = m11 * m22 - m12 * m12;
    const double s = (m22 * r1 - m12 * r2) / det;
    const double t = (m11 * r2 - m12 * r1) / det;
    return {1.0 - s - t, s, t};
}

}  // namespace thermorel
