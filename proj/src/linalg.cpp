#include "thermorel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace thermorel {

CsrMatrix CsrMatrix::from_triplets(const TripletList& t) {
    const int n = t.size();
    std::vector<int> count(n + 1, 0);
    for (const auto& e : t.entries()) ++count[e.i + 1];

    CsrMatrix m;
    m.n = n;
    m.row_ptr.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) m.row_ptr[i + 1] = m.row_ptr[i] + count[i + 1];

    std::vector<int> cursor(m.row_ptr.begin(), m.row_ptr.end() - 1);
    std::vector<int> cols(t.entries().size());
    std::vector<double> vals(t.entries().size());
    for (const auto& e : t.entries()) {
        const int k = cursor[e.i]++;
        cols[k] = e.j;
        vals[k] = e.v;
    }

    // sort each row and merge duplicates
    m.col.reserve(cols.size());
    m.val.reserve(vals.size());
    std::vector<int> final_ptr(n + 1, 0);
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n; ++i) {
        row.clear();
        for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) row.emplace_back(cols[k], vals[k]);
        // stable: duplicate entries merge in insertion order on both sides of
        // the diagonal, keeping symmetric assemblies exactly symmetric
        std::stable_sort(row.begin(), row.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t k = 0; k < row.size(); ++k) {
            if (!m.col.empty() && static_cast<int>(m.col.size()) > final_ptr[i] &&
                m.col.back() == row[k].first) {
                m.val.back() += row[k].second;
            } else {
                m.col.push_back(row[k].first);
                m.val.push_back(row[k].second);
            }
        }
        final_ptr[i + 1] = static_cast<int>(m.col.size());
    }
    m.row_ptr = std::move(final_ptr);
    return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

double CsrMatrix::diagonal(int i) const {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (col[k] == i) return val[k];
    return 0.0;
}

double CsrMatrix::symmetry_defect() const {
    double defect = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const int j = col[k];
            double aji = 0.0;
            for (int l = row_ptr[j]; l < row_ptr[j + 1]; ++l)
                if (col[l] == i) {
                    aji = val[l];
                    break;
                }
            defect = std::max(defect, std::fabs(val[k] - aji));
        }
    }
    return defect;
}

namespace {
double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
}  // namespace

CgResult cg_solve(const CsrMatrix& A, std::span<const double> b, std::span<double> x,
                  double rtol, int max_iter) {
    const int n = A.n;
    if (max_iter < 0) max_iter = std::max(200, 20 * n);

    std::vector<double> inv_diag(n);
    for (int i = 0; i < n; ++i) {
        const double d = A.diagonal(i);
        if (d <= 0.0) throw NumericalError("cg_solve: non-positive diagonal, system not SPD");
        inv_diag[i] = 1.0 / d;
    }

    std::vector<double> r(n), zv(n), p(n), Ap(n);
    A.multiply(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];

    const double bnorm = std::sqrt(dot(b, b));
    const double stop = rtol * (bnorm > 0.0 ? bnorm : 1.0);

    for (int i = 0; i < n; ++i) zv[i] = inv_diag[i] * r[i];
    p = zv;
    double rz = dot(r, zv);

    CgResult res;
    double rnorm = std::sqrt(dot(r, r));
    for (int it = 0; it < max_iter && rnorm > stop; ++it) {
        A.multiply(p, Ap);
        const double pAp = dot(p, Ap);
        if (pAp <= 0.0) throw NumericalError("cg_solve: breakdown (matrix not SPD)");
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        for (int i = 0; i < n; ++i) zv[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, zv);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = zv[i] + beta * p[i];
        rnorm = std::sqrt(dot(r, r));
        res.iterations = it + 1;
    }
    res.rel_residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
    res.converged = rnorm <= stop;
    return res;
}

std::vector<double> dense_spd_solve(const CsrMatrix& A, std::span<const double> b) {
    const int n = A.n;
    if (n > 2000) throw ValidationError("dense_spd_solve: system too large for the dense path");

    std::vector<double> M(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            M[static_cast<size_t>(i) * n + A.col[k]] = A.val[k];

    // in-place Cholesky M = L L^T
    for (int j = 0; j < n; ++j) {
        double d = M[static_cast<size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) {
            const double l = M[static_cast<size_t>(j) * n + k];
            d -= l * l;
        }
        if (d <= 0.0) throw NumericalError("dense_spd_solve: matrix not positive definite");
        const double ljj = std::sqrt(d);
        M[static_cast<size_t>(j) * n + j] = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = M[static_cast<size_t>(i) * n + j];
            for (int k = 0; k < j; ++k)
                s -= M[static_cast<size_t>(i) * n + k] * M[static_cast<size_t>(j) * n + k];
            M[static_cast<size_t>(i) * n + j] = s / ljj;
        }
    }

    std::vector<double> y(n), x(n);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= M[static_cast<size_t>(i) * n + k] * y[k];
        y[i] = s / M[static_cast<size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= M[static_cast<size_t>(k) * n + i] * x[k];
        x[i] = s / M[static_cast<size_t>(i) * n + i];
    }
    return x;
}

double relative_residual(const CsrMatrix& A, std::span<const double> b,
                         std::span<const double> x) {
    std::vector<double> r(A.n);
    A.multiply(x, r);
    double rn = 0.0, bn = 0.0;
    for (int i = 0; i < A.n; ++i) {
        rn += (r[i] - b[i]) * (r[i] - b[i]);
        bn += b[i] * b[i];
    }
    return bn > 0.0 ? std::sqrt(rn / bn) : std::sqrt(rn);
}

}  // namespace thermorel
