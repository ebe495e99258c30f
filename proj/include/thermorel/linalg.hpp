#pragma once

#include <span>
#include <vector>

#include "thermorel/common.hpp"

namespace thermorel {

/// Coordinate-format accumulator; duplicate entries are summed on conversion.
class TripletList {
public:
    explicit TripletList(int n) : n_(n) {}
    void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
    int size() const { return n_; }

    struct Entry {
        int i, j;
        double v;
    };
    const std::vector<Entry>& entries() const { return entries_; }

private:
    int n_;
    std::vector<Entry> entries_;
};

struct CsrMatrix {
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    static CsrMatrix from_triplets(const TripletList& t);

    void multiply(std::span<const double> x, std::span<double> y) const;
    double diagonal(int i) const;
    /// max |A_ij - A_ji| over stored entries.
    double symmetry_defect() const;
};

struct CgResult {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems.
CgResult cg_solve(const CsrMatrix& A, std::span<const double> b, std::span<double> x,
                  double rtol = 1e-12, int max_iter = -1);

/// Dense Cholesky solve; independent cross-check path for systems under ~2000 unknowns.
std::vector<double> dense_spd_solve(const CsrMatrix& A, std::span<const double> b);

double relative_residual(const CsrMatrix& A, std::span<const double> b, std::span<const double> x);

}  // namespace thermorel
