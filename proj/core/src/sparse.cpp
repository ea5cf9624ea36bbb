#include "bakhfem/sparse.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bakhfem {

void SparseMatrixCSR::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            s += vals[k] * x[col_idx[k]];
        y[r] = s;
    }
}

double& SparseMatrixCSR::at(int r, int c) {
    auto first = col_idx.begin() + row_ptr[r];
    auto last = col_idx.begin() + row_ptr[r + 1];
    auto it = std::lower_bound(first, last, c);
    if (it == last || *it != c)
        throw std::out_of_range("SparseMatrixCSR::at: entry outside the pattern");
    return vals[it - col_idx.begin()];
}

double SparseMatrixCSR::get(int r, int c) const {
    auto first = col_idx.begin() + row_ptr[r];
    auto last = col_idx.begin() + row_ptr[r + 1];
    auto it = std::lower_bound(first, last, c);
    return (it == last || *it != c) ? 0.0 : vals[it - col_idx.begin()];
}

void write_matrix_market(const SparseMatrixCSR& A, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.n << ' ' << A.n << ' ' << A.nnz() << '\n';
    char buf[64];
    for (int r = 0; r < A.n; ++r) {
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%.17E", A.vals[k]);
            os << (r + 1) << ' ' << (A.col_idx[k] + 1) << ' ' << buf << '\n';
        }
    }
}

} // namespace bakhfem
