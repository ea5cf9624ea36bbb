#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace bakhfem {

// Compressed sparse row matrix with sorted column indices per row.
struct SparseMatrixCSR {
    int n = 0;
    std::vector<int> row_ptr; // size n+1
    std::vector<int> col_idx; // size nnz, ascending within each row
    std::vector<double> vals;

    std::size_t nnz() const { return col_idx.size(); }

    // y = A*x
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;

    // Reference to the entry (r, c); the pair must be in the pattern.
    double& at(int r, int c);
    double get(int r, int c) const; // 0 when outside the pattern
};

// Matrix Market coordinate format, general real, 1-based indices.
void write_matrix_market(const SparseMatrixCSR& A, std::ostream& os);

} // namespace bakhfem
