#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "bsl/prime.hpp"

namespace bsl {

// Dense integer matrix, row-major, exact entries.
class IntMatrix {
  public:
    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    mpz_class& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const mpz_class& at(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * cols_ + j];
    }

    static IntMatrix identity(int n);
    static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

    bool operator==(const IntMatrix& o) const = default;

  private:
    int rows_, cols_;
    std::vector<mpz_class> a_;
};

// Exact determinant by fraction-free elimination with row pivoting.
mpz_class det_bareiss(const IntMatrix& m);

// Rank over Z/pZ.
int rank_mod_p(const IntMatrix& m, const PrimeModulus& pm);

// Rank over Q (fraction-free elimination).
int rank_exact(const IntMatrix& m);

// A nonzero integer vector k with m * k = 0, content 1, first nonzero entry
// positive; empty when the columns are independent.
std::vector<mpz_class> kernel_vector_exact(const IntMatrix& m);

// Basis of {k : m k = 0} as integer vectors, content 1, one per free column.
std::vector<std::vector<mpz_class>> kernel_basis_exact(const IntMatrix& m);

// Does y lie in the row span of `basis` over Q?
bool in_row_span(const IntMatrix& basis, const std::vector<mpz_class>& y);

} // namespace bsl
