#include "bsl/int_matrix.hpp"

#include "bsl/error.hpp"

namespace bsl {

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
    IntMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c) {
            throw PreconditionError("ragged rows in matrix literal");
        }
        for (int j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

mpz_class det_bareiss(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw PreconditionError("determinant of non-square matrix");
    const int n = m.rows();
    if (n == 0) return 1;
    IntMatrix w = m;
    mpz_class prev = 1;
    int sign = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (w.at(k, k) == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i) {
                if (w.at(i, k) != 0) { piv = i; break; }
            }
            if (piv < 0) return 0;
            for (int j = k; j < n; ++j) std::swap(w.at(k, j), w.at(piv, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                mpz_class t = w.at(i, j) * w.at(k, k) - w.at(i, k) * w.at(k, j);
                mpz_divexact(w.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            w.at(i, k) = 0;
        }
        prev = w.at(k, k);
    }
    return sign * w.at(n - 1, n - 1);
}

int rank_mod_p(const IntMatrix& m, const PrimeModulus& pm) {
    const int rows = m.rows(), cols = m.cols();
    std::vector<std::uint64_t> w(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            w[static_cast<std::size_t>(i) * cols + j] = pm.reduce(m.at(i, j));

    auto e = [&](int i, int j) -> std::uint64_t& {
        return w[static_cast<std::size_t>(i) * cols + j];
    };
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        for (int i = rank; i < rows; ++i) {
            if (e(i, col) != 0) { piv = i; break; }
        }
        if (piv < 0) continue;
        if (piv != rank)
            for (int j = col; j < cols; ++j) std::swap(e(rank, j), e(piv, j));
        const std::uint64_t inv = pm.inv(e(rank, col));
        for (int i = rank + 1; i < rows; ++i) {
            if (e(i, col) == 0) continue;
            const std::uint64_t f = pm.mul(e(i, col), inv);
            for (int j = col; j < cols; ++j)
                e(i, j) = pm.sub(e(i, j), pm.mul(f, e(rank, j)));
        }
        ++rank;
    }
    return rank;
}

namespace {

// Fraction-free row echelon; returns rank, optionally records pivot columns.
int echelon_rank(IntMatrix& w, std::vector<int>* pivot_cols) {
    const int rows = w.rows(), cols = w.cols();
    mpz_class prev = 1;
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        for (int i = rank; i < rows; ++i) {
            if (w.at(i, col) != 0) { piv = i; break; }
        }
        if (piv < 0) continue;
        if (piv != rank)
            for (int j = 0; j < cols; ++j) std::swap(w.at(rank, j), w.at(piv, j));
        for (int i = rank + 1; i < rows; ++i) {
            for (int j = col + 1; j < cols; ++j) {
                mpz_class t = w.at(i, j) * w.at(rank, col) - w.at(i, col) * w.at(rank, j);
                mpz_divexact(w.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            w.at(i, col) = 0;
        }
        prev = w.at(rank, col);
        if (pivot_cols) pivot_cols->push_back(col);
        ++rank;
    }
    return rank;
}

} // namespace

int rank_exact(const IntMatrix& m) {
    IntMatrix w = m;
    return echelon_rank(w, nullptr);
}

namespace {

std::vector<mpz_class> kernel_from_free_col(const IntMatrix& w,
                                            const std::vector<int>& pivots,
                                            int free_col) {
    const int cols = w.cols();
    const int rank = static_cast<int>(pivots.size());
    std::vector<mpq_class> x(cols, 0);
    x[free_col] = 1;
    for (int r = rank - 1; r >= 0; --r) {
        const int pc = pivots[r];
        if (pc >= free_col) { x[pc] = 0; continue; }
        mpq_class s = 0;
        for (int j = pc + 1; j < cols; ++j) {
            if (x[j] != 0) s += mpq_class(w.at(r, j)) * x[j];
        }
        x[pc] = -s / mpq_class(w.at(r, pc));
        x[pc].canonicalize();
    }
    mpz_class den = 1;
    for (const auto& q : x) den = lcm(den, q.get_den());
    std::vector<mpz_class> k(cols);
    mpz_class content = 0;
    for (int j = 0; j < cols; ++j) {
        k[j] = mpz_class(x[j] * den);
        content = gcd(content, k[j]);
    }
    for (auto& v : k) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), content.get_mpz_t());
    for (int j = 0; j < cols; ++j) {
        if (k[j] != 0) {
            if (k[j] < 0)
                for (auto& v : k) v = -v;
            break;
        }
    }
    return k;
}

} // namespace

std::vector<mpz_class> kernel_vector_exact(const IntMatrix& m) {
    auto basis = kernel_basis_exact(m);
    return basis.empty() ? std::vector<mpz_class>{} : basis.front();
}

std::vector<std::vector<mpz_class>> kernel_basis_exact(const IntMatrix& m) {
    const int cols = m.cols();
    IntMatrix w = m;
    std::vector<int> pivots;
    echelon_rank(w, &pivots);
    std::vector<bool> is_piv(cols, false);
    for (int c : pivots) is_piv[c] = true;
    std::vector<std::vector<mpz_class>> basis;
    for (int f = 0; f < cols; ++f) {
        if (!is_piv[f]) basis.push_back(kernel_from_free_col(w, pivots, f));
    }
    return basis;
}

bool in_row_span(const IntMatrix& basis, const std::vector<mpz_class>& y) {
    const int d = basis.rows(), n = basis.cols();
    if (static_cast<int>(y.size()) != n) throw PreconditionError("length mismatch");
    IntMatrix w(d + 1, n);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < n; ++j) w.at(i, j) = basis.at(i, j);
    for (int j = 0; j < n; ++j) w.at(d, j) = y[j];
    return rank_exact(w) == rank_exact(basis);
}

} // namespace bsl
