#pragma once

#include <string>
#include <vector>

#include "netshift/common.hpp"

namespace netshift {

// Dense-tableau two-phase primal simplex with Bland's rule, templated over
// the scalar: double (pivot tolerance 1e-9) or Rat (exact, tolerance 0).
// Maximizes c.x subject to row constraints and x >= 0. Row right-hand
// sides must be nonnegative.
enum class RowType { LessEq, Eq };

template <class T>
struct LpTraits;

template <>
struct LpTraits<double> {
    static constexpr double eps() { return 1e-9; }
};
template <>
struct LpTraits<Rat> {
    static Rat eps() { return Rat(0); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

template <class T>
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    T objective{};
    std::vector<T> x;
    long iterations = 0;
};

template <class T>
class LinearProgram {
public:
    explicit LinearProgram(int ncols) : ncols_(ncols), obj_(ncols, T(0)) {}

    void set_objective(int col, T coeff) { obj_[col] = coeff; }

    int add_row(RowType type, T rhs) {
        if (rhs < T(0)) throw InputError("lp: negative right-hand side");
        rows_.push_back({});
        rows_.back().assign(ncols_, T(0));
        types_.push_back(type);
        rhs_.push_back(rhs);
        return int(rows_.size()) - 1;
    }
    void add_coeff(int row, int col, T coeff) { rows_[row][col] += coeff; }

    LpResult<T> maximize(long max_iter = 2'000'000) const;

    int ncols() const { return ncols_; }
    int nrows() const { return int(rows_.size()); }

private:
    int ncols_;
    std::vector<T> obj_;
    std::vector<std::vector<T>> rows_;
    std::vector<RowType> types_;
    std::vector<T> rhs_;
};

template <class T>
LpResult<T> LinearProgram<T>::maximize(long max_iter) const {
    const T eps = LpTraits<T>::eps();
    const int m = nrows();
    int slacks = 0, artificials = 0;
    for (auto t : types_) (t == RowType::LessEq ? slacks : artificials)++;

    // Columns: structurals, slacks, artificials. Basis starts as the slack
    // of each <= row and the artificial of each = row.
    const int total = ncols_ + slacks + artificials;
    std::vector<std::vector<T>> tab(m, std::vector<T>(total + 1, T(0)));
    std::vector<int> basis(m);
    std::vector<uint8_t> barred(total, 0);
    int next_slack = ncols_, next_art = ncols_ + slacks;
    bool need_phase1 = false;
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < ncols_; ++c) tab[r][c] = rows_[r][c];
        tab[r][total] = rhs_[r];
        if (types_[r] == RowType::LessEq) {
            tab[r][next_slack] = T(1);
            basis[r] = next_slack++;
        } else {
            tab[r][next_art] = T(1);
            basis[r] = next_art++;
            barred[basis[r]] = 1;  // artificials may never re-enter
            if (rhs_[r] > T(0)) need_phase1 = true;
        }
    }

    LpResult<T> res;
    auto pivot = [&](int prow, int pcol) {
        const T inv = T(1) / tab[prow][pcol];
        for (int c = 0; c <= total; ++c) tab[prow][c] *= inv;
        tab[prow][pcol] = T(1);  // keep it exact
        for (int r = 0; r < m; ++r) {
            if (r == prow) continue;
            const T f = tab[r][pcol];
            if (f == T(0)) continue;
            for (int c = 0; c <= total; ++c) tab[r][c] -= f * tab[prow][c];
            tab[r][pcol] = T(0);
        }
        basis[prow] = pcol;
    };

    // One simplex phase over reduced costs for the given objective vector.
    auto run = [&](const std::vector<T>& obj, long* iters) -> bool {
        while (true) {
            if (*iters >= max_iter) return false;
            // Reduced cost of column j: obj_j - sum over rows of y_r a_rj,
            // computed directly from the tableau each iteration (dense but
            // simple; desk-scale instances only).
            int enter = -1;
            for (int j = 0; j < total && enter < 0; ++j) {
                if (barred[j]) continue;
                T rc = obj[j];
                for (int r = 0; r < m; ++r)
                    if (obj[basis[r]] != T(0)) rc -= obj[basis[r]] * tab[r][j];
                if (rc > eps) enter = j;  // Bland: smallest improving index
            }
            if (enter < 0) return true;  // optimal
            int leave = -1;
            T best{};
            for (int r = 0; r < m; ++r) {
                if (tab[r][enter] > eps) {
                    const T ratio = tab[r][total] / tab[r][enter];
                    if (leave < 0 || ratio < best ||
                        (ratio == best && basis[r] < basis[leave])) {
                        leave = r;
                        best = ratio;
                    }
                }
            }
            if (leave < 0) return true;  // unbounded, caller inspects
            pivot(leave, enter);
            ++(*iters);
        }
    };

    long iters = 0;
    if (need_phase1) {
        std::vector<T> p1(total, T(0));
        for (int j = ncols_ + slacks; j < total; ++j) p1[j] = T(-1);
        if (!run(p1, &iters)) {
            res.status = LpStatus::IterationLimit;
            return res;
        }
        T p1val(0);
        for (int r = 0; r < m; ++r)
            if (basis[r] >= ncols_ + slacks) p1val += tab[r][total];
        if (p1val > eps) {
            res.status = LpStatus::Infeasible;
            return res;
        }
    }

    // Drive leftover artificials out of the basis with degenerate pivots
    // (their value is 0 here). A row with no nonzero non-artificial entry
    // is redundant and stays inert.
    const T piv_eps = eps;
    for (int r = 0; r < m; ++r) {
        if (basis[r] < ncols_ + slacks) continue;
        for (int j = 0; j < ncols_ + slacks; ++j) {
            const T a = tab[r][j] < T(0) ? T(0) - tab[r][j] : tab[r][j];
            if (a > piv_eps) {
                pivot(r, j);
                break;
            }
        }
    }

    std::vector<T> p2(total, T(0));
    for (int j = 0; j < ncols_; ++j) p2[j] = obj_[j];
    // Detect unboundedness: run() returns true both at optimality and when
    // no ratio bound exists; distinguish by re-checking the entering column.
    while (true) {
        if (!run(p2, &iters)) {
            res.status = LpStatus::IterationLimit;
            return res;
        }
        int enter = -1;
        for (int j = 0; j < total && enter < 0; ++j) {
            if (barred[j]) continue;
            T rc = p2[j];
            for (int r = 0; r < m; ++r)
                if (p2[basis[r]] != T(0)) rc -= p2[basis[r]] * tab[r][j];
            if (rc > eps) enter = j;
        }
        if (enter < 0) break;  // genuinely optimal
        bool bounded = false;
        for (int r = 0; r < m && !bounded; ++r)
            if (tab[r][enter] > eps) bounded = true;
        if (!bounded) {
            res.status = LpStatus::Unbounded;
            return res;
        }
    }

    res.status = LpStatus::Optimal;
    res.x.assign(ncols_, T(0));
    for (int r = 0; r < m; ++r)
        if (basis[r] < ncols_) res.x[basis[r]] = tab[r][total];
    res.objective = T(0);
    for (int j = 0; j < ncols_; ++j) res.objective += obj_[j] * res.x[j];
    res.iterations = iters;
    return res;
}

}  // namespace netshift
