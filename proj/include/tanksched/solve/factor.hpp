#pragma once

#include <cstdint>
#include <vector>

namespace tanksched {

// Column access for the basis: structural columns come from a CSC matrix,
// column ids >= ncols denote the logical (slack) unit column of row id-ncols.
struct ColumnSource {
    int nrows = 0, ncols = 0;
    const std::int64_t* Ap = nullptr;
    const std::int32_t* Ai = nullptr;
    const double* Ax = nullptr;
};

// Sparse LU of a basis matrix, stored as an elimination sequence with
// transposed copies so both FTRAN and BTRAN run in scatter form and skip
// zeros. Simplex pivots append product-form update etas until the next
// refactorization.
//
// Index spaces: FTRAN maps a row-space vector to basis-position space;
// BTRAN maps position space back to row space.
class BasisFactor {
public:
    // Factorizes the given basic columns. Numerically dependent columns are
    // replaced by the logicals of uncovered rows; `basic` is updated in
    // place. Returns the number of replaced columns.
    int factorize(std::vector<int>& basic, const ColumnSource& A);

    // w_row: dense row-space input with nonzero list row_nz (consumed).
    // out_pos/out_nz: dense position-space result, caller-zeroed.
    void ftran(double* w_row, std::vector<int>& row_nz, double* out_pos,
               std::vector<int>& out_nz);

    // c_pos: dense position-space input with nonzero list (consumed).
    // out_row/out_nz: dense row-space result, caller-zeroed.
    void btran(double* c_pos, std::vector<int>& pos_nz, double* out_row,
               std::vector<int>& out_nz);

    // Registers a basis change: position r takes a column whose FTRAN spike
    // is given (dense + nonzero list). Returns false when the update is too
    // unstable and the caller should refactorize instead.
    bool update(int r, const double* spike_pos, const std::vector<int>& spike_nz);

    int size() const { return m_; }
    int updates_since_factor() const { return int(etas_.size()); }
    double last_pivot_magnitude() const { return last_pivot_mag_; }
    // Crude growth-based conditioning estimate for stall diagnostics.
    double growth_estimate() const { return growth_; }
    std::int64_t factor_nonzeros() const { return std::int64_t(Lx_.size() + Ux_.size()); }

private:
    int m_ = 0;
    // Elimination sequence
    std::vector<std::int32_t> prow_, pcol_;
    std::vector<double> pivot_;
    std::vector<std::int32_t> step_of_row_;  // row -> step
    // L entries per step (rows below the pivot, multiplier form)
    std::vector<std::int64_t> Lp_;
    std::vector<std::int32_t> Li_;
    std::vector<double> Lx_;
    // L transposed: per row, (step, multiplier)
    std::vector<std::int64_t> LTp_;
    std::vector<std::int32_t> LTj_;
    std::vector<double> LTx_;
    // U entries per step (active columns right of the pivot)
    std::vector<std::int64_t> Up_;
    std::vector<std::int32_t> Uc_;
    std::vector<double> Ux_;
    // U transposed: per position, (step, value)
    std::vector<std::int64_t> UTp_;
    std::vector<std::int32_t> UTj_;
    std::vector<double> UTx_;

    struct Eta {
        std::int32_t r;
        double piv;
        std::int64_t begin, end;
    };
    std::vector<Eta> etas_;
    std::vector<std::int32_t> eta_i_;
    std::vector<double> eta_x_;

    std::vector<double> acc_;
    std::vector<std::int32_t> acc_touch_;
    double growth_ = 1.0;
    double last_pivot_mag_ = 1.0;

    void build_transposes();
};

}  // namespace tanksched
