#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tanksched/model/milp.hpp"

namespace tanksched {

// Computational LP/MILP form: column-major sparse matrix, per-column bounds
// and costs, per-row sense and right-hand side. Minimization.
struct LpProblem {
    int nrows = 0, ncols = 0;
    std::vector<std::int64_t> Ap;  // ncols+1 column pointers
    std::vector<std::int32_t> Ai;  // row indices
    std::vector<double> Ax;
    std::vector<double> lb, ub, obj;
    std::vector<char> is_int;  // integrality mark per column
    std::vector<char> sense;   // 'E', 'L', 'G'
    std::vector<double> rhs;
    double obj_offset = 0.0;

    // Row-major copy on demand (crash basis, activity evaluation).
    void build_rowwise(std::vector<std::int64_t>& Rp, std::vector<std::int32_t>& Ri,
                       std::vector<double>& Rx) const;
};

LpProblem to_lp(const MilpModel& model);

// Exact, reversible reductions limited to singleton rows (folded into column
// bounds), fixed columns (substituted into rhs/objective), and empty
// rows/columns. Anything that survives maps one-to-one onto the original.
struct Presolved {
    LpProblem reduced;
    std::vector<std::int32_t> orig_col;   // reduced col -> original col
    std::vector<std::int32_t> orig_row;   // reduced row -> original row
    std::vector<double> fixed_value;      // original col -> value when fixed
    std::vector<char> col_fixed;          // original col -> 1 when eliminated
    int orig_ncols = 0, orig_nrows = 0;
    bool proven_infeasible = false;
    std::string infeasible_reason;
};

Presolved presolve(const LpProblem& p, double feas_tol);

// Expands a reduced-space assignment back to the original column space.
std::vector<double> postsolve(const Presolved& ps, const std::vector<double>& x_reduced);

}  // namespace tanksched
