#include "tanksched/solve/lp_core.hpp"

#include <cmath>
#include <stdexcept>

namespace tanksched {

namespace {
constexpr double kInf = 1e30;
bool finite_bound(double b) { return b > -kInf && b < kInf; }
}  // namespace

void LpProblem::build_rowwise(std::vector<std::int64_t>& Rp, std::vector<std::int32_t>& Ri,
                              std::vector<double>& Rx) const {
    Rp.assign(nrows + 1, 0);
    for (std::int64_t e = 0; e < std::int64_t(Ai.size()); ++e) ++Rp[Ai[e] + 1];
    for (int i = 0; i < nrows; ++i) Rp[i + 1] += Rp[i];
    Ri.resize(Ai.size());
    Rx.resize(Ax.size());
    std::vector<std::int64_t> cursor(Rp.begin(), Rp.end() - 1);
    for (int j = 0; j < ncols; ++j)
        for (std::int64_t e = Ap[j]; e < Ap[j + 1]; ++e) {
            std::int64_t at = cursor[Ai[e]]++;
            Ri[at] = j;
            Rx[at] = Ax[e];
        }
}

LpProblem to_lp(const MilpModel& model) {
    LpProblem p;
    p.nrows = model.num_rows();
    p.ncols = model.num_vars();
    p.obj_offset = model.obj_constant;
    p.lb.resize(p.ncols);
    p.ub.resize(p.ncols);
    p.obj.resize(p.ncols);
    p.is_int.resize(p.ncols);
    for (int j = 0; j < p.ncols; ++j) {
        const MilpVar& v = model.vars[j];
        p.lb[j] = v.lb;
        p.ub[j] = v.ub;
        p.obj[j] = v.obj;
        p.is_int[j] = v.kind == VarKind::Binary ? 1 : 0;
    }
    p.sense.resize(p.nrows);
    p.rhs.resize(p.nrows);
    // CSR (model) -> CSC
    std::vector<std::int64_t> colcount(p.ncols + 1, 0);
    for (std::int32_t c : model.nz_col) ++colcount[c + 1];
    p.Ap.resize(p.ncols + 1);
    p.Ap[0] = 0;
    for (int j = 0; j < p.ncols; ++j) p.Ap[j + 1] = p.Ap[j] + colcount[j + 1];
    p.Ai.resize(model.nz_col.size());
    p.Ax.resize(model.nz_val.size());
    std::vector<std::int64_t> cursor(p.Ap.begin(), p.Ap.end() - 1);
    for (int i = 0; i < p.nrows; ++i) {
        const MilpRow& r = model.rows[i];
        p.sense[i] = char(r.sense);
        p.rhs[i] = r.rhs;
        for (std::int64_t e = r.nz_begin; e < r.nz_end; ++e) {
            std::int64_t at = cursor[model.nz_col[e]]++;
            p.Ai[at] = i;
            p.Ax[at] = model.nz_val[e];
        }
    }
    return p;
}

Presolved presolve(const LpProblem& p, double feas_tol) {
    Presolved ps;
    ps.orig_ncols = p.ncols;
    ps.orig_nrows = p.nrows;
    ps.fixed_value.assign(p.ncols, 0.0);
    ps.col_fixed.assign(p.ncols, 0);

    std::vector<double> lb = p.lb, ub = p.ub;
    std::vector<double> rhs_shift(p.nrows, 0.0);  // fixed-column contributions
    std::vector<char> row_dead(p.nrows, 0), col_dead(p.ncols, 0);
    std::vector<int> row_live_nz(p.nrows, 0);

    std::vector<std::int64_t> Rp;
    std::vector<std::int32_t> Ri;
    std::vector<double> Rx;
    p.build_rowwise(Rp, Ri, Rx);
    for (int i = 0; i < p.nrows; ++i) row_live_nz[i] = int(Rp[i + 1] - Rp[i]);

    auto fail = [&](const std::string& why) {
        ps.proven_infeasible = true;
        ps.infeasible_reason = why;
    };

    auto fix_column = [&](int j, double v) {
        col_dead[j] = 1;
        ps.col_fixed[j] = 1;
        ps.fixed_value[j] = v;
        for (std::int64_t e = p.Ap[j]; e < p.Ap[j + 1]; ++e) {
            int i = p.Ai[e];
            if (row_dead[i]) continue;
            rhs_shift[i] += p.Ax[e] * v;
            --row_live_nz[i];
        }
    };

    bool changed = true;
    while (changed && !ps.proven_infeasible) {
        changed = false;
        // Singleton and empty rows.
        for (int i = 0; i < p.nrows && !ps.proven_infeasible; ++i) {
            if (row_dead[i]) continue;
            if (row_live_nz[i] > 1) continue;
            double b = p.rhs[i] - rhs_shift[i];
            if (row_live_nz[i] == 0) {
                bool ok = p.sense[i] == 'E'   ? std::abs(b) <= feas_tol
                          : p.sense[i] == 'L' ? b >= -feas_tol
                                              : b <= feas_tol;
                if (!ok) fail("constant row " + std::to_string(i) + " is violated");
                row_dead[i] = 1;
                changed = true;
                continue;
            }
            // Find the surviving entry.
            int j = -1;
            double a = 0.0;
            for (std::int64_t e = Rp[i]; e < Rp[i + 1]; ++e)
                if (!col_dead[Ri[e]]) {
                    j = Ri[e];
                    a = Rx[e];
                    break;
                }
            if (j < 0 || a == 0.0) {
                row_dead[i] = 1;
                continue;
            }
            double v = b / a;
            if (p.sense[i] == 'E') {
                if (v < lb[j] - feas_tol || v > ub[j] + feas_tol) {
                    fail("singleton row forces column outside its bounds");
                    break;
                }
                lb[j] = ub[j] = v;
            } else if ((p.sense[i] == 'L') == (a > 0.0)) {
                ub[j] = std::min(ub[j], v);
            } else {
                lb[j] = std::max(lb[j], v);
            }
            row_dead[i] = 1;
            changed = true;
        }
        if (ps.proven_infeasible) break;
        // Fixed and empty columns.
        for (int j = 0; j < p.ncols; ++j) {
            if (col_dead[j]) continue;
            if (lb[j] > ub[j] + feas_tol) {
                fail("column with crossed bounds after reduction");
                break;
            }
            int live = 0;
            for (std::int64_t e = p.Ap[j]; e < p.Ap[j + 1] && live == 0; ++e)
                if (!row_dead[p.Ai[e]]) live = 1;
            if (ub[j] - lb[j] <= 1e-12 * (1.0 + std::abs(lb[j]))) {
                fix_column(j, 0.5 * (lb[j] + ub[j]));
                changed = true;
            } else if (live == 0) {
                // Empty column: settles at its cheapest bound.
                double v;
                if (p.obj[j] > 0.0) {
                    if (!finite_bound(lb[j])) {
                        fail("empty column unbounded below in cost");
                        break;
                    }
                    v = lb[j];
                } else if (p.obj[j] < 0.0) {
                    if (!finite_bound(ub[j])) {
                        fail("empty column unbounded in cost");
                        break;
                    }
                    v = ub[j];
                } else {
                    v = finite_bound(lb[j]) ? lb[j] : (finite_bound(ub[j]) ? ub[j] : 0.0);
                }
                fix_column(j, v);
                changed = true;
            }
        }
    }

    // Assemble the reduced problem.
    std::vector<std::int32_t> new_row(p.nrows, -1), new_col(p.ncols, -1);
    for (int i = 0; i < p.nrows; ++i)
        if (!row_dead[i]) {
            new_row[i] = std::int32_t(ps.orig_row.size());
            ps.orig_row.push_back(i);
        }
    for (int j = 0; j < p.ncols; ++j)
        if (!col_dead[j]) {
            new_col[j] = std::int32_t(ps.orig_col.size());
            ps.orig_col.push_back(j);
        }
    LpProblem& r = ps.reduced;
    r.nrows = int(ps.orig_row.size());
    r.ncols = int(ps.orig_col.size());
    r.obj_offset = p.obj_offset;
    for (int j = 0; j < p.ncols; ++j)
        if (col_dead[j]) r.obj_offset += p.obj[j] * ps.fixed_value[j];
    r.Ap.push_back(0);
    for (int jr = 0; jr < r.ncols; ++jr) {
        int j = ps.orig_col[jr];
        for (std::int64_t e = p.Ap[j]; e < p.Ap[j + 1]; ++e) {
            int i = p.Ai[e];
            if (row_dead[i]) continue;
            r.Ai.push_back(new_row[i]);
            r.Ax.push_back(p.Ax[e]);
        }
        r.Ap.push_back(std::int64_t(r.Ai.size()));
        r.lb.push_back(lb[j]);
        r.ub.push_back(ub[j]);
        r.obj.push_back(p.obj[j]);
        r.is_int.push_back(p.is_int[j]);
    }
    for (int ir = 0; ir < r.nrows; ++ir) {
        int i = ps.orig_row[ir];
        r.sense.push_back(p.sense[i]);
        r.rhs.push_back(p.rhs[i] - rhs_shift[i]);
    }
    return ps;
}

std::vector<double> postsolve(const Presolved& ps, const std::vector<double>& x_reduced) {
    if (int(x_reduced.size()) != ps.reduced.ncols)
        throw std::invalid_argument("postsolve: reduced assignment length mismatch");
    std::vector<double> x(ps.orig_ncols, 0.0);
    for (int j = 0; j < ps.orig_ncols; ++j)
        if (ps.col_fixed[j]) x[j] = ps.fixed_value[j];
    for (int jr = 0; jr < ps.reduced.ncols; ++jr) x[ps.orig_col[jr]] = x_reduced[jr];
    return x;
}

}  // namespace tanksched
