#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tanksched/solve/factor.hpp"
#include "tanksched/solve/lp_core.hpp"

namespace tanksched {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit, TimeLimit, Stall };

struct SimplexOptions {
    double feas_tol = 1e-7;
    double opt_tol = 1e-7;
    int refactor_every = 100;
    std::int64_t iter_limit = -1;     // <0: no limit
    double time_limit_s = -1.0;       // <0: no limit
    // Pricing: number of column sections scanned round-robin; 1 = full
    // Dantzig pricing every iteration.
    int price_sections = 48;
};

// Bounded-variable primal simplex over the logical-augmented system
// A x + I s = b. Column ids >= ncols denote logicals. Deterministic: all
// tie-breaks are by canonical index order.
class Simplex {
public:
    Simplex(const LpProblem& p, const SimplexOptions& opt);

    // Feasibility-directed triangular crash: picks structural columns whose
    // first nonzero row is the pivot row, preferring higher caller priority
    // (binaries excluded), logicals elsewhere.
    void crash_basis(const std::vector<int>& priority);

    // Applies [col, lb, ub] changes (tightening or restoring) and refreshes
    // the state of affected nonbasic columns. Keeps the current basis.
    void change_bounds(const std::vector<std::array<double, 2>>& bounds_by_col);

    LpStatus solve();

    double objective() const;
    // Structural solution values.
    std::vector<double> solution() const;
    // Row duals at termination (phase-2 exact on Optimal; phase-1 duals on
    // Infeasible, which act as the infeasibility certificate).
    std::vector<double> duals() const;
    // Unbounded direction over structural columns (valid after Unbounded).
    std::vector<double> ray() const;

    std::int64_t iterations() const { return iters_; }
    double condition_estimate() const { return factor_.growth_estimate(); }
    std::string stall_reason() const { return stall_reason_; }

    // Raw basis snapshot (column ids per row position + nonbasic states).
    struct Snapshot {
        std::vector<int> basic;
        std::vector<char> state;
    };
    Snapshot snapshot() const { return {basic_, state_}; }
    void restore(const Snapshot& s);

private:
    enum : char { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3 };

    const LpProblem& p_;
    SimplexOptions opt_;
    int m_, n_, total_;
    std::vector<double> clb_, cub_;  // bounds incl. logicals
    std::vector<double> cost_;       // structural costs; logicals 0
    std::vector<double> xval_;
    std::vector<char> state_;
    std::vector<int> basic_;    // position -> column
    std::vector<int> row_of_;   // column -> position or -1
    BasisFactor factor_;

    std::vector<double> y_;          // row duals (phase-dependent costs)
    bool y_exact_ = false;
    int phase_ = 2;

    // scratch
    std::vector<double> work_row_, work_pos_, work_pos2_, work_row2_;
    std::vector<int> nz_row_, nz_pos_, nz_pos2_, nz_row2_;

    std::int64_t iters_ = 0;
    int pivots_since_factor_ = 0;
    int price_cursor_ = 0;
    bool factor_valid_ = false;
    std::string stall_reason_;
    int ray_col_ = -1, ray_dir_ = 0;
    std::vector<int> ray_nz_;
    std::vector<double> ray_val_;
    double start_time_ = 0.0;
    // Feasibility bookkeeping per basis position: -1 below, +1 above, 0 ok.
    std::vector<char> feas_;
    std::vector<int> infeas_list_;  // lazily filtered
    int infeas_count_ = 0;
    std::int64_t degenerate_streak_ = 0;

    void set_feas(int pos);

    double col_cost(int j) const { return j < n_ ? cost_[j] : 0.0; }
    double bound_tol(double b) const;
    // Iterates (row, value) over column j, logicals included.
    template <class Fn>
    void for_col(int j, Fn&& fn) const {
        if (j >= n_) {
            fn(j - n_, 1.0);
            return;
        }
        for (std::int64_t e = p_.Ap[j]; e < p_.Ap[j + 1]; ++e) fn(p_.Ai[e], p_.Ax[e]);
    }
    double dot_col_y(int j) const {
        double s = 0.0;
        for_col(j, [&](int i, double v) { s += v * y_[i]; });
        return s;
    }

    void set_logical_bounds();
    void default_basis();
    void refactorize();
    void compute_basics();
    void compute_duals_exact();
    int select_entering(double& d_out);
    bool infeasibility_costs(std::vector<double>& g) const;  // true if any infeasible
    double primal_infeasibility() const;

    struct Ratio {
        int pos = -1;          // leaving position, -1 => bound flip / unbounded
        double theta = 0.0;
        char target = 0;       // bound the leaver snaps to
        bool flip = false;
        bool unbounded = false;
    };
    Ratio ratio_test(int q, int dir, const std::vector<int>& spike_nz,
                     const std::vector<double>& spike);
    LpStatus iterate();
};

}  // namespace tanksched
