#include "tanksched/solve/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace tanksched {

namespace {
constexpr double kInf = 1e30;
constexpr double kAlphaTol = 1e-11;

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}
}  // namespace

Simplex::Simplex(const LpProblem& p, const SimplexOptions& opt) : p_(p), opt_(opt) {
    m_ = p.nrows;
    n_ = p.ncols;
    total_ = n_ + m_;
    clb_.assign(total_, 0.0);
    cub_.assign(total_, 0.0);
    cost_ = p.obj;
    for (int j = 0; j < n_; ++j) {
        clb_[j] = p.lb[j];
        cub_[j] = p.ub[j];
    }
    set_logical_bounds();
    xval_.assign(total_, 0.0);
    state_.assign(total_, kAtLower);
    row_of_.assign(total_, -1);
    y_.assign(m_, 0.0);
    work_row_.assign(m_, 0.0);
    work_pos_.assign(m_, 0.0);
    work_pos2_.assign(m_, 0.0);
    work_row2_.assign(m_, 0.0);
    feas_.assign(m_, 0);
    for (int j = 0; j < total_; ++j) {
        if (clb_[j] > -kInf) {
            state_[j] = kAtLower;
            xval_[j] = clb_[j];
        } else if (cub_[j] < kInf) {
            state_[j] = kAtUpper;
            xval_[j] = cub_[j];
        } else {
            state_[j] = kFree;
            xval_[j] = 0.0;
        }
    }
    default_basis();
}

void Simplex::set_logical_bounds() {
    for (int i = 0; i < m_; ++i) {
        switch (p_.sense[i]) {
            case 'E': clb_[n_ + i] = 0.0; cub_[n_ + i] = 0.0; break;
            case 'L': clb_[n_ + i] = 0.0; cub_[n_ + i] = kInf; break;
            case 'G': clb_[n_ + i] = -kInf; cub_[n_ + i] = 0.0; break;
            default: throw std::logic_error("unknown row sense");
        }
    }
}

double Simplex::bound_tol(double b) const {
    double ab = std::abs(b);
    if (ab >= kInf) return opt_.feas_tol;
    return opt_.feas_tol * (1.0 + ab);
}

void Simplex::default_basis() {
    basic_.resize(m_);
    for (int i = 0; i < m_; ++i) {
        basic_[i] = n_ + i;
        state_[n_ + i] = kBasic;
        row_of_[n_ + i] = i;
    }
    factor_valid_ = false;
}

void Simplex::crash_basis(const std::vector<int>& priority) {
    // Bucket structural columns by their first (lowest-index) nonzero row.
    std::vector<std::vector<int>> by_top(m_);
    for (int j = 0; j < n_; ++j) {
        if (p_.is_int[j]) continue;                  // keep integers nonbasic
        if (cub_[j] - clb_[j] <= 0.0) continue;      // fixed
        if (p_.Ap[j] == p_.Ap[j + 1]) continue;      // empty
        int top = m_;
        double cmax = 0.0;
        for (std::int64_t e = p_.Ap[j]; e < p_.Ap[j + 1]; ++e) {
            top = std::min(top, int(p_.Ai[e]));
            cmax = std::max(cmax, std::abs(p_.Ax[e]));
        }
        double top_val = 0.0;
        for (std::int64_t e = p_.Ap[j]; e < p_.Ap[j + 1]; ++e)
            if (p_.Ai[e] == top) top_val = p_.Ax[e];
        if (std::abs(top_val) < 1e-7 * cmax || std::abs(top_val) < 1e-10) continue;
        by_top[top].push_back(j);
    }
    basic_.assign(m_, -1);
    for (int j = 0; j < total_; ++j)
        if (state_[j] == kBasic) {
            // demote previous basis
            if (clb_[j] > -kInf) {
                state_[j] = kAtLower;
                xval_[j] = clb_[j];
            } else if (cub_[j] < kInf) {
                state_[j] = kAtUpper;
                xval_[j] = cub_[j];
            } else {
                state_[j] = kFree;
                xval_[j] = 0.0;
            }
        }
    row_of_.assign(total_, -1);
    for (int i = 0; i < m_; ++i) {
        int pick = -1;
        long best_score = -1;
        for (int j : by_top[i]) {
            long prio = j < int(priority.size()) ? priority[j] : 0;
            if (prio < 0) continue;
            long score = prio * 1000000L - (p_.Ap[j + 1] - p_.Ap[j]);
            if (score > best_score) {
                best_score = score;
                pick = j;
            }
        }
        if (pick < 0) pick = n_ + i;
        basic_[i] = pick;
        state_[pick] = kBasic;
        row_of_[pick] = i;
    }
    factor_valid_ = false;
}

void Simplex::restore(const Snapshot& s) {
    basic_ = s.basic;
    state_ = s.state;
    row_of_.assign(total_, -1);
    for (int i = 0; i < m_; ++i) row_of_[basic_[i]] = i;
    for (int j = 0; j < total_; ++j) {
        if (state_[j] == kBasic) continue;
        if (state_[j] == kAtLower)
            xval_[j] = clb_[j];
        else if (state_[j] == kAtUpper)
            xval_[j] = cub_[j];
        else
            xval_[j] = 0.0;
    }
    factor_valid_ = false;
}

void Simplex::change_bounds(const std::vector<std::array<double, 2>>& bounds_by_col) {
    if (int(bounds_by_col.size()) != n_)
        throw std::invalid_argument("change_bounds: expected one [lb,ub] pair per column");
    for (int j = 0; j < n_; ++j) {
        clb_[j] = bounds_by_col[j][0];
        cub_[j] = bounds_by_col[j][1];
        if (state_[j] == kAtLower) {
            if (clb_[j] <= -kInf) {
                state_[j] = cub_[j] < kInf ? kAtUpper : kFree;
            }
        } else if (state_[j] == kAtUpper) {
            if (cub_[j] >= kInf) {
                state_[j] = clb_[j] > -kInf ? kAtLower : kFree;
            }
        }
        if (state_[j] == kAtLower)
            xval_[j] = clb_[j];
        else if (state_[j] == kAtUpper)
            xval_[j] = cub_[j];
        else if (state_[j] == kFree)
            xval_[j] = 0.0;
    }
    if (factor_valid_) {
        compute_basics();
    }
    y_exact_ = false;
}

void Simplex::refactorize() {
    ColumnSource src{m_, n_, p_.Ap.data(), p_.Ai.data(), p_.Ax.data()};
    std::vector<int> before = basic_;
    factor_.factorize(basic_, src);
    // Columns evicted by numerical repair become nonbasic at a finite bound.
    for (int i = 0; i < m_; ++i) {
        if (basic_[i] == before[i]) continue;
        int out = before[i];
        if (row_of_[out] == i) {
            row_of_[out] = -1;
            if (clb_[out] > -kInf) {
                state_[out] = kAtLower;
                xval_[out] = clb_[out];
            } else if (cub_[out] < kInf) {
                state_[out] = kAtUpper;
                xval_[out] = cub_[out];
            } else {
                state_[out] = kFree;
                xval_[out] = 0.0;
            }
        }
        state_[basic_[i]] = kBasic;
        row_of_[basic_[i]] = i;
    }
    factor_valid_ = true;
    pivots_since_factor_ = 0;
    compute_basics();
    y_exact_ = false;
}

void Simplex::compute_basics() {
    // x_B = B^{-1} (b - N x_N)
    std::fill(work_row_.begin(), work_row_.end(), 0.0);
    nz_row_.clear();
    for (int i = 0; i < m_; ++i) work_row_[i] = p_.rhs[i];
    for (int j = 0; j < total_; ++j) {
        if (state_[j] == kBasic) continue;
        double v = xval_[j];
        if (v == 0.0) continue;
        for_col(j, [&](int i, double a) { work_row_[i] -= a * v; });
    }
    for (int i = 0; i < m_; ++i)
        if (work_row_[i] != 0.0) nz_row_.push_back(i);
    std::fill(work_pos_.begin(), work_pos_.end(), 0.0);
    nz_pos_.clear();
    factor_.ftran(work_row_.data(), nz_row_, work_pos_.data(), nz_pos_);
    infeas_list_.clear();
    infeas_count_ = 0;
    for (int pos = 0; pos < m_; ++pos) {
        xval_[basic_[pos]] = work_pos_[pos];
        feas_[pos] = 2;  // force refresh
        set_feas(pos);
    }
    for (int pos : nz_pos_) work_pos_[pos] = 0.0;
    nz_pos_.clear();
    phase_ = infeas_count_ > 0 ? 1 : 2;
}

void Simplex::set_feas(int pos) {
    int col = basic_[pos];
    double x = xval_[col];
    char f = 0;
    if (x < clb_[col] - bound_tol(clb_[col]))
        f = -1;
    else if (x > cub_[col] + bound_tol(cub_[col]))
        f = 1;
    char old = feas_[pos];
    if (old == f) return;
    if (old == 0 || old == 2) {
        if (f != 0) {
            ++infeas_count_;
            infeas_list_.push_back(pos);
        }
        if (old == 2 && f == 0) {
        }
    } else if (f == 0) {
        --infeas_count_;
    } else {
        // switched violation side; stays counted
    }
    feas_[pos] = f;
}

bool Simplex::infeasibility_costs(std::vector<double>& g) const {
    bool any = false;
    for (int pos : infeas_list_) {
        if (feas_[pos] == 0) continue;
        g[pos] = double(feas_[pos]);
        any = true;
    }
    return any;
}

double Simplex::primal_infeasibility() const {
    double sum = 0.0;
    for (int pos = 0; pos < m_; ++pos) {
        int col = basic_[pos];
        double x = xval_[col];
        if (x < clb_[col]) sum += clb_[col] - x;
        if (x > cub_[col]) sum += x - cub_[col];
    }
    return sum;
}

void Simplex::compute_duals_exact() {
    std::fill(work_pos_.begin(), work_pos_.end(), 0.0);
    nz_pos_.clear();
    if (phase_ == 1) {
        // refresh the lazy infeasible list
        std::vector<int> fresh;
        for (int pos : infeas_list_)
            if (feas_[pos] != 0) fresh.push_back(pos);
        infeas_list_ = std::move(fresh);
        for (int pos : infeas_list_) {
            work_pos_[pos] = double(feas_[pos]);
            nz_pos_.push_back(pos);
        }
    } else {
        for (int pos = 0; pos < m_; ++pos) {
            double c = col_cost(basic_[pos]);
            if (c != 0.0) {
                work_pos_[pos] = c;
                nz_pos_.push_back(pos);
            }
        }
    }
    std::fill(y_.begin(), y_.end(), 0.0);
    nz_row_.clear();
    factor_.btran(work_pos_.data(), nz_pos_, y_.data(), nz_row_);
    nz_row_.clear();
    y_exact_ = true;
}

int Simplex::select_entering(double& d_out) {
    // Sectional pricing: scan sections round-robin, return the best violator
    // in the first section containing one. Caller confirms optimality with a
    // full pass when nothing is found.
    int sections = std::max(1, opt_.price_sections);
    int chunk = (total_ + sections - 1) / sections;
    for (int step = 0; step < sections; ++step) {
        int sec = (price_cursor_ + step) % sections;
        int begin = sec * chunk, end = std::min(total_, begin + chunk);
        int best = -1;
        double best_score = 0.0, best_d = 0.0;
        for (int j = begin; j < end; ++j) {
            char st = state_[j];
            if (st == kBasic) continue;
            if (cub_[j] - clb_[j] <= 0.0) continue;  // fixed
            double c = phase_ == 1 ? 0.0 : col_cost(j);
            double d = c - dot_col_y(j);
            double eps = opt_.opt_tol * (1.0 + std::abs(c));
            bool viol = (st == kAtLower && d < -eps) || (st == kAtUpper && d > eps) ||
                        (st == kFree && std::abs(d) > eps);
            if (!viol) continue;
            double score = std::abs(d);
            if (score > best_score) {
                best_score = score;
                best = j;
                best_d = d;
            }
        }
        if (best >= 0) {
            price_cursor_ = sec;
            d_out = best_d;
            return best;
        }
    }
    return -1;
}

Simplex::Ratio Simplex::ratio_test(int q, int dir, const std::vector<int>& spike_nz,
                                   const std::vector<double>& spike) {
    Ratio r;
    double range = cub_[q] - clb_[q];
    bool flip_possible = range < kInf;
    double theta_rel = flip_possible ? range : kInf;
    // pass 1: relaxed bound on theta
    for (int pos : spike_nz) {
        double alpha = spike[pos];
        if (std::abs(alpha) <= kAlphaTol) continue;
        double delta = -double(dir) * alpha;
        int col = basic_[pos];
        double x = xval_[col];
        double rel = kInf;
        if (phase_ == 1 && feas_[pos] == -1) {
            if (delta > 0.0) rel = (clb_[col] + bound_tol(clb_[col]) - x) / delta;
        } else if (phase_ == 1 && feas_[pos] == 1) {
            if (delta < 0.0) rel = (x - cub_[col] + bound_tol(cub_[col])) / (-delta);
        } else if (delta < 0.0) {
            if (clb_[col] > -kInf) rel = (x - clb_[col] + bound_tol(clb_[col])) / (-delta);
        } else {
            if (cub_[col] < kInf) rel = (cub_[col] + bound_tol(cub_[col]) - x) / delta;
        }
        if (rel < theta_rel) theta_rel = rel;
    }
    if (theta_rel >= kInf) {
        r.unbounded = true;
        return r;
    }
    // pass 2: largest pivot among admissible blockers
    int best_pos = -1;
    double best_alpha = 0.0, best_exact = 0.0;
    char best_target = 0;
    for (int pos : spike_nz) {
        double alpha = spike[pos];
        if (std::abs(alpha) <= kAlphaTol) continue;
        double delta = -double(dir) * alpha;
        int col = basic_[pos];
        double x = xval_[col];
        double exact = -1.0;
        char target = 0;
        if (phase_ == 1 && feas_[pos] == -1) {
            if (delta > 0.0) {
                exact = (clb_[col] - x) / delta;
                target = kAtLower;
            }
        } else if (phase_ == 1 && feas_[pos] == 1) {
            if (delta < 0.0) {
                exact = (x - cub_[col]) / (-delta);
                target = kAtUpper;
            }
        } else if (delta < 0.0) {
            if (clb_[col] > -kInf) {
                exact = (x - clb_[col]) / (-delta);
                target = kAtLower;
            }
        } else {
            if (cub_[col] < kInf) {
                exact = (cub_[col] - x) / delta;
                target = kAtUpper;
            }
        }
        if (target == 0) continue;
        if (exact > theta_rel + 1e-12) continue;
        double a = std::abs(alpha);
        if (a > std::abs(best_alpha) + 1e-15 ||
            (std::abs(a - std::abs(best_alpha)) <= 1e-15 && best_pos >= 0 &&
             col < basic_[best_pos])) {
            best_pos = pos;
            best_alpha = alpha;
            best_exact = std::max(0.0, exact);
            best_target = target;
        }
    }
    if (best_pos < 0 || (flip_possible && range <= best_exact)) {
        r.flip = true;
        r.theta = range;
        return r;
    }
    r.pos = best_pos;
    r.theta = best_exact;
    r.target = best_target;
    return r;
}

LpStatus Simplex::iterate() {
    // duals for the current phase
    if (phase_ == 1) {
        compute_duals_exact();
    } else if (!y_exact_) {
        compute_duals_exact();
    }
    double d_q = 0.0;
    int q = select_entering(d_q);
    if (q < 0) {
        if (phase_ == 1) {
            if (infeas_count_ > 0 && primal_infeasibility() > opt_.feas_tol * (1.0 + m_))
                return LpStatus::Infeasible;
            phase_ = 2;
            y_exact_ = false;
            return LpStatus::IterLimit;  // signal: continue loop
        }
        if (!y_exact_) {
            compute_duals_exact();
            int q2 = select_entering(d_q);
            if (q2 >= 0) {
                q = q2;
            } else {
                return LpStatus::Optimal;
            }
        } else {
            return LpStatus::Optimal;
        }
    }

    int dir = state_[q] == kAtUpper ? -1 : (state_[q] == kAtLower ? 1 : (d_q < 0.0 ? 1 : -1));

    // spike = B^{-1} a_q
    std::fill(work_row_.begin(), work_row_.end(), 0.0);
    nz_row_.clear();
    for_col(q, [&](int i, double v) {
        if (work_row_[i] == 0.0) nz_row_.push_back(i);
        work_row_[i] += v;
    });
    std::fill(work_pos_.begin(), work_pos_.end(), 0.0);
    nz_pos_.clear();
    factor_.ftran(work_row_.data(), nz_row_, work_pos_.data(), nz_pos_);

    Ratio rt = ratio_test(q, dir, nz_pos_, work_pos_);
    if (rt.unbounded) {
        for (int pos : nz_pos_) work_pos_[pos] = 0.0;
        if (phase_ == 1) {
            stall_reason_ = "phase-1 direction without blocking bound";
            return LpStatus::Stall;
        }
        ray_col_ = q;
        ray_dir_ = dir;
        ray_nz_ = nz_pos_;
        ray_val_.assign(ray_nz_.size(), 0.0);
        for (std::size_t t = 0; t < ray_nz_.size(); ++t) ray_val_[t] = work_pos_[ray_nz_[t]];
        nz_pos_.clear();
        return LpStatus::Unbounded;
    }

    ++iters_;
    if (rt.theta <= 1e-12)
        ++degenerate_streak_;
    else
        degenerate_streak_ = 0;
    if (degenerate_streak_ > 20000 + 4 * m_) {
        stall_reason_ = "degenerate pivot streak";
        return LpStatus::Stall;
    }

    // apply step to basic values
    double theta = rt.theta;
    if (theta != 0.0) {
        for (int pos : nz_pos_) {
            double alpha = work_pos_[pos];
            if (alpha == 0.0) continue;
            double delta = -double(dir) * alpha;
            xval_[basic_[pos]] += theta * delta;
            set_feas(pos);
        }
    }

    if (rt.flip) {
        xval_[q] = dir > 0 ? cub_[q] : clb_[q];
        state_[q] = dir > 0 ? kAtUpper : kAtLower;
        for (int pos : nz_pos_) work_pos_[pos] = 0.0;
        nz_pos_.clear();
        return LpStatus::IterLimit;  // continue
    }

    int r = rt.pos;
    int lcol = basic_[r];
    double alpha_r = work_pos_[r];

    // dual update for phase 2 (rho = e_r B^{-1})
    if (phase_ == 2 && y_exact_) {
        std::fill(work_pos2_.begin(), work_pos2_.end(), 0.0);
        nz_pos2_.clear();
        work_pos2_[r] = 1.0;
        nz_pos2_.push_back(r);
        std::fill(work_row2_.begin(), work_row2_.end(), 0.0);
        nz_row2_.clear();
        factor_.btran(work_pos2_.data(), nz_pos2_, work_row2_.data(), nz_row2_);
        double step = d_q / alpha_r;
        for (int i : nz_row2_) {
            y_[i] += step * work_row2_[i];
            work_row2_[i] = 0.0;
        }
        nz_row2_.clear();
    }

    // leaving column snaps to its target bound
    xval_[lcol] = rt.target == kAtLower ? clb_[lcol] : cub_[lcol];
    state_[lcol] = rt.target;
    row_of_[lcol] = -1;
    // entering column becomes basic
    double enter_start = state_[q] == kAtUpper ? cub_[q] : (state_[q] == kAtLower ? clb_[q] : 0.0);
    xval_[q] = enter_start + double(dir) * theta;
    state_[q] = kBasic;
    basic_[r] = q;
    row_of_[q] = r;
    set_feas(r);

    bool updated = factor_.update(r, work_pos_.data(), nz_pos_);
    for (int pos : nz_pos_) work_pos_[pos] = 0.0;
    nz_pos_.clear();
    ++pivots_since_factor_;
    if (!updated || pivots_since_factor_ >= opt_.refactor_every) {
        refactorize();
    }
    return LpStatus::IterLimit;  // continue
}

LpStatus Simplex::solve() {
    start_time_ = now_s();
    if (!factor_valid_) refactorize();
    std::int64_t local_iters = 0;
    while (true) {
        if (opt_.iter_limit >= 0 && iters_ >= opt_.iter_limit) return LpStatus::IterLimit;
        if (opt_.time_limit_s >= 0.0 && (local_iters & 255) == 0 &&
            now_s() - start_time_ > opt_.time_limit_s)
            return LpStatus::TimeLimit;
        ++local_iters;
        LpStatus st = iterate();
        if (st != LpStatus::IterLimit) {
            if (st == LpStatus::Optimal && phase_ == 2) {
                // Final exact duals for reporting.
                if (!y_exact_) compute_duals_exact();
            }
            return st;
        }
    }
}

double Simplex::objective() const {
    double obj = p_.obj_offset;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * xval_[j];
    return obj;
}

std::vector<double> Simplex::solution() const {
    return std::vector<double>(xval_.begin(), xval_.begin() + n_);
}

std::vector<double> Simplex::duals() const { return y_; }

std::vector<double> Simplex::ray() const {
    std::vector<double> r(n_, 0.0);
    if (ray_col_ < 0) return r;
    if (ray_col_ < n_) r[ray_col_] = double(ray_dir_);
    for (std::size_t t = 0; t < ray_nz_.size(); ++t) {
        int col = basic_[ray_nz_[t]];
        if (col < n_) r[col] = -double(ray_dir_) * ray_val_[t];
    }
    return r;
}

}  // namespace tanksched
