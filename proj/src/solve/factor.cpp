#include "tanksched/solve/factor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tanksched {

namespace {
constexpr double kAbsPivotTol = 1e-11;
constexpr double kRelPivotTol = 0.01;  // Markowitz threshold vs column max
constexpr double kDropTol = 1e-13;
}  // namespace

// Right-looking elimination: singleton rows and columns are peeled first
// (they dominate staircase bases and create no fill), the remaining kernel is
// pivoted by Markowitz merit with threshold pivoting.
int BasisFactor::factorize(std::vector<int>& basic, const ColumnSource& A) {
    m_ = int(basic.size());
    prow_.clear();
    pcol_.clear();
    pivot_.clear();
    Lp_.assign(1, 0);
    Li_.clear();
    Lx_.clear();
    Up_.assign(1, 0);
    Uc_.clear();
    Ux_.clear();
    etas_.clear();
    eta_i_.clear();
    eta_x_.clear();
    growth_ = 1.0;

    // Working copy of the basis, column-major with live flags.
    std::vector<std::vector<std::pair<std::int32_t, double>>> col(m_);
    std::vector<char> row_live(m_, 1), col_live(m_, 1);
    std::vector<std::int32_t> row_len(m_, 0), col_len(m_, 0);
    std::vector<std::vector<std::int32_t>> row_cols(m_);  // may hold stale entries

    double amax = 0.0;
    for (int q = 0; q < m_; ++q) {
        int j = basic[q];
        if (j >= A.ncols) {
            int r = j - A.ncols;
            col[q].push_back({r, 1.0});
        } else {
            for (std::int64_t e = A.Ap[j]; e < A.Ap[j + 1]; ++e)
                col[q].push_back({A.Ai[e], A.Ax[e]});
        }
        col_len[q] = std::int32_t(col[q].size());
        for (auto& [i, v] : col[q]) {
            ++row_len[i];
            row_cols[i].push_back(q);
            amax = std::max(amax, std::abs(v));
        }
    }

    auto col_value_at = [&](int q, int i) -> double {
        for (auto& [r, v] : col[q])
            if (r == i) return v;
        return 0.0;
    };

    std::vector<std::int32_t> singleton_rows, singleton_cols;
    for (int i = 0; i < m_; ++i)
        if (row_len[i] == 1) singleton_rows.push_back(i);
    for (int q = 0; q < m_; ++q)
        if (col_len[q] == 1) singleton_cols.push_back(q);

    // Removes column q from the live structure (entries die with it).
    auto retire_column = [&](int q, int except_row) {
        for (auto& [i, v] : col[q]) {
            if (!row_live[i] || i == except_row) continue;
            if (--row_len[i] == 1) singleton_rows.push_back(i);
        }
        col_live[q] = 0;
    };

    auto compact_column = [&](int q) {
        auto& c = col[q];
        std::size_t out = 0;
        for (auto& e : c)
            if (row_live[e.first] && std::abs(e.second) > kDropTol) c[out++] = e;
        c.resize(out);
        col_len[q] = std::int32_t(out);
    };

    // Emits the L-eta for pivot (pr, q) and removes the pivot column.
    auto emit_L = [&](int pr, int q, double d) {
        for (auto& [i, v] : col[q]) {
            if (!row_live[i] || i == pr) continue;
            Li_.push_back(i);
            Lx_.push_back(v / d);
        }
        Lp_.push_back(std::int64_t(Li_.size()));
    };

    int done = 0;
    std::vector<std::pair<std::int32_t, double>> urow;  // (column, value) of the pivot row
    std::vector<double> dense(m_, 0.0);

    auto pivot_step = [&](int pr, int q) {
        double d = col_value_at(q, pr);
        last_pivot_mag_ = std::abs(d);
        growth_ = std::max(growth_, std::abs(d) / std::max(amax, 1e-300));
        prow_.push_back(pr);
        pcol_.push_back(q);
        pivot_.push_back(d);
        emit_L(pr, q, d);

        // Collect the live pivot-row entries (the U row).
        urow.clear();
        for (std::int32_t c : row_cols[pr]) {
            if (!col_live[c] || c == q) continue;
            double v = col_value_at(c, pr);
            if (v != 0.0) urow.push_back({c, v});
        }
        std::sort(urow.begin(), urow.end());
        urow.erase(std::unique(urow.begin(), urow.end(),
                               [](auto& a, auto& b) { return a.first == b.first; }),
                   urow.end());
        for (auto& [c, v] : urow) {
            Uc_.push_back(c);
            Ux_.push_back(v);
        }
        Up_.push_back(std::int64_t(Uc_.size()));

        // Eliminate: row_i -= l_i * row_pr for every multiplier row.
        std::int64_t lbeg = Lp_[done], lend = Lp_[done + 1];
        row_live[pr] = 0;
        retire_column(q, pr);
        if (lend > lbeg) {
            for (auto& [c, v] : urow) {
                // col[c] -= l * v scattered over the multiplier rows
                auto& cc = col[c];
                for (auto& e : cc) dense[e.first] = e.second;
                for (std::int64_t e = lbeg; e < lend; ++e) {
                    int i = Li_[e];
                    if (!row_live[i]) continue;
                    double before = dense[i];
                    double after = before - Lx_[e] * v;
                    dense[i] = after;
                    if (before == 0.0 && after != 0.0) {
                        cc.push_back({std::int32_t(i), 0.0});
                        ++row_len[i];
                        row_cols[i].push_back(c);
                    }
                    growth_ = std::max(growth_, std::abs(after) / std::max(amax, 1e-300));
                }
                std::size_t out = 0;
                for (auto& e : cc) {
                    e.second = dense[e.first];
                    dense[e.first] = 0.0;
                    bool keep = row_live[e.first] && std::abs(e.second) > kDropTol;
                    if (!keep && row_live[e.first] && e.second != 0.0) {
                        // dropped numerically: fix row count
                    }
                    if (keep)
                        cc[out++] = e;
                    else if (row_live[e.first]) {
                        if (--row_len[e.first] == 1) singleton_rows.push_back(e.first);
                    }
                }
                cc.resize(out);
                col_len[c] = std::int32_t(out);
                if (col_len[c] == 1) singleton_cols.push_back(c);
            }
        }
        ++done;
    };

    // Bucket scan state for the Markowitz kernel.
    while (done < m_) {
        // Peel singleton rows.
        bool advanced = false;
        while (!singleton_rows.empty()) {
            int i = singleton_rows.back();
            singleton_rows.pop_back();
            if (!row_live[i] || row_len[i] != 1) continue;
            int q = -1;
            double best = 0.0;
            for (std::int32_t c : row_cols[i]) {
                if (!col_live[c]) continue;
                double v = col_value_at(c, i);
                if (std::abs(v) > std::abs(best)) {
                    best = v;
                    q = c;
                }
            }
            if (q < 0 || std::abs(best) <= kAbsPivotTol) {
                row_len[i] = 0;  // numerically empty; left for logical repair
                continue;
            }
            pivot_step(i, q);
            advanced = true;
        }
        if (done == m_) break;
        // Peel singleton columns.
        while (!singleton_cols.empty()) {
            int q = singleton_cols.back();
            singleton_cols.pop_back();
            if (!col_live[q]) continue;
            compact_column(q);
            if (col_len[q] != 1) {
                if (col_len[q] == 0) col_live[q] = 0;
                continue;
            }
            auto [i, v] = col[q][0];
            if (std::abs(v) <= kAbsPivotTol) {
                col_live[q] = 0;
                if (--row_len[i] == 1) singleton_rows.push_back(i);
                continue;
            }
            pivot_step(i, q);
            advanced = true;
            if (!singleton_rows.empty()) break;  // prefer row peels
        }
        if (done == m_) break;
        if (advanced) continue;

        // Markowitz kernel pivot: scan live columns, lowest fill estimate
        // first, with threshold pivoting; deterministic tie-breaks.
        int best_q = -1, best_r = -1;
        std::int64_t best_merit = -1;
        int examined = 0;
        for (int q = 0; q < m_ && examined < 64; ++q) {
            if (!col_live[q]) continue;
            compact_column(q);
            if (col_len[q] == 0) {
                col_live[q] = 0;
                continue;
            }
            double cmax = 0.0;
            for (auto& e : col[q]) cmax = std::max(cmax, std::abs(e.second));
            for (auto& [i, v] : col[q]) {
                if (std::abs(v) < std::max(kAbsPivotTol, kRelPivotTol * cmax)) continue;
                std::int64_t merit =
                    std::int64_t(row_len[i] - 1) * std::int64_t(col_len[q] - 1);
                if (best_merit < 0 || merit < best_merit) {
                    best_merit = merit;
                    best_q = q;
                    best_r = i;
                }
            }
            ++examined;
            if (best_merit == 0) break;
        }
        if (best_q < 0) break;  // only numerically-dead structure remains
        pivot_step(best_r, best_q);
    }

    // Repair: any live row is covered by its logical.
    int repaired = 0;
    if (done < m_) {
        std::vector<char> pos_used(m_, 0);
        for (int q : pcol_) pos_used[q] = 1;
        std::vector<int> free_pos;
        for (int q = 0; q < m_; ++q)
            if (!pos_used[q]) free_pos.push_back(q);
        int fp = 0;
        for (int i = 0; i < m_; ++i) {
            if (!row_live[i]) continue;
            int q = free_pos[fp++];
            basic[q] = A.ncols + i;  // logical of row i
            prow_.push_back(i);
            pcol_.push_back(q);
            pivot_.push_back(1.0);
            Lp_.push_back(std::int64_t(Li_.size()));
            Up_.push_back(std::int64_t(Uc_.size()));
            row_live[i] = 0;
            ++repaired;
            ++done;
        }
    }
    if (done != m_) throw std::logic_error("basis factorization failed to cover all rows");

    step_of_row_.assign(m_, -1);
    for (int j = 0; j < m_; ++j) step_of_row_[prow_[j]] = j;
    build_transposes();
    acc_.assign(m_, 0.0);
    acc_touch_.clear();
    return repaired;
}

void BasisFactor::build_transposes() {
    // L transpose, row-major
    LTp_.assign(m_ + 1, 0);
    for (std::int32_t i : Li_) ++LTp_[i + 1];
    for (int i = 0; i < m_; ++i) LTp_[i + 1] += LTp_[i];
    LTj_.resize(Li_.size());
    LTx_.resize(Lx_.size());
    {
        std::vector<std::int64_t> cur(LTp_.begin(), LTp_.end() - 1);
        for (int j = 0; j < m_; ++j)
            for (std::int64_t e = Lp_[j]; e < Lp_[j + 1]; ++e) {
                std::int64_t at = cur[Li_[e]]++;
                LTj_[at] = j;
                LTx_[at] = Lx_[e];
            }
    }
    // U transpose, position-major
    UTp_.assign(m_ + 1, 0);
    for (std::int32_t c : Uc_) ++UTp_[c + 1];
    for (int c = 0; c < m_; ++c) UTp_[c + 1] += UTp_[c];
    UTj_.resize(Uc_.size());
    UTx_.resize(Ux_.size());
    {
        std::vector<std::int64_t> cur(UTp_.begin(), UTp_.end() - 1);
        for (int j = 0; j < m_; ++j)
            for (std::int64_t e = Up_[j]; e < Up_[j + 1]; ++e) {
                std::int64_t at = cur[Uc_[e]]++;
                UTj_[at] = j;
                UTx_[at] = Ux_[e];
            }
    }
}

void BasisFactor::ftran(double* w, std::vector<int>& w_nz, double* out, std::vector<int>& out_nz) {
    // L pass, scatter form (row space).
    for (int j = 0; j < m_; ++j) {
        double val = w[prow_[j]];
        if (val == 0.0) continue;
        for (std::int64_t e = Lp_[j]; e < Lp_[j + 1]; ++e) {
            int i = Li_[e];
            if (w[i] == 0.0) w_nz.push_back(i);
            w[i] -= Lx_[e] * val;
        }
    }
    // U back-substitution, scatter form into position space.
    for (std::int32_t t : acc_touch_) acc_[t] = 0.0;
    acc_touch_.clear();
    for (int j = m_ - 1; j >= 0; --j) {
        double v = w[prow_[j]] - acc_[j];
        if (v == 0.0) continue;
        double x = v / pivot_[j];
        int cpos = pcol_[j];
        out[cpos] = x;
        out_nz.push_back(cpos);
        for (std::int64_t e = UTp_[cpos]; e < UTp_[cpos + 1]; ++e) {
            int jj = UTj_[e];
            if (acc_[jj] == 0.0) acc_touch_.push_back(jj);
            acc_[jj] += UTx_[e] * x;
        }
    }
    // Update etas, position space.
    for (const Eta& eta : etas_) {
        double val = out[eta.r];
        if (val == 0.0) continue;
        double xr = val / eta.piv;
        out[eta.r] = xr;
        for (std::int64_t e = eta.begin; e < eta.end; ++e) {
            int i = eta_i_[e];
            if (out[i] == 0.0) out_nz.push_back(i);
            out[i] -= eta_x_[e] * xr;
        }
    }
    // Clear the consumed row-space input.
    for (int i : w_nz) w[i] = 0.0;
    w_nz.clear();
}

void BasisFactor::btran(double* c, std::vector<int>& c_nz, double* out, std::vector<int>& out_nz) {
    // Update etas in reverse (position space, gather form).
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double sum = 0.0;
        for (std::int64_t e = it->begin; e < it->end; ++e) sum += eta_x_[e] * c[eta_i_[e]];
        double before = c[it->r];
        double after = (before - sum) / it->piv;
        if (before == 0.0 && after != 0.0) c_nz.push_back(it->r);
        c[it->r] = after;
    }
    // U^T pass, scatter form (position -> step space stored in acc_).
    for (std::int32_t t : acc_touch_) acc_[t] = 0.0;
    acc_touch_.clear();
    // acc_ here accumulates subtractions scattered onto later positions.
    for (int j = 0; j < m_; ++j) {
        int cpos = pcol_[j];
        double v = c[cpos];
        if (v == 0.0) continue;
        double z = v / pivot_[j];
        c[cpos] = z;  // reuse as z_j storage keyed by position
        for (std::int64_t e = Up_[j]; e < Up_[j + 1]; ++e) {
            int cc = Uc_[e];
            if (c[cc] == 0.0) c_nz.push_back(cc);
            c[cc] -= Ux_[e] * z;
        }
    }
    // L^T pass: y[prow_j] = z_j - pending contributions from later rows.
    for (int j = m_ - 1; j >= 0; --j) {
        double v = c[pcol_[j]] - acc_[j];
        if (v == 0.0) continue;
        int row = prow_[j];
        out[row] = v;
        out_nz.push_back(row);
        for (std::int64_t e = LTp_[row]; e < LTp_[row + 1]; ++e) {
            int jj = LTj_[e];
            if (acc_[jj] == 0.0) acc_touch_.push_back(jj);
            acc_[jj] += LTx_[e] * v;
        }
    }
    for (int i : c_nz) c[i] = 0.0;
    c_nz.clear();
}

bool BasisFactor::update(int r, const double* spike, const std::vector<int>& spike_nz) {
    double piv = spike[r];
    double smax = 0.0;
    for (int i : spike_nz) smax = std::max(smax, std::abs(spike[i]));
    if (std::abs(piv) < kAbsPivotTol || std::abs(piv) < 1e-8 * smax) return false;
    Eta eta;
    eta.r = r;
    eta.piv = piv;
    eta.begin = std::int64_t(eta_i_.size());
    for (int i : spike_nz) {
        if (i == r) continue;
        double v = spike[i];
        if (std::abs(v) <= kDropTol) continue;
        eta_i_.push_back(i);
        eta_x_.push_back(v);
    }
    eta.end = std::int64_t(eta_i_.size());
    etas_.push_back(eta);
    return true;
}

}  // namespace tanksched
