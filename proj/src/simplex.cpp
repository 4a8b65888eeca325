#include "latticelab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace llab {
namespace {

constexpr double kPivotEps = 1e-10;
constexpr double kCostEps = 1e-11;
constexpr int kDegenerateSwitch = 50;
constexpr int kMaxPivots = 200000;

class Tableau {
public:
    Tableau(std::size_t m, std::size_t ncols) : m_(m), w_(ncols + 1), t_((m + 1) * (ncols + 1), 0.0) {}

    double& at(std::size_t i, std::size_t j) { return t_[i * w_ + j]; }
    double at(std::size_t i, std::size_t j) const { return t_[i * w_ + j]; }
    double& rhs(std::size_t i) { return t_[i * w_ + w_ - 1]; }
    double* row(std::size_t i) { return &t_[i * w_]; }
    std::size_t cols() const { return w_ - 1; }

    void pivot(std::size_t r, std::size_t c)
    {
        double* pr = row(r);
        const double inv = 1.0 / pr[c];
        for (std::size_t j = 0; j < w_; ++j) pr[j] *= inv;
        pr[c] = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* pi = row(i);
            const double f = pi[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < w_; ++j) pi[j] -= f * pr[j];
            pi[c] = 0.0;
        }
    }

private:
    std::size_t m_;
    std::size_t w_;
    std::vector<double> t_;
};

struct Solver {
    std::size_t m, n, ncols;
    Tableau tab;
    std::vector<std::size_t> basis;
    std::vector<char> barred;
    std::vector<std::size_t> id_col;  // columns that started as the identity: they hold B^{-1}
    std::vector<double> b0;           // right-hand side after sign normalization
    bool perturbed = false;
    int pivots = 0;

    Solver(std::size_t m_, std::size_t n_, std::size_t ncols_)
        : m(m_), n(n_), ncols(ncols_), tab(m_, ncols_), basis(m_), barred(ncols_, 0), id_col(m_), b0(m_) {}

    // Shifts every row by a distinct tiny amount so that no basic value sits at zero.
    void perturb()
    {
        double scale = 1.0;
        for (double b : b0) scale = std::max(scale, std::fabs(b));
        for (std::size_t i = 0; i < m; ++i) {
            double frac = static_cast<double>((i * 7919 + 13) % 1009) / 1009.0;
            tab.rhs(i) += 1e-10 * scale * (1.0 + frac);
        }
        perturbed = true;
    }

    // Recomputes basic values as B^{-1} b0 and the objective entry to match.
    void restore(const std::vector<double>& cost)
    {
        if (!perturbed) return;
        for (std::size_t i = 0; i < m; ++i) {
            double v = 0.0;
            for (std::size_t k = 0; k < m; ++k) v += tab.at(i, id_col[k]) * b0[k];
            tab.rhs(i) = v;
        }
        double z = 0.0;
        for (std::size_t i = 0; i < m; ++i) z += cost[basis[i]] * tab.rhs(i);
        tab.at(m, ncols) = z;
        perturbed = false;
    }

    void price(const std::vector<double>& cost)
    {
        double* obj = tab.row(m);
        for (std::size_t j = 0; j <= ncols; ++j) obj[j] = (j < ncols) ? -cost[j] : 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double cb = cost[basis[i]];
            if (cb == 0.0) continue;
            const double* ri = tab.row(i);
            for (std::size_t j = 0; j <= ncols; ++j) obj[j] += cb * ri[j];
        }
    }

    // Returns false when unbounded.
    bool run()
    {
        int degenerate = 0;
        bool bland = false;
        bool tried_perturb = false;
        while (true) {
            const double* obj = tab.row(m);
            std::size_t enter = ncols;
            double best = -kCostEps;
            for (std::size_t j = 0; j < ncols; ++j) {
                if (barred[j]) continue;
                if (obj[j] < -kCostEps) {
                    if (bland) {
                        enter = j;
                        break;
                    }
                    if (obj[j] < best) {
                        best = obj[j];
                        enter = j;
                    }
                }
            }
            if (enter == ncols) return true;

            std::size_t leave = m;
            double ratio = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double a = tab.at(i, enter);
                if (a <= kPivotEps) continue;
                const double r = tab.at(i, ncols) / a;
                if (leave == m || r < ratio - 1e-12 * (1.0 + std::fabs(ratio))) {
                    leave = i;
                    ratio = r;
                } else if (r <= ratio + 1e-12 * (1.0 + std::fabs(ratio))) {
                    bool take = bland ? basis[i] < basis[leave] : a > tab.at(leave, enter);
                    if (take) {
                        leave = i;
                        ratio = std::min(ratio, r);
                    }
                }
            }
            if (leave == m) return false;
            // a stall is broken by perturbing the right-hand side; Bland's rule is the second resort and,
            // once on, stays on since resetting it lets rounding noise revive a cycle
            if (ratio <= 1e-11 * (1.0 + std::fabs(tab.at(m, ncols)))) {
                if (++degenerate > kDegenerateSwitch) {
                    if (!perturbed && !tried_perturb) {
                        perturb();
                        tried_perturb = true;
                        degenerate = 0;
                    } else {
                        bland = true;
                    }
                }
            } else {
                degenerate = 0;
            }
            tab.pivot(leave, enter);
            basis[leave] = enter;
            if (++pivots > kMaxPivots) throw std::runtime_error("simplex: pivot limit exceeded");
        }
    }
};

}  // namespace

LpResult solve_lp(const LpProblem& lp)
{
    const std::size_t m = lp.rows.size();
    const std::size_t n = lp.c.size();
    if (lp.rel.size() != m || lp.rhs.size() != m) throw std::invalid_argument("simplex: row metadata mismatch");
    for (const auto& r : lp.rows)
        if (r.size() != n) throw std::invalid_argument("simplex: row width mismatch");

    std::vector<double> flip(m, 1.0);
    std::vector<Rel> rel(lp.rel);
    for (std::size_t i = 0; i < m; ++i) {
        if (lp.rhs[i] < 0.0) {
            flip[i] = -1.0;
            if (rel[i] == Rel::le) rel[i] = Rel::ge;
            else if (rel[i] == Rel::ge) rel[i] = Rel::le;
        }
    }
    std::size_t nslack = 0, nart = 0;
    for (Rel r : rel) {
        if (r != Rel::eq) ++nslack;
        if (r != Rel::le) ++nart;
    }
    const std::size_t ncols = n + nslack + nart;
    Solver s(m, n, ncols);
    std::vector<std::size_t>& id_col = s.id_col;
    std::vector<char> is_art(ncols, 0);
    std::size_t sc = n, ac = n + nslack;
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) s.tab.at(i, j) = flip[i] * lp.rows[i][j];
        s.tab.rhs(i) = s.b0[i] = flip[i] * lp.rhs[i];
        scale = std::max(scale, std::fabs(lp.rhs[i]));
        if (rel[i] == Rel::le) {
            s.tab.at(i, sc) = 1.0;
            s.basis[i] = id_col[i] = sc++;
        } else {
            if (rel[i] == Rel::ge) s.tab.at(i, sc++) = -1.0;
            s.tab.at(i, ac) = 1.0;
            is_art[ac] = 1;
            s.basis[i] = id_col[i] = ac++;
        }
    }

    LpResult res;
    if (nart > 0) {
        std::vector<double> cost(ncols, 0.0);
        for (std::size_t j = 0; j < ncols; ++j)
            if (is_art[j]) cost[j] = -1.0;
        s.price(cost);
        s.run();
        s.restore(cost);
        if (-s.tab.at(m, ncols) > 1e-9 * scale) {
            res.status = LpStatus::infeasible;
            res.pivots = s.pivots;
            return res;
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_art[s.basis[i]]) continue;
            std::size_t best = ncols;
            double mag = 1e-9;
            for (std::size_t j = 0; j < ncols; ++j) {
                if (is_art[j]) continue;
                if (std::fabs(s.tab.at(i, j)) > mag) {
                    mag = std::fabs(s.tab.at(i, j));
                    best = j;
                }
            }
            if (best != ncols) {
                s.tab.pivot(i, best);
                s.basis[i] = best;
            }
        }
        for (std::size_t j = 0; j < ncols; ++j)
            if (is_art[j]) s.barred[j] = 1;
    }

    std::vector<double> cost(ncols, 0.0);
    for (std::size_t j = 0; j < n; ++j) cost[j] = lp.c[j];
    s.price(cost);
    const bool bounded = s.run();
    s.restore(cost);
    res.pivots = s.pivots;
    if (!bounded) {
        res.status = LpStatus::unbounded;
        return res;
    }
    res.status = LpStatus::optimal;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (s.basis[i] < n) res.x[s.basis[i]] = std::max(0.0, s.tab.at(i, ncols));
    res.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.value += lp.c[j] * res.x[j];
    res.dual.resize(m);
    for (std::size_t i = 0; i < m; ++i) res.dual[i] = flip[i] * s.tab.at(m, id_col[i]);
    return res;
}

}  // namespace llab
