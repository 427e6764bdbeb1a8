#include "lp_simplex.hpp"

#include <cmath>
#include <vector>

namespace esgport::detail {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-10;
constexpr double kOptTol = 1e-10;
constexpr int kRefactorEvery = 64;
constexpr int kDegenerateLimit = 50;

class Simplex {
public:
    explicit Simplex(const LpProblem& lp) : lp_(lp), m_(lp.A.rows()), n_(lp.A.cols()) {
        const Eigen::Index total = n_ + m_;
        lo_.resize(total);
        up_.resize(total);
        x_.resize(total);
        sign_.resize(m_);
        pos_.assign(static_cast<std::size_t>(total), -1);
        head_.resize(static_cast<std::size_t>(m_));
        for (Eigen::Index j = 0; j < n_; ++j) {
            lo_(j) = lp.lower(j);
            up_(j) = lp.upper(j);
            x_(j) = std::isfinite(lo_(j)) ? lo_(j) : (std::isfinite(up_(j)) ? up_(j) : 0.0);
        }
        const Eigen::VectorXd r = lp.b - lp.A * x_.head(n_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            sign_(i) = r(i) >= 0.0 ? 1.0 : -1.0;
            lo_(n_ + i) = 0.0;
            up_(n_ + i) = std::numeric_limits<double>::infinity();
            x_(n_ + i) = std::abs(r(i));
            head_[static_cast<std::size_t>(i)] = n_ + i;
            pos_[static_cast<std::size_t>(n_ + i)] = i;
        }
        binv_ = sign_.asDiagonal();
        norms_.resize(n_);
        for (Eigen::Index j = 0; j < n_; ++j) norms_(j) = std::sqrt(1.0 + lp.A.col(j).squaredNorm());
    }

    LpResult run(int max_iterations) {
        LpResult res;
        Eigen::VectorXd cost = Eigen::VectorXd::Zero(n_ + m_);
        cost.tail(m_).setOnes();
        LpStatus st = iterate(cost, max_iterations, res.iterations);
        const double infeas = x_.tail(m_).sum();
        if (st == LpStatus::IterationLimit) return finish(res, st, cost);
        if (infeas > 1e-8 * (1.0 + lp_.b.lpNorm<Eigen::Infinity>())) return finish(res, LpStatus::Infeasible, cost);
        for (Eigen::Index i = 0; i < m_; ++i) {
            up_(n_ + i) = 0.0;
            if (pos_[static_cast<std::size_t>(n_ + i)] < 0) x_(n_ + i) = 0.0;
        }
        cost.setZero();
        cost.head(n_) = lp_.c;
        st = iterate(cost, max_iterations, res.iterations);
        return finish(res, st, cost);
    }

private:
    void column(Eigen::Index j, Eigen::VectorXd& out) const {
        if (j < n_) {
            out = lp_.A.col(j);
        } else {
            out.setZero(m_);
            out(j - n_) = sign_(j - n_);
        }
    }

    void refactor() {
        Eigen::MatrixXd B(m_, m_);
        Eigen::VectorXd col;
        for (Eigen::Index i = 0; i < m_; ++i) {
            column(head_[static_cast<std::size_t>(i)], col);
            B.col(i) = col;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (!lu.isInvertible()) return;  // keep the updated inverse
        binv_ = lu.inverse();
        Eigen::VectorXd rhs = lp_.b;
        for (Eigen::Index j = 0; j < n_ + m_; ++j) {
            if (pos_[static_cast<std::size_t>(j)] >= 0 || x_(j) == 0.0) continue;
            if (j < n_)
                rhs -= lp_.A.col(j) * x_(j);
            else
                rhs(j - n_) -= sign_(j - n_) * x_(j);
        }
        const Eigen::VectorXd xb = binv_ * rhs;
        for (Eigen::Index i = 0; i < m_; ++i) x_(head_[static_cast<std::size_t>(i)]) = xb(i);
    }

    LpStatus iterate(const Eigen::VectorXd& cost, int max_iterations, int& iterations) {
        int degenerate = 0;
        int since_refactor = 0;
        Eigen::VectorXd cb(m_), w(m_), col(m_), d(n_ + m_);
        while (true) {
            if (since_refactor++ % kRefactorEvery == 0) refactor();
            for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost(head_[static_cast<std::size_t>(i)]);
            const Eigen::VectorXd y = binv_.transpose() * cb;
            d.head(n_) = cost.head(n_) - lp_.A.transpose() * y;
            for (Eigen::Index i = 0; i < m_; ++i) d(n_ + i) = cost(n_ + i) - sign_(i) * y(i);

            const bool bland = degenerate > kDegenerateLimit;
            Eigen::Index q = -1;
            double best = 0.0;
            for (Eigen::Index j = 0; j < n_ + m_; ++j) {
                if (pos_[static_cast<std::size_t>(j)] >= 0 || lo_(j) == up_(j)) continue;
                const bool can_up = x_(j) < up_(j);
                const bool can_down = x_(j) > lo_(j);
                const double dj = d(j);
                if (!((dj < -kOptTol && can_up) || (dj > kOptTol && can_down))) continue;
                if (bland) {
                    q = j;
                    break;
                }
                const double score = std::abs(dj) / (j < n_ ? norms_(j) : 1.0);
                if (score > best) {
                    best = score;
                    q = j;
                }
            }
            if (q < 0) return LpStatus::Optimal;
            if (iterations >= max_iterations) return LpStatus::IterationLimit;
            ++iterations;

            column(q, col);
            w = binv_ * col;
            const double dir = d(q) < 0.0 ? 1.0 : -1.0;

            // Harris two-pass ratio test on x_B + t * g.
            double tmax = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double g = -dir * w(i);
                const Eigen::Index b = head_[static_cast<std::size_t>(i)];
                if (g < -kPivotTol && std::isfinite(lo_(b)))
                    tmax = std::min(tmax, (x_(b) - lo_(b) + kFeasTol) / -g);
                else if (g > kPivotTol && std::isfinite(up_(b)))
                    tmax = std::min(tmax, (up_(b) - x_(b) + kFeasTol) / g);
            }
            Eigen::Index r = -1;
            double t = std::numeric_limits<double>::infinity();
            double pivot = 0.0;
            if (std::isfinite(tmax)) {
                for (Eigen::Index i = 0; i < m_; ++i) {
                    const double g = -dir * w(i);
                    const Eigen::Index b = head_[static_cast<std::size_t>(i)];
                    double ti;
                    if (g < -kPivotTol && std::isfinite(lo_(b)))
                        ti = (x_(b) - lo_(b)) / -g;
                    else if (g > kPivotTol && std::isfinite(up_(b)))
                        ti = (up_(b) - x_(b)) / g;
                    else
                        continue;
                    if (ti <= tmax && std::abs(g) > pivot) {
                        pivot = std::abs(g);
                        r = i;
                        t = std::max(ti, 0.0);
                    }
                }
            }
            const double span = up_(q) - lo_(q);
            const bool flip = std::isfinite(span) && span <= t;
            if (r < 0 && !flip) return LpStatus::Unbounded;
            if (flip) t = span;
            degenerate = t <= 1e-12 ? degenerate + 1 : 0;

            for (Eigen::Index i = 0; i < m_; ++i) x_(head_[static_cast<std::size_t>(i)]) += -dir * w(i) * t;
            if (flip) {
                x_(q) = dir > 0 ? up_(q) : lo_(q);
                continue;
            }
            x_(q) += dir * t;
            const Eigen::Index leaving = head_[static_cast<std::size_t>(r)];
            x_(leaving) = (-dir * w(r) < 0.0) ? lo_(leaving) : up_(leaving);
            pos_[static_cast<std::size_t>(leaving)] = -1;
            pos_[static_cast<std::size_t>(q)] = r;
            head_[static_cast<std::size_t>(r)] = q;

            const double wr = w(r);
            binv_.row(r) /= wr;
            for (Eigen::Index i = 0; i < m_; ++i)
                if (i != r && w(i) != 0.0) binv_.row(i) -= w(i) * binv_.row(r);
        }
    }

    LpResult& finish(LpResult& res, LpStatus st, const Eigen::VectorXd& cost) {
        refactor();
        Eigen::VectorXd cb(m_);
        for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost(head_[static_cast<std::size_t>(i)]);
        res.status = st;
        res.x = x_.head(n_);
        res.y = binv_.transpose() * cb;
        res.objective = lp_.c.dot(res.x);
        return res;
    }

    const LpProblem& lp_;
    Eigen::Index m_;
    Eigen::Index n_;
    Eigen::VectorXd lo_, up_, x_, sign_, norms_;
    std::vector<Eigen::Index> pos_;
    std::vector<Eigen::Index> head_;
    Eigen::MatrixXd binv_;
};

}  // namespace

LpResult solve_lp(const LpProblem& lp, int max_iterations) {
    if (lp.A.rows() == 0) {
        LpResult res;
        res.status = LpStatus::Optimal;
        res.x = lp.lower;
        res.objective = lp.c.dot(res.x);
        return res;
    }
    Simplex s(lp);
    return s.run(max_iterations);
}

}  // namespace esgport::detail
