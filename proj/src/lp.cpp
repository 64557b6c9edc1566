#include "cfaudit/lp.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cfaudit {

namespace {

// Dense phase-1 simplex on the standard-form system A v = rhs, v >= 0,
// minimising the sum of artificial variables. Bland's rule (lowest eligible
// index) guarantees termination and keeps pivoting deterministic.
//
// Variable layout for n points in dimension d:
//   [0, d)        w+          [d, 2d)       w-
//   [2d, 2d+1)    b+          [2d+1, 2d+2)  b-
//   [2d+2, +n)    surplus s_i
//   [... , +n)    artificial a_i
// Row i encodes  y_i (w.p_i + b) - s_i + a_i = 1  with y_i in {-1,+1}.
class Phase1Simplex {
public:
    Phase1Simplex(const std::vector<std::vector<double>>& points, const std::vector<int>& labels,
                  double eps)
        : eps_(eps),
          n_(points.size()),
          d_(points.empty() ? 0 : points[0].size()),
          cols_(2 * d_ + 2 + 2 * n_),
          tableau_(n_ + 1, std::vector<double>(cols_ + 1, 0.0)),
          basis_(n_) {
        for (size_t i = 0; i < n_; ++i) {
            const double y = labels[i] == 1 ? 1.0 : -1.0;
            auto& row = tableau_[i];
            for (size_t j = 0; j < d_; ++j) {
                row[j] = y * points[i][j];
                row[d_ + j] = -y * points[i][j];
            }
            row[2 * d_] = y;
            row[2 * d_ + 1] = -y;
            row[2 * d_ + 2 + i] = -1.0;        // surplus
            row[2 * d_ + 2 + n_ + i] = 1.0;    // artificial
            row[cols_] = 1.0;                  // rhs
            basis_[i] = 2 * d_ + 2 + n_ + i;
        }
        // Objective row: minimise the artificial sum, expressed over the
        // current (all-artificial) basis.
        auto& obj = tableau_[n_];
        for (size_t i = 0; i < n_; ++i) {
            for (size_t j = 0; j <= cols_; ++j) obj[j] -= tableau_[i][j];
        }
    }

    bool solve() {
        const size_t artificial_start = 2 * d_ + 2 + n_;
        const size_t max_iter = 2000 * (n_ + cols_ + 1);
        for (size_t iter = 0; iter < max_iter; ++iter) {
            // Bland: entering column = lowest index with negative reduced cost.
            size_t enter = cols_;
            for (size_t j = 0; j < cols_; ++j) {
                if (tableau_[n_][j] < -eps_) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols_) break;  // optimal

            size_t leave = n_;
            double best_ratio = 0.0;
            for (size_t i = 0; i < n_; ++i) {
                const double a = tableau_[i][enter];
                if (a > eps_) {
                    const double ratio = tableau_[i][cols_] / a;
                    if (leave == n_ || ratio < best_ratio - eps_ ||
                        (std::abs(ratio - best_ratio) <= eps_ && basis_[i] < basis_[leave])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave == n_) break;  // unbounded entering direction; objective stays where it is
            pivot(leave, enter);
        }
        // Feasible iff all artificials were driven to (numerical) zero.
        double artificial_sum = 0.0;
        for (size_t i = 0; i < n_; ++i) {
            if (basis_[i] >= artificial_start) artificial_sum += tableau_[i][cols_];
        }
        return artificial_sum <= 1e-7;
    }

    SeparationResult extract() const {
        SeparationResult res;
        res.feasible = true;
        std::vector<double> value(cols_, 0.0);
        for (size_t i = 0; i < n_; ++i) value[basis_[i]] = tableau_[i][cols_];
        res.weights.resize(d_);
        for (size_t j = 0; j < d_; ++j) res.weights[j] = value[j] - value[d_ + j];
        res.bias = value[2 * d_] - value[2 * d_ + 1];
        return res;
    }

private:
    void pivot(size_t row, size_t col) {
        auto& pr = tableau_[row];
        const double p = pr[col];
        for (size_t j = 0; j <= cols_; ++j) pr[j] /= p;
        for (size_t i = 0; i <= n_; ++i) {
            if (i == row) continue;
            const double factor = tableau_[i][col];
            if (factor == 0.0) continue;
            for (size_t j = 0; j <= cols_; ++j) tableau_[i][j] -= factor * pr[j];
        }
        basis_[row] = col;
    }

    double eps_;
    size_t n_;
    size_t d_;
    size_t cols_;
    std::vector<std::vector<double>> tableau_;
    std::vector<size_t> basis_;
};

}  // namespace

SeparationResult strict_separation(const std::vector<std::vector<double>>& points,
                                   const std::vector<int>& labels, double eps) {
    if (points.empty()) throw std::invalid_argument("strict_separation needs points");
    if (points.size() != labels.size()) {
        throw std::invalid_argument("points and labels differ in length");
    }
    for (const auto& p : points) {
        if (p.size() != points[0].size()) {
            throw std::invalid_argument("points differ in dimension");
        }
    }

    Phase1Simplex simplex(points, labels, eps);
    if (!simplex.solve()) return {};
    SeparationResult res = simplex.extract();

    // The basic solution is exact up to pivoting round-off; re-verify the
    // margin so a numerically borderline basis cannot smuggle in a bogus
    // "feasible".
    for (size_t i = 0; i < points.size(); ++i) {
        double z = res.bias;
        for (size_t j = 0; j < points[i].size(); ++j) z += res.weights[j] * points[i][j];
        const double y = labels[i] == 1 ? 1.0 : -1.0;
        if (y * z < 1.0 - 1e-6) return {};
    }
    return res;
}

}  // namespace cfaudit
