#include "risura/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace risura {

Matrix align_columns(const Matrix& g_true, const Matrix& g_hat) {
    const Index T = g_true.cols();
    const Index J = g_hat.cols();
    Matrix aligned = Matrix::Zero(g_true.rows(), T);
    if (J == 0) return aligned;
    if (g_hat.rows() != g_true.rows())
        throw std::invalid_argument("align_columns: row count mismatch");

    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(T, J);
    for (Index t = 0; t < T; ++t) {
        const double nt = g_true.col(t).norm();
        for (Index j = 0; j < J; ++j) {
            const double nj = g_hat.col(j).norm();
            if (nt > 0 && nj > 0)
                corr(t, j) = std::abs(g_hat.col(j).dot(g_true.col(t))) / (nt * nj);
        }
    }

    std::vector<bool> used_t(static_cast<std::size_t>(T), false);
    std::vector<bool> used_j(static_cast<std::size_t>(J), false);
    const Index picks = std::min(T, J);
    for (Index p = 0; p < picks; ++p) {
        double best = -1.0;
        Index bt = -1, bj = -1;
        for (Index t = 0; t < T; ++t) {
            if (used_t[static_cast<std::size_t>(t)]) continue;
            for (Index j = 0; j < J; ++j) {
                if (used_j[static_cast<std::size_t>(j)]) continue;
                if (corr(t, j) > best) {
                    best = corr(t, j);
                    bt = t;
                    bj = j;
                }
            }
        }
        if (bt < 0) break;
        used_t[static_cast<std::size_t>(bt)] = true;
        used_j[static_cast<std::size_t>(bj)] = true;
        const double denom = g_hat.col(bj).squaredNorm();
        if (denom > 0) {
            const cd scale = g_hat.col(bj).dot(g_true.col(bt)) / denom;
            aligned.col(bt) = scale * g_hat.col(bj);
        }
    }
    return aligned;
}

double nmse(const Matrix& g_true, const Matrix& g_hat) {
    const double energy = g_true.squaredNorm();
    if (!(energy > 0)) throw std::invalid_argument("nmse: G_true must be nonzero");
    const Matrix aligned = align_columns(g_true, g_hat);
    return (g_true - aligned).squaredNorm() / energy;
}

double linear_to_db(double x) { return 10.0 * std::log10(std::max(x, 1e-300)); }

double packet_error_rate(const std::vector<Bits>& sent, const std::vector<Bits>& decoded,
                         int Ka) {
    if (Ka < 1) throw std::invalid_argument("packet_error_rate: Ka must be >= 1");
    const std::set<Bits> dec(decoded.begin(), decoded.end());
    int hit = 0;
    for (const auto& m : sent)
        if (dec.count(m)) ++hit;
    return 1.0 - static_cast<double>(hit) / static_cast<double>(Ka);
}

int false_alarm_count(const std::vector<Bits>& sent, const std::vector<Bits>& decoded) {
    const std::set<Bits> s(sent.begin(), sent.end());
    const std::set<Bits> dec(decoded.begin(), decoded.end());
    int fa = 0;
    for (const auto& m : dec)
        if (!s.count(m)) ++fa;
    return fa;
}

}  // namespace risura
