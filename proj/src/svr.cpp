// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include "subgrade/svr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "subgrade/error.hpp"
#include "subgrade/simd/kernels.hpp"

namespace subgrade {
namespace {

void rbf_row(const KernelSpec& spec, const Matrix& rows, std::span<const double> q, std::span<double> out) {
    const auto& k = simd::active();
    k.squared_distances(rows.data().data(), rows.rows(), rows.cols(), q.data(), out.data());
    for (auto& v : out) v = std::exp(-spec.gamma * v);
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

// Solver state for the coefficient-difference parametrisation.
class SmoSolver {
public:
    SmoSolver(const Matrix& x, std::span<const double> y, const SvrHyperParams& hp)
        : n_(x.rows()), y_(y), hp_(hp), gram_(gram_matrix(hp.kernel, x)), beta_(n_, 0.0), f_(n_, 0.0) {}

    SvrSolverStats run(bool record) {
        SvrSolverStats st;
        const std::size_t limit = hp_.max_passes ? hp_.max_passes : 10000 * n_;
        for (;;) {
            const auto [i, j, gap] = select_pair();
            st.final_gap = gap;
            if (gap <= hp_.tolerance) {
                st.converged = true;
                break;
            }
            if (st.updates >= limit || !step(i, j)) break;
            ++st.updates;
            if (record) st.objective_trace.push_back(objective());
        }
        st.dual_objective = objective();
        return st;
    }

    double bias() const {
        double acc = 0.0;
        std::size_t free = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double a = std::fabs(beta_[i]);
            if (a > 0.0 && a < hp_.c) {
                acc += y_[i] - f_[i] - hp_.epsilon * sign(beta_[i]);
                ++free;
            }
        }
        if (free > 0) return acc / static_cast<double>(free);
        // midpoint of the KKT-feasible interval [max up-gradient, min down-gradient]
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_; ++i) {
            if (beta_[i] < hp_.c) lo = std::max(lo, up_gradient(i));
            if (beta_[i] > -hp_.c) hi = std::min(hi, down_gradient(i));
        }
        if (!std::isfinite(lo)) return hi;
        if (!std::isfinite(hi)) return lo;
        return 0.5 * (lo + hi);
    }

    const std::vector<double>& beta() const { return beta_; }

private:
    // Rate of change of the dual when beta_i increases.
    double up_gradient(std::size_t i) const {
        return y_[i] - f_[i] - hp_.epsilon * (beta_[i] >= 0.0 ? 1.0 : -1.0);
    }
    // Negated rate of change when beta_i decreases.
    double down_gradient(std::size_t i) const {
        return y_[i] - f_[i] - hp_.epsilon * (beta_[i] > 0.0 ? 1.0 : -1.0);
    }

    struct Pair {
        std::size_t i, j;
        double gap;
    };

    Pair select_pair() const {
        std::size_t bi = n_, bj = n_;
        double up = -std::numeric_limits<double>::infinity();
        double down = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n_; ++k) {
            if (beta_[k] < hp_.c) {
                const double g = up_gradient(k);
                if (g > up) {
                    up = g;
                    bi = k;
                }
            }
            if (beta_[k] > -hp_.c) {
                const double g = down_gradient(k);
                if (g < down) {
                    down = g;
                    bj = k;
                }
            }
        }
        if (bi == n_ || bj == n_) return {0, 0, 0.0};
        return {bi, bj, up - down};
    }

    bool step(std::size_t i, std::size_t j) {
        const double c = hp_.c;
        const double bi = beta_[i], bj = beta_[j];
        const double hi_i = c - bi, hi_j = bj + c;
        const double hi = std::min(hi_i, hi_j);
        if (!(hi > 0.0)) return false;
        const double eta = std::max(0.0, gram_(i, i) + gram_(j, j) - 2.0 * gram_(i, j));
        const double ei = f_[i] - y_[i], ej = f_[j] - y_[j];

        std::array<double, 4> knots{};
        std::size_t nk = 0;
        knots[nk++] = 0.0;
        if (-bi > 0.0 && -bi < hi) knots[nk++] = -bi;
        if (bj > 0.0 && bj < hi) knots[nk++] = bj;
        knots[nk++] = hi;
        std::sort(knots.begin(), knots.begin() + static_cast<std::ptrdiff_t>(nk));

        // Gain of beta_i += t, beta_j -= t, accumulated segment by segment so
        // that tiny steps are not lost to cancellation in |b + t| - |b|.
        double best_t = 0.0, best = 0.0, base = 0.0;
        for (std::size_t s = 0; s + 1 < nk; ++s) {
            const double a = knots[s], b = knots[s + 1];
            const double mid = 0.5 * (a + b);
            const double slope = -(ei - ej) - hp_.epsilon * (sign(bi + mid) - sign(bj - mid));
            auto gain = [&](double t) { return base + slope * (t - a) - 0.5 * eta * (t - a) * (t + a); };
            auto consider = [&](double t) {
                const double v = gain(t);
                if (v > best) {
                    best = v;
                    best_t = t;
                }
            };
            consider(b);
            if (eta > 0.0) consider(std::clamp(slope / eta, a, b));
            base = gain(b);
        }
        if (!(best > 0.0)) return false;

        double ni = bi + best_t, nj = bj - best_t;
        if (best_t == hi_i) ni = c;
        if (best_t == hi_j) nj = -c;
        if (best_t == -bi) ni = 0.0;
        if (best_t == bj) nj = 0.0;
        const double di = ni - bi, dj = nj - bj;
        beta_[i] = ni;
        beta_[j] = nj;
        const auto& k = simd::active();
        k.axpy(di, gram_.row(i).data(), f_.data(), n_);
        k.axpy(dj, gram_.row(j).data(), f_.data(), n_);
        return true;
    }

    double objective() const {
        double quad = 0.0, lin = 0.0, l1 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            quad += beta_[i] * f_[i];
            lin += beta_[i] * y_[i];
            l1 += std::fabs(beta_[i]);
        }
        return -0.5 * quad + lin - hp_.epsilon * l1;
    }

    std::size_t n_;
    std::span<const double> y_;
    const SvrHyperParams& hp_;
    Matrix gram_;
    std::vector<double> beta_;
    std::vector<double> f_; // f_i = sum_k beta_k K_ik
};

} // namespace

void KernelSpec::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::InvalidArgument, "RBF gamma must be finite and > 0");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "kernel operands differ in length");
    return std::exp(-spec.gamma * simd::squared_distance(a, b));
}

Matrix gram_matrix(const KernelSpec& spec, const Matrix& x) {
    Matrix g(x.rows(), x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) rbf_row(spec, x, x.row(r), g.row(r));
    // exact symmetry regardless of summation order in the distance kernel
    for (std::size_t r = 0; r < x.rows(); ++r) {
        g(r, r) = 1.0;
        for (std::size_t c = r + 1; c < x.rows(); ++c) g(c, r) = g(r, c);
    }
    return g;
}

void SvrHyperParams::validate() const {
    kernel.validate();
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "C must be finite and > 0");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw Error(ErrorCode::InvalidArgument, "epsilon must be finite and >= 0");
    if (!(tolerance > 0.0) || !std::isfinite(tolerance))
        throw Error(ErrorCode::InvalidArgument, "tolerance must be finite and > 0");
}

SvrModel::SvrModel(Matrix support_x, std::vector<double> dual_coeffs, double bias, SvrHyperParams hyper,
                   std::vector<std::size_t> support_indices, SvrSolverStats stats)
    : support_x_(std::move(support_x)), coeffs_(std::move(dual_coeffs)), bias_(bias), hyper_(hyper),
      support_indices_(std::move(support_indices)), stats_(std::move(stats)) {
    if (support_x_.rows() != coeffs_.size()) throw Error(ErrorCode::DimensionMismatch, "support rows vs coefficients");
    if (!support_indices_.empty() && support_indices_.size() != coeffs_.size())
        throw Error(ErrorCode::DimensionMismatch, "support indices vs coefficients");
}

std::vector<double> SvrModel::dense_coeffs(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < support_indices_.size(); ++k) out.at(support_indices_[k]) = coeffs_[k];
    return out;
}

double SvrModel::predict(std::span<const double> x) const {
    if (x.size() != dims()) throw Error(ErrorCode::DimensionMismatch, "SVR input width");
    if (coeffs_.empty()) return bias_;
    std::vector<double> k(coeffs_.size());
    rbf_row(hyper_.kernel, support_x_, x, k);
    return simd::active().dot(coeffs_.data(), k.data(), k.size()) + bias_;
}

void SvrModel::predict_batch(const Matrix& x, std::span<double> out) const {
    if (out.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "prediction buffer size");
    if (x.cols() != dims()) throw Error(ErrorCode::DimensionMismatch, "SVR input width");
    std::vector<double> k(coeffs_.size());
    const auto& kern = simd::active();
    for (std::size_t r = 0; r < x.rows(); ++r) {
        if (coeffs_.empty()) {
            out[r] = bias_;
            continue;
        }
        rbf_row(hyper_.kernel, support_x_, x.row(r), k);
        out[r] = kern.dot(coeffs_.data(), k.data(), k.size()) + bias_;
    }
}

SvrModel fit_svr(const Matrix& x, std::span<const double> y, const SvrHyperParams& hyper, std::uint64_t /*seed*/,
                 const SvrFitOptions& options) {
    hyper.validate();
    if (x.rows() < 2) throw Error(ErrorCode::DegenerateInput, "SVR needs at least 2 samples");
    if (y.size() != x.rows()) throw Error(ErrorCode::DimensionMismatch, "SVR targets vs rows");
    for (double v : y)
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "SVR target");

    SmoSolver solver(x, y, hyper);
    auto stats = solver.run(options.record_objective);
    const double b = solver.bias();

    std::vector<std::size_t> idx;
    std::vector<double> coeffs;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (solver.beta()[i] != 0.0) {
            idx.push_back(i);
            coeffs.push_back(solver.beta()[i]);
        }
    }
    Matrix sv = x.select_rows(idx);
    if (idx.empty()) sv = Matrix(0, x.cols());
    return SvrModel(std::move(sv), std::move(coeffs), b, hyper, std::move(idx), std::move(stats));
}

double dual_objective(std::span<const double> coeffs, const Matrix& x, std::span<const double> y,
                      const SvrHyperParams& hyper) {
    if (coeffs.size() != x.rows() || y.size() != x.rows())
        throw Error(ErrorCode::DimensionMismatch, "dual objective operand sizes");
    double quad = 0.0, lin = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (coeffs[i] == 0.0) continue;
        for (std::size_t j = 0; j < x.rows(); ++j) {
            if (coeffs[j] == 0.0) continue;
            double d2 = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) {
                const double t = x(i, k) - x(j, k);
                d2 += t * t;
            }
            quad += coeffs[i] * coeffs[j] * std::exp(-hyper.kernel.gamma * d2);
        }
        lin += coeffs[i] * y[i];
        l1 += std::fabs(coeffs[i]);
    }
    return -0.5 * quad + lin - hyper.epsilon * l1;
}

} // namespace subgrade
