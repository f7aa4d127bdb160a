// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "subgrade/matrix.hpp"
#include "subgrade/regressor.hpp"

namespace subgrade {

/// RBF kernel exp(-gamma * |a - b|^2).
struct KernelSpec {
    double gamma = 1.0;

    void validate() const;
    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

/// Full n x n Gram matrix of the rows of x.
Matrix gram_matrix(const KernelSpec& spec, const Matrix& x);

struct SvrHyperParams {
    double c = 1.0;          // box bound on each dual coefficient
    double epsilon = 0.1;    // half-width of the insensitive tube
    KernelSpec kernel{};
    double tolerance = 1e-6; // KKT gap at which the solver stops
    std::size_t max_passes = 0; // pair updates; 0 means 10000 * n

    void validate() const;
    friend bool operator==(const SvrHyperParams&, const SvrHyperParams&) = default;
};

struct SvrSolverStats {
    std::size_t updates = 0;
    bool converged = false;
    double final_gap = 0.0;      // max violating-pair gap at exit
    double dual_objective = 0.0; // value at exit
    /// Dual objective after each accepted update (only when requested).
    std::vector<double> objective_trace;

    friend bool operator==(const SvrSolverStats&, const SvrSolverStats&) = default;
};

struct SvrFitOptions {
    bool record_objective = false;
};

/// Trained epsilon-SVR: prediction = sum_i coeff_i K(sv_i, x) + bias.
class SvrModel final : public Regressor {
public:
    SvrModel() = default;
    SvrModel(Matrix support_x, std::vector<double> dual_coeffs, double bias, SvrHyperParams hyper,
             std::vector<std::size_t> support_indices = {}, SvrSolverStats stats = {});

    const Matrix& support_x() const noexcept { return support_x_; }
    const std::vector<double>& dual_coeffs() const noexcept { return coeffs_; }
    /// Training-row positions of the support vectors (empty if unknown).
    const std::vector<std::size_t>& support_indices() const noexcept { return support_indices_; }
    double bias() const noexcept { return bias_; }
    const SvrHyperParams& hyper() const noexcept { return hyper_; }
    const SvrSolverStats& stats() const noexcept { return stats_; }

    /// Coefficients scattered back onto n training rows (zero off the support).
    std::vector<double> dense_coeffs(std::size_t n) const;

    std::size_t dims() const override { return support_x_.cols(); }
    double predict(std::span<const double> x) const override;
    void predict_batch(const Matrix& x, std::span<double> out) const override;
    bool converged() const override { return stats_.converged; }

    friend bool operator==(const SvrModel& a, const SvrModel& b) {
        return a.support_x_ == b.support_x_ && a.coeffs_ == b.coeffs_ && a.bias_ == b.bias_ && a.hyper_ == b.hyper_ &&
               a.support_indices_ == b.support_indices_ && a.stats_ == b.stats_;
    }

private:
    Matrix support_x_;
    std::vector<double> coeffs_;
    double bias_ = 0.0;
    SvrHyperParams hyper_;
    std::vector<std::size_t> support_indices_;
    SvrSolverStats stats_;
};

/// Solve the epsilon-SVR dual by pairwise coordinate ascent (SMO).
///
/// Variables are the differences coeff_i = beta_i - beta_i* in [-C, C] with
/// sum(coeff) = 0. Each step picks the maximal violating pair (largest
/// up-gradient, smallest down-gradient, lowest index on ties) and solves the
/// two-variable piecewise-quadratic subproblem exactly. Stops when the pair gap
/// is <= tolerance or after max_passes updates; the latter returns the best
/// state with stats().converged == false. The seed is accepted for interface
/// uniformity; the solver itself uses no randomness.
SvrModel fit_svr(const Matrix& x, std::span<const double> y, const SvrHyperParams& hyper, std::uint64_t seed = 0,
                 const SvrFitOptions& options = {});

/// Dual objective -1/2 c'Kc + c'y - eps * |c|_1, recomputed from scratch.
double dual_objective(std::span<const double> coeffs, const Matrix& x, std::span<const double> y,
                      const SvrHyperParams& hyper);

} // namespace subgrade
