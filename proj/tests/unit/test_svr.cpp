// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "subgrade/error.hpp"
#include "subgrade/svr.hpp"
#include "support/oracles.hpp"

using namespace subgrade;

namespace {

struct Problem {
    Matrix x;
    std::vector<double> y;
    SvrHyperParams hyper;
};

Problem random_problem(Rng& rng, std::size_t n, std::size_t d) {
    Problem p;
    p.x = oracle::random_matrix(rng, n, d);
    p.y = oracle::random_vector(rng, n, -1.0, 2.0);
    p.hyper.c = rng.uniform(0.05, 10.0);
    p.hyper.kernel.gamma = rng.uniform(0.1, 3.0);
    p.hyper.epsilon = rng.uniform(0.0, 0.3);
    p.hyper.tolerance = 1e-10;
    return p;
}

void check_kkt(const Problem& p, const SvrModel& m) {
    const std::size_t n = p.x.rows();
    const double tol = m.hyper().tolerance;
    const auto beta = m.dense_coeffs(n);
    const double sum = std::accumulate(beta.begin(), beta.end(), 0.0);
    CHECK(std::fabs(sum) <= tol);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::fabs(beta[i]) <= p.hyper.c + tol);
        const double err = std::fabs(m.predict(p.x.row(i)) - p.y[i]);
        if (std::fabs(beta[i]) < p.hyper.c) CHECK(err <= p.hyper.epsilon + tol);
        else CHECK(err >= p.hyper.epsilon - tol);
        if (beta[i] != 0.0 && std::fabs(beta[i]) < p.hyper.c) CHECK(std::fabs(err - p.hyper.epsilon) <= tol);
    }
}

} // namespace

TEST_CASE("rbf kernel values") {
    const KernelSpec k{0.5};
    const std::vector<double> a{0.0, 0.0}, b{1.0, 0.0}, c{1.0, 1.0};
    CHECK(kernel_eval(k, a, a) == 1.0);
    CHECK(kernel_eval(k, a, b) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(kernel_eval(k, a, c) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(kernel_eval(k, a, std::vector<double>{1.0}), Error);
    CHECK_THROWS_AS(KernelSpec{0.0}.validate(), Error);

    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        const auto u = oracle::random_vector(rng, 4, -2, 2), v = oracle::random_vector(rng, 4, -2, 2);
        const KernelSpec s{rng.uniform(0.01, 5)};
        CHECK(kernel_eval(s, u, v) == kernel_eval(s, v, u));
        CHECK(oracle::close_rel(kernel_eval(s, u, v), oracle::rbf(u, v, s.gamma), 1e-13));
    }
}

TEST_CASE("gram matrix is symmetric with unit diagonal") {
    Rng rng(8);
    const Matrix x = oracle::random_matrix(rng, 9, 3);
    const Matrix g = gram_matrix(KernelSpec{0.9}, x);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(g(i, i) == 1.0);
        for (std::size_t j = 0; j < 9; ++j) {
            CHECK(g(i, j) == g(j, i));
            CHECK(oracle::close_rel(g(i, j), oracle::rbf(x.row(i), x.row(j), 0.9), 1e-14));
        }
    }
}

TEST_CASE("constant targets give an empty model") {
    Rng rng(9);
    const Matrix x = oracle::random_matrix(rng, 12, 3);
    const std::vector<double> y(12, 4.25);
    SvrHyperParams h;
    h.epsilon = 0.01;
    const auto m = fit_svr(x, y, h);
    CHECK(m.converged());
    for (double c : m.dense_coeffs(12)) CHECK(c == 0.0);
    CHECK(m.bias() == doctest::Approx(4.25).epsilon(1e-12));
    for (std::size_t r = 0; r < 12; ++r) CHECK(m.predict(x.row(r)) == doctest::Approx(4.25).epsilon(1e-12));
}

TEST_CASE("two-sample problem matches the dual grid oracle") {
    const Matrix x{{0.0}, {1.0}};
    const std::vector<double> y{0.0, 1.0};
    SvrHyperParams h;
    h.c = 2.0;
    h.epsilon = 0.1;
    h.kernel.gamma = 0.5;
    h.tolerance = 1e-12;
    const auto m = fit_svr(x, y, h);
    const double got = dual_objective(m.dense_coeffs(2), x, y, h);
    const double exact = oracle::svr_dual_optimum(x, y, h.c, h.kernel.gamma, h.epsilon);
    const double grid = oracle::svr_dual_grid(x, y, h.c, h.kernel.gamma, h.epsilon, 20000);
    CHECK(got >= grid - 1e-6);
    CHECK(std::fabs(got - exact) <= 1e-6);
}

TEST_CASE("small problems reach the exact dual optimum") {
    Rng rng(10);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 2);
        const auto p = random_problem(rng, n, 1 + static_cast<std::size_t>(t % 3));
        const auto m = fit_svr(p.x, p.y, p.hyper);
        REQUIRE(m.converged());
        const double got = dual_objective(m.dense_coeffs(n), p.x, p.y, p.hyper);
        const double grid = oracle::svr_dual_grid(p.x, p.y, p.hyper.c, p.hyper.kernel.gamma, p.hyper.epsilon, 400);
        const double exact = oracle::svr_dual_optimum(p.x, p.y, p.hyper.c, p.hyper.kernel.gamma, p.hyper.epsilon);
        CHECK(got >= grid - 1e-6);
        CHECK(got >= exact - 1e-6);
        check_kkt(p, m);
    }
}

TEST_CASE("kkt conditions and feasibility on random problems") {
    Rng rng(11);
    for (int t = 0; t < 40; ++t) {
        auto p = random_problem(rng, 5 + static_cast<std::size_t>(rng.uniform_index(40)), 3);
        p.hyper.tolerance = 1e-8;
        const auto m = fit_svr(p.x, p.y, p.hyper);
        REQUIRE(m.converged());
        CHECK(m.stats().final_gap <= p.hyper.tolerance);
        check_kkt(p, m);
    }
}

TEST_CASE("dual objective never decreases during the solve") {
    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        const auto p = random_problem(rng, 30, 4);
        const auto m = fit_svr(p.x, p.y, p.hyper, 0, SvrFitOptions{true});
        const auto& trace = m.stats().objective_trace;
        REQUIRE(!trace.empty());
        CHECK(trace.front() >= 0.0);
        for (std::size_t k = 1; k < trace.size(); ++k)
            CHECK(trace[k] >= trace[k - 1] - 1e-12 * std::max(1.0, std::fabs(trace[k - 1])));
        const double recomputed = dual_objective(m.dense_coeffs(30), p.x, p.y, p.hyper);
        CHECK(oracle::close_rel(trace.back(), recomputed, 1e-9, 1e-12));
        CHECK(oracle::close_rel(m.stats().dual_objective, recomputed, 1e-9, 1e-12));
    }
}

TEST_CASE("dual objective at the origin is zero") {
    const Matrix x{{0.1}, {0.7}, {0.3}};
    const std::vector<double> y{1.0, -2.0, 5.0};
    CHECK(dual_objective(std::vector<double>(3, 0.0), x, y, SvrHyperParams{}) == 0.0);
}

TEST_CASE("prediction equals the dense sum over every training row") {
    Rng rng(13);
    for (int t = 0; t < 10; ++t) {
        const auto p = random_problem(rng, 25, 3);
        const auto m = fit_svr(p.x, p.y, p.hyper);
        const auto beta = m.dense_coeffs(25);
        const Matrix q = oracle::random_matrix(rng, 20, 3, -0.5, 1.5);
        std::vector<double> batch(20);
        m.predict_batch(q, batch);
        for (std::size_t r = 0; r < 20; ++r) {
            long double s = m.bias();
            for (std::size_t i = 0; i < 25; ++i) s += beta[i] * oracle::rbf(p.x.row(i), q.row(r), p.hyper.kernel.gamma);
            const double want = static_cast<double>(s);
            CHECK(oracle::close_rel(m.predict(q.row(r)), want, 1e-12, 1e-12));
            CHECK(oracle::close_rel(batch[r], want, 1e-12, 1e-12));
        }
    }
}

TEST_CASE("prediction is linear in coefficients and bias") {
    Rng rng(14);
    const auto p = random_problem(rng, 20, 2);
    const auto m = fit_svr(p.x, p.y, p.hyper);
    auto doubled = m.dual_coeffs();
    for (auto& c : doubled) c *= 2.0;
    const SvrModel m2(m.support_x(), doubled, 2.0 * m.bias(), m.hyper());
    for (int t = 0; t < 50; ++t) {
        const auto q = oracle::random_vector(rng, 2, 0, 1);
        CHECK(oracle::close_rel(m2.predict(q), 2.0 * m.predict(q), 1e-14, 1e-14));
    }
}

TEST_CASE("degenerate models and errors") {
    const SvrModel empty(Matrix(0, 2), {}, 3.5, SvrHyperParams{});
    CHECK(empty.predict(std::vector<double>{0.2, 0.9}) == 3.5);

    const SvrModel one(Matrix{{0.3, 0.4}}, {1.0}, -0.25, SvrHyperParams{});
    CHECK(one.predict(std::vector<double>{0.3, 0.4}) == 0.75);
    CHECK_THROWS_AS(one.predict(std::vector<double>{0.3}), Error);

    const std::vector<double> y1{1.0};
    try {
        fit_svr(Matrix{{0.0}}, y1, SvrHyperParams{});
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateInput);
    }
    SvrHyperParams bad;
    bad.c = -1;
    CHECK_THROWS_AS(fit_svr(Matrix{{0.0}, {1.0}}, std::vector<double>{0, 1}, bad), Error);
}

TEST_CASE("update budget exhaustion is reported") {
    Rng rng(15);
    auto p = random_problem(rng, 40, 3);
    p.hyper.max_passes = 2;
    const auto m = fit_svr(p.x, p.y, p.hyper);
    CHECK_FALSE(m.converged());
    CHECK(m.stats().updates <= 2);
    const auto beta = m.dense_coeffs(40);
    CHECK(std::fabs(std::accumulate(beta.begin(), beta.end(), 0.0)) <= 1e-12);
}

TEST_CASE("fit is deterministic") {
    Rng rng(16);
    const auto p = random_problem(rng, 30, 3);
    CHECK(fit_svr(p.x, p.y, p.hyper, 1) == fit_svr(p.x, p.y, p.hyper, 1));
}
