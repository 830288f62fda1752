#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "typology/ridge.hpp"

using namespace typology;

namespace {

double max_gap(const RidgeSolution& s, const oracle::RidgeFit& o) {
    double gap = 0;
    for (std::size_t j = 0; j < s.coef.rows(); ++j)
        for (std::size_t c = 0; c < s.coef.cols(); ++c)
            gap = std::max(gap, static_cast<double>(std::fabs(s.coef(j, c) - o.coef[c][j])));
    for (std::size_t c = 0; c < s.intercept.size(); ++c)
        gap = std::max(gap, static_cast<double>(std::fabs(s.intercept[c] - o.intercept[c])));
    return gap;
}

}  // namespace

TEST_SUITE("ridge") {
    TEST_CASE("primal and dual paths match gradient descent") {
        std::mt19937_64 rng(2024);
        for (int trial = 0; trial < 12; ++trial) {
            const std::size_t n = 5 + rng() % 40, d = 2 + rng() % 20, k = 2 + rng() % 4;
            const oracle::Problem p = oracle::random_problem(rng, n, d, k);
            const double alpha = 0.5 + static_cast<double>(rng() % 50) / 10.0;
            CAPTURE(n);
            CAPTURE(d);
            const auto ref = oracle::gradient_descent(p.x, p.y, p.weight, alpha);
            REQUIRE(ref.gradient_norm < 1e-10);
            CHECK(max_gap(solve_ridge(p.x, p.y, p.weight, alpha, SolverPath::primal), ref) < 1e-6);
            CHECK(max_gap(solve_ridge(p.x, p.y, p.weight, alpha, SolverPath::dual), ref) < 1e-6);
        }
    }

    TEST_CASE("solution is a minimum of the objective") {
        std::mt19937_64 rng(5);
        const oracle::Problem p = oracle::random_problem(rng, 30, 6, 3);
        const RidgeSolution s = solve_ridge(p.x, p.y, p.weight, 1.0);
        std::normal_distribution<double> z(0.0, 1e-3);
        for (std::size_t c = 0; c < 3; ++c) {
            std::vector<double> y(30);
            for (std::size_t i = 0; i < 30; ++i) y[i] = p.y(i, c);
            std::vector<long double> b(6);
            for (std::size_t j = 0; j < 6; ++j) b[j] = s.coef(j, c);
            const long double best = oracle::objective(p.x, y, p.weight, 1.0, b, s.intercept[c]);
            for (int t = 0; t < 20; ++t) {
                auto moved = b;
                for (auto& v : moved) v += z(rng);
                CHECK(oracle::objective(p.x, y, p.weight, 1.0, moved, s.intercept[c] + z(rng)) >= best);
            }
        }
    }

    TEST_CASE("integer weights equal row replication") {
        std::mt19937_64 rng(8);
        oracle::Problem p = oracle::random_problem(rng, 12, 4, 2);
        std::vector<double> w(12);
        Matrix xr(0, 4), yr(0, 2);
        std::vector<double> xs, ys;
        std::size_t rows = 0;
        for (std::size_t i = 0; i < 12; ++i) {
            w[i] = static_cast<double>(1 + i % 3);
            for (int r = 0; r < static_cast<int>(w[i]); ++r, ++rows) {
                for (std::size_t j = 0; j < 4; ++j) xs.push_back(p.x(i, j));
                for (std::size_t c = 0; c < 2; ++c) ys.push_back(p.y(i, c));
            }
        }
        xr = Matrix(rows, 4);
        xr.data() = xs;
        yr = Matrix(rows, 2);
        yr.data() = ys;
        const RidgeSolution a = solve_ridge(p.x, p.y, w, 0.7);
        const RidgeSolution b = solve_ridge(xr, yr, std::vector<double>(rows, 1.0), 0.7);
        for (std::size_t i = 0; i < a.coef.data().size(); ++i)
            CHECK(a.coef.data()[i] == doctest::Approx(b.coef.data()[i]).epsilon(1e-10));
        for (std::size_t c = 0; c < 2; ++c) CHECK(a.intercept[c] == doctest::Approx(b.intercept[c]).epsilon(1e-10));
    }

    TEST_CASE("huge alpha collapses to the weighted class frequencies") {
        std::mt19937_64 rng(13);
        const oracle::Problem p = oracle::random_problem(rng, 40, 8, 3);
        const RidgeSolution s = solve_ridge(p.x, p.y, p.weight, 1e12);
        double wsum = 0;
        std::vector<double> freq(3, 0);
        for (std::size_t i = 0; i < 40; ++i) {
            wsum += p.weight[i];
            freq[p.label[i]] += p.weight[i];
        }
        for (double v : s.coef.data()) CHECK(std::fabs(v) < 1e-9);
        for (std::size_t c = 0; c < 3; ++c) CHECK(s.intercept[c] == doctest::Approx(freq[c] / wsum).epsilon(1e-9));
    }

    TEST_CASE("classifier: class order, weighting and majority collapse") {
        Matrix x(6, 1);
        const double xv[] = {0, 1, 2, 3, 4, 5};
        std::copy(std::begin(xv), std::end(xv), x.data().begin());
        const std::vector<std::string> labels = {"b", "a", "c", "a", "c", "a"};
        const RidgeEstimator est = fit(x, labels, 1e12, ClassWeighting::none);
        CHECK(est.classes == std::vector<std::string>{"a", "c", "b"});
        for (double v : {-10.0, 0.0, 10.0}) CHECK(predict(est, std::vector<double>{v}).value == "a");

        const RidgeEstimator bal = fit(x, labels, 1e12, ClassWeighting::balanced);
        for (double b : bal.intercepts) CHECK(b == doctest::Approx(1.0 / 3.0));
        CHECK(predict(bal, std::vector<double>{0.0}).class_index < 3);

        const std::vector<std::size_t> idx = {0, 1, 1, 1};
        CHECK(class_weights(idx, 2, ClassWeighting::balanced) == std::vector<double>{2.0, 4.0 / 6.0, 4.0 / 6.0, 4.0 / 6.0});
    }

    TEST_CASE("separable data is learned") {
        Matrix x(8, 2);
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < 8; ++i) {
            x(i, 0) = i < 4 ? -1.0 - 0.1 * i : 1.0 + 0.1 * i;
            x(i, 1) = 0.3 * static_cast<double>(i % 2);
            labels.push_back(i < 4 ? "left" : "right");
        }
        const RidgeEstimator est = fit(x, labels, 0.1, ClassWeighting::balanced);
        CHECK(est.classes == std::vector<std::string>{"left", "right"});
        CHECK(predict(est, std::vector<double>{-2.0, 0.0}).value == "left");
        CHECK(predict(est, std::vector<double>{2.0, 0.0}).value == "right");
    }

    TEST_CASE("contract violations") {
        Matrix x(3, 2, 1.0);
        CHECK_THROWS_AS(fit(x, std::vector<std::string>{"a", "a", "a"}, 1.0, ClassWeighting::none), ContractError);
        CHECK_THROWS_AS(fit(x, std::vector<std::string>{"a", "b"}, 1.0, ClassWeighting::none), ContractError);
        CHECK_THROWS_AS(fit(x, std::vector<std::string>{"a", "b", "a"}, 0.0, ClassWeighting::none), ContractError);
        const RidgeEstimator est = fit(x, std::vector<std::string>{"a", "b", "a"}, 1.0, ClassWeighting::none);
        CHECK_THROWS_AS(predict(est, std::vector<double>{1.0}), ContractError);
    }
}
