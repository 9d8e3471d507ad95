#include <doctest.h>

#include "properties.hpp"
#include "ssqm/numerics.hpp"
#include "ssqm/transforms.hpp"

#include <cmath>

using namespace ssqm;

TEST_CASE("rank of identity and zero matrices") {
    const RankReport id = numerical_rank(Eigen::MatrixXd(Eigen::MatrixXd::Identity(12, 12)));
    CHECK(id.rank == 12);
    CHECK(id.nullity == 0);
    const RankReport z = numerical_rank(Eigen::MatrixXd(Eigen::MatrixXd::Zero(7, 5)));
    CHECK(z.rank == 0);
    CHECK(z.nullity == 5);
    CHECK(z.nullspace.cols() == 5);
}

TEST_CASE("nullspace is orthonormal and annihilates") {
    Eigen::MatrixXd M(3, 4);
    M << 1, 2, 3, 4, 2, 4, 6, 8, 0, 1, 0, 1;
    const RankReport r = numerical_rank(M);
    CHECK(r.rank == 2);
    CHECK((M * r.nullspace).norm() < 1e-12);
    CHECK((r.nullspace.transpose() * r.nullspace - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("unstable rank is reported") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(4, 4);
    M(3, 3) = 3e-6;
    CHECK_THROWS_AS(numerical_rank(M), RankUnstable);
}

TEST_CASE("complex rank and its real embedding") {
    Eigen::MatrixXcd M(2, 2);
    M << std::complex<double>(1, 1), std::complex<double>(0, 2), std::complex<double>(2, 0),
        std::complex<double>(2, 2);
    // second row = (1 - i) * first row
    CHECK(numerical_rank(M).rank == 1);
    CHECK(numerical_rank(real_embedding(M)).rank == 2);
}

TEST_CASE("numerical rank matches exact rank on constructed matrices") {
    const auto r = props::rank_suite();
    CHECK_MESSAGE(r.ok(), r.first_failure);
    CHECK(r.cases == 100);
}

TEST_CASE("exact nullspace sets one free column to one") {
    std::vector<std::vector<CQ>> rows = {{CQ(1), CQ(2), CQ(0)}, {CQ(0), CQ(0), CQ(1)}};
    const auto ns = exact_nullspace(rows, 3);
    REQUIRE(ns.size() == 1);
    CHECK(ns[0][0] == CQ(-2));
    CHECK(ns[0][1] == CQ(1));
    CHECK(ns[0][2] == CQ(0));
    CHECK(exact_rank(rows, 3) == 2);
}

TEST_CASE("rk4 on y' = y and y' = 0") {
    const Trajectory tr = rk4([](double, const std::vector<double>& y) { return y; }, {1.0}, 0, 1, 0.01);
    CHECK(std::abs(tr.ys.back()[0] - std::exp(1.0)) < 1e-8);
    CHECK(std::abs(tr.eval(0, 0.505) - std::exp(0.505)) < 1e-8);
    const Trajectory c = rk4([](double, const std::vector<double>&) { return std::vector<double>{0.0}; }, {3.5}, 0,
                             2, 0.1);
    for (const auto& y : c.ys) CHECK(y[0] == 3.5);
    CHECK_THROWS_AS(rk4([](double, const std::vector<double>& y) { return std::vector<double>{y[0] * y[0]}; },
                        {1.0}, 0, 2, 0.01),
                    BlowUp);
}

TEST_CASE("rk4 global error order") {
    auto err = [](double h) {
        const Trajectory tr = rk4([](double, const std::vector<double>& y) { return y; }, {1.0}, 0, 1, h);
        return std::abs(tr.ys.back()[0] - std::exp(1.0));
    };
    const double e1 = err(0.1), e2 = err(0.05), e3 = err(0.025);
    const double order = std::log2(e1 / e2), order2 = std::log2(e2 / e3);
    CHECK(order >= 3.9);
    CHECK(order2 >= 3.9);
}

TEST_CASE("finite-difference residual detects the potential") {
    const auto psi = free_gaussian();
    const std::vector<std::pair<double, double>> pts = {{-0.5, 0.2}, {0, 0.5}, {0.7, 1.0}};
    CHECK(fd_schrodinger_residual(psi, [](long double) { return 0.0L; }, pts) < 1e-6);
    CHECK(fd_schrodinger_residual(psi, [](long double x) { return 0.5L * x * x; }, pts) > 0.1);
    const double r1 = fd_schrodinger_residual(psi, [](long double) { return 0.0L; }, pts, 1e-2);
    const double r2 = fd_schrodinger_residual(psi, [](long double) { return 0.0L; }, pts, 5e-3);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
}
