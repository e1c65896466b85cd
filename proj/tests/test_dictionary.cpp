#include <doctest.h>

#include <cmath>

#include "sgmidas/dictionary.hpp"
#include "support/oracles.hpp"

using namespace sgmidas;

TEST_CASE("legendre base cases") {
    CHECK(jacobi_eval(0.0, 0.0, 0, 0.0) == 1.0);
    CHECK(jacobi_eval(0.0, 0.0, 0, 0.37) == 1.0);
    CHECK(jacobi_eval(0.0, 0.0, 1, 0.75) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(jacobi_eval(0.0, 0.0, 2, 0.5) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("recurrence matches explicit polynomials on a 1000-point grid") {
    for (int degree = 0; degree <= 5; ++degree) {
        for (int i = 0; i <= 1000; ++i) {
            const double u = i / 1000.0;
            CHECK(jacobi_eval(0.0, 0.0, degree, u) ==
                  doctest::Approx(oracle::shifted_legendre(degree, u)).epsilon(1e-12));
        }
    }
}

TEST_CASE("legendre endpoint identities") {
    for (int degree = 0; degree <= 8; ++degree) {
        CHECK(jacobi_eval(0.0, 0.0, degree, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
        const double expected = degree % 2 == 0 ? 1.0 : -1.0;
        CHECK(jacobi_eval(0.0, 0.0, degree, 0.0) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("continuous orthogonality by quadrature") {
    for (int i = 0; i <= 5; ++i) {
        for (int j = 0; j < i; ++j) {
            const double integral = oracle::simpson(
                [&](double u) { return jacobi_eval(0.0, 0.0, i, u) * jacobi_eval(0.0, 0.0, j, u); });
            CHECK(std::abs(integral) < 1e-10);
        }
    }
}

TEST_CASE("jacobi parameter validation") {
    CHECK_THROWS_AS(jacobi_eval(-1.0, 0.0, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(jacobi_eval(0.0, -1.5, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(jacobi_eval(0.0, 0.0, -1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(jacobi_eval(0.0, 0.0, 1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(DictionarySpec::legendre(0), std::invalid_argument);
}

TEST_CASE("jacobi degree one uses the affine shift") {
    // P1 for parameters (a,b) is ((a+b+2)x + (a-b))/2 at x = 2u-1.
    const double u = 0.3;
    const double x = 2.0 * u - 1.0;
    CHECK(jacobi_eval(1.0, 1.0, 1, u) == doctest::Approx(2.0 * x).epsilon(1e-14));
    CHECK(jacobi_eval(0.5, -0.5, 1, u) == doctest::Approx(x + 0.5).epsilon(1e-14));
}

TEST_CASE("weight matrix shapes and trivial columns") {
    const Eigen::MatrixXd w1 = build_weight_matrix(DictionarySpec::legendre(1), 3);
    REQUIRE(w1.rows() == 3);
    REQUIRE(w1.cols() == 1);
    for (int j = 0; j < 3; ++j) CHECK(w1(j, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const Eigen::MatrixXd w2 = build_weight_matrix(DictionarySpec::legendre(2), 2);
    CHECK(w2(0, 1) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(w2(1, 1) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("weight matrix matches direct evaluation at all entries") {
    const Eigen::MatrixXd W = build_weight_matrix(DictionarySpec::legendre(3), 12);
    REQUIRE(W.rows() == 12);
    REQUIRE(W.cols() == 3);
    for (int j = 0; j < 12; ++j) {
        const double u = j / 12.0;
        for (int l = 0; l < 3; ++l) {
            CHECK(W(j, l) == doctest::Approx(oracle::shifted_legendre(l, u) / 12.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("discrete near-orthogonality: gram of m*W is diagonally dominant") {
    for (int m : {50, 120}) {
        const int L = 5;
        const Eigen::MatrixXd W = build_weight_matrix(DictionarySpec::legendre(L), m);
        const Eigen::MatrixXd G = (m * W).transpose() * (m * W) / m;
        for (int i = 0; i < L; ++i) {
            double off = 0.0;
            for (int j = 0; j < L; ++j) {
                if (j != i) off += std::abs(G(i, j));
            }
            CHECK(std::abs(G(i, i)) > off);
        }
    }
}

TEST_CASE("weight function evaluation") {
    Eigen::VectorXd constant(3);
    constant << 1.0, 0.0, 0.0;
    const auto spec = DictionarySpec::legendre(3);
    for (double u : {0.0, 0.25, 0.9}) {
        CHECK(weight_function_eval(constant, spec, u) == doctest::Approx(1.0).epsilon(1e-14));
    }

    Eigen::VectorXd linear(3);
    linear << 0.0, 1.0, 0.0;
    CHECK(weight_function_eval(linear, spec, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

    Eigen::VectorXd coeffs(3);
    coeffs << 0.5, -0.25, 0.1;
    const double u = 0.3;
    const double direct = 0.5 * oracle::shifted_legendre(0, u) - 0.25 * oracle::shifted_legendre(1, u) +
                          0.1 * oracle::shifted_legendre(2, u);
    CHECK(weight_function_eval(coeffs, spec, u) == doctest::Approx(direct).epsilon(1e-14));

    Eigen::VectorXd wrong(2);
    wrong << 1.0, 1.0;
    CHECK_THROWS_AS(weight_function_eval(wrong, spec, 0.5), std::invalid_argument);
}

TEST_CASE("power family evaluates plain monomials") {
    const auto spec = DictionarySpec::power(4);
    CHECK(dictionary_eval(spec, 0, 0.7) == doctest::Approx(1.0));
    CHECK(dictionary_eval(spec, 2, 0.7) == doctest::Approx(0.49));
    CHECK(dictionary_eval(spec, 3, 0.5) == doctest::Approx(0.125));
}
