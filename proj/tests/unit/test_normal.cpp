#include <doctest.h>

#include <cmath>

#include "depsel/errors.hpp"
#include "depsel/normal.hpp"
#include "oracles.hpp"

using namespace depsel;

TEST_SUITE("normal") {

TEST_CASE("univariate reference values") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-13));
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
}

TEST_CASE("inverse CDF round-trips") {
    for (double p : {1e-12, 1e-6, 0.001, 0.025, 0.3, 0.5, 0.77, 0.975, 0.999999}) {
        CAPTURE(p);
        CHECK(normal_cdf(inverse_normal_cdf(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), ArgumentError);
    CHECK_THROWS_AS(inverse_normal_cdf(1.0), ArgumentError);
}

TEST_CASE("bivariate CDF closed forms") {
    CHECK(bivariate_normal_cdf(0.0, 0.0, 0.0) == doctest::Approx(0.25));
    // orthant probability 1/4 + asin(rho) / (2 pi)
    for (double rho : {-0.9, -0.5, 0.3, 0.8}) {
        CAPTURE(rho);
        CHECK(bivariate_normal_cdf(0.0, 0.0, rho) == doctest::Approx(0.25 + std::asin(rho) / (2.0 * M_PI)).epsilon(1e-9));
    }
    CHECK(bivariate_normal_cdf(0.4, -0.2, 1.0) == doctest::Approx(normal_cdf(-0.2)));
    CHECK(bivariate_normal_cdf(0.4, -0.2, -1.0) == doctest::Approx(std::max(0.0, normal_cdf(0.4) + normal_cdf(-0.2) - 1.0)));
}

TEST_CASE("bivariate CDF matches the Plackett integral") {
    for (double a : {-2.5, -0.7, 0.0, 1.1, 2.9})
        for (double b : {-1.8, 0.2, 1.5})
            for (double rho : {-0.95, -0.4, 0.1, 0.6, 0.97}) {
                CAPTURE(a);
                CAPTURE(b);
                CAPTURE(rho);
                CHECK(std::fabs(bivariate_normal_cdf(a, b, rho) - oracle::bivariate_cdf(a, b, rho)) < 1e-7);
            }
}

TEST_CASE("bivariate CDF is symmetric and monotone in rho") {
    double last = -1.0;
    for (int k = -9; k <= 9; ++k) {
        const double rho = k / 10.0;
        const double v = bivariate_normal_cdf(0.3, -0.6, rho);
        CHECK(v == doctest::Approx(bivariate_normal_cdf(-0.6, 0.3, rho)).epsilon(1e-10));
        CHECK(v >= last - 1e-12);
        last = v;
    }
}

}
