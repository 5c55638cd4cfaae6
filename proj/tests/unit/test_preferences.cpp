#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "depsel/errors.hpp"
#include "depsel/preferences.hpp"

using namespace depsel;

namespace {

PreferenceMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t k, double density = 0.5) {
    std::bernoulli_distribution b(density);
    Matrix<std::uint8_t> cells(n, k);
    std::vector<std::string> ids, users;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i + 1));
    for (std::size_t t = 0; t < k; ++t) users.push_back("u" + std::to_string(t + 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) cells(i, t) = b(rng) ? 1 : 0;
    return PreferenceMatrix(ids, users, cells);
}

PreferenceMatrix parse(const std::string& text) {
    std::istringstream in(text);
    return load_preference_matrix(in);
}

// Four requirements driven by one shared latent factor.
PreferenceMatrix correlated_source(std::size_t users, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix<std::uint8_t> cells(4, users);
    for (std::size_t t = 0; t < users; ++t) {
        const double common = z(rng);
        const double a = z(rng), b = z(rng), c = z(rng), d = z(rng);
        cells(0, t) = 0.8 * common + 0.6 * a > -0.3 ? 1 : 0;
        cells(1, t) = 0.7 * common + 0.7 * b > 0.2 ? 1 : 0;
        cells(2, t) = -0.5 * common + 0.86 * c > 0.0 ? 1 : 0;
        cells(3, t) = d > 0.5 ? 1 : 0;
    }
    std::vector<std::string> users_ids;
    for (std::size_t t = 0; t < users; ++t) users_ids.push_back("u" + std::to_string(t + 1));
    return PreferenceMatrix({"r1", "r2", "r3", "r4"}, users_ids, cells);
}

} // namespace

TEST_SUITE("preferences") {

TEST_CASE("load a 4 x 20 matrix without a header") {
    std::string text;
    for (int i = 1; i <= 4; ++i) {
        text += "r" + std::to_string(i);
        for (int t = 0; t < 20; ++t) text += (t + i) % 3 == 0 ? ",1" : ",0";
        text += "\n";
    }
    const auto m = parse(text);
    CHECK(m.requirement_count() == 4);
    CHECK(m.user_count() == 20);
    CHECK(m.user_ids().front() == "u1");
    CHECK(m.cell(0, 2) == 1);
}

TEST_CASE("load with header, comments and a minimal matrix") {
    const auto m = parse("# comment\nreq_id,alice,bob\n\nr1,1,0\nr2,0,1\n");
    CHECK(m.user_ids() == std::vector<std::string>{"alice", "bob"});
    CHECK(m.cell(1, 1) == 1);
    const auto one = parse("r1,1\n");
    CHECK(one.requirement_count() == 1);
    CHECK(one.user_count() == 1);
}

TEST_CASE("format errors carry line and column") {
    try {
        parse("r1,1,0\nr2,0,2\n");
        FAIL("expected a format error");
    } catch (const FormatError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 6);
    }
    CHECK_THROWS_AS(parse("r1,1,0\nr2,0\n"), FormatError);
    CHECK_THROWS_AS(parse("r1,1\nr1,0\n"), FormatError);
    CHECK_THROWS_AS(parse(""), FormatError);
}

TEST_CASE("write and reload round-trips") {
    std::mt19937_64 rng(3);
    const auto m = random_matrix(rng, 3, 9);
    std::ostringstream out;
    write_preference_matrix(out, m);
    CHECK(parse(out.str()) == m);
}

TEST_CASE("binary stats: constant and identical rows") {
    const auto m = parse("r1,1,1,1,1\nr2,1,0,1,0\nr3,1,0,1,0\n");
    const auto s = binary_stats(m);
    CHECK(s.means[0] == 1.0);
    CHECK(s.covariance(0, 0) == 0.0);
    CHECK(s.covariance(1, 2) == doctest::Approx(0.25));
}

TEST_CASE("binary stats match a two-pass covariance oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto m = random_matrix(rng, 5, 100 + trial * 37, 0.3 + 0.1 * trial);
        const auto s = binary_stats(m);
        const std::size_t n = m.requirement_count();
        const double k = static_cast<double>(m.user_count());
        std::vector<double> mean(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < m.user_count(); ++t) mean[i] += m.cell(i, t);
            mean[i] /= k;
        }
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(s.means[i] == doctest::Approx(mean[i]).epsilon(1e-12));
            CHECK(s.covariance(i, i) == doctest::Approx(mean[i] * (1.0 - mean[i])).epsilon(1e-12));
            for (std::size_t j = 0; j < n; ++j) {
                double c = 0.0;
                for (std::size_t t = 0; t < m.user_count(); ++t) c += (m.cell(i, t) - mean[i]) * (m.cell(j, t) - mean[j]);
                CHECK(std::fabs(s.covariance(i, j) - c / k) < 1e-12);
                CHECK(s.covariance(i, j) == s.covariance(j, i));
                CHECK(std::fabs(s.covariance(i, j)) <= 0.25);
            }
        }
    }
}

TEST_CASE("fit: independence gives zero thresholds and identity correlation") {
    BinaryStats s{{"r1", "r2", "r3"}, {0.5, 0.5, 0.5}, RealMatrix(3, 3)};
    for (std::size_t i = 0; i < 3; ++i) s.covariance(i, i) = 0.25;
    const auto model = fit_dichotomized_gaussian(s);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::fabs(model.thresholds[i]) < 1e-12);
        for (std::size_t j = 0; j < 3; ++j) CHECK(model.latent_correlation(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
    }
    CHECK_FALSE(model.psd_repaired);
}

TEST_CASE("fit: single requirement threshold") {
    BinaryStats s{{"r1"}, {0.8413}, RealMatrix(1, 1)};
    s.covariance(0, 0) = 0.8413 * (1 - 0.8413);
    CHECK(fit_dichotomized_gaussian(s).thresholds[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("fit: degenerate marginals and Frechet violations") {
    BinaryStats s{{"r1", "r2"}, {1.0, 0.5}, RealMatrix(2, 2)};
    try {
        fit_dichotomized_gaussian(s);
        FAIL("expected a degenerate-marginal error");
    } catch (const DegenerateMarginalError& e) {
        CHECK(e.requirement() == "r1");
    }
    BinaryStats t{{"r1", "r2"}, {0.2, 0.5}, RealMatrix(2, 2)};
    t.covariance(0, 1) = t.covariance(1, 0) = 0.2; // joint 0.3 > min(0.2, 0.5)
    CHECK_THROWS_AS(fit_dichotomized_gaussian(t), InfeasibleCovarianceError);
}

TEST_CASE("fit: Monte Carlo reproduces a target covariance") {
    BinaryStats s{{"r1", "r2"}, {0.5, 0.5}, RealMatrix(2, 2)};
    s.covariance(0, 0) = s.covariance(1, 1) = 0.25;
    s.covariance(0, 1) = s.covariance(1, 0) = 0.15;
    const auto model = fit_dichotomized_gaussian(s);
    // closed form for zero thresholds: p11 = 1/4 + asin(rho)/(2 pi)
    CHECK(0.25 + std::asin(model.latent_correlation(0, 1)) / (2.0 * M_PI) == doctest::Approx(0.4).epsilon(1e-5));
    const auto sample = sample_dichotomized_gaussian(model, 1000000, 5);
    CHECK(std::fabs(binary_stats(sample).covariance(0, 1) - 0.15) < 0.003);
}

TEST_CASE("sample: saturated thresholds and determinism") {
    DichotomizedGaussianModel model{{"r1", "r2"}, {6.0, 6.0}, RealMatrix(2, 2)};
    model.latent_correlation(0, 0) = model.latent_correlation(1, 1) = 1.0;
    const auto all = sample_dichotomized_gaussian(model, 1000, 1);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t t = 0; t < 1000; ++t) CHECK(all.cell(i, t) == 1);

    const auto source = correlated_source(200, 17);
    const auto fitted = fit_dichotomized_gaussian(binary_stats(source));
    CHECK(sample_dichotomized_gaussian(fitted, 5000, 99) == sample_dichotomized_gaussian(fitted, 5000, 99));
    CHECK(sample_dichotomized_gaussian(fitted, 5000, 99, 4) == sample_dichotomized_gaussian(fitted, 5000, 99, 4));
    CHECK_FALSE(sample_dichotomized_gaussian(fitted, 5000, 99) == sample_dichotomized_gaussian(fitted, 5000, 100));
}

TEST_CASE("fitted correlation is a valid correlation matrix") {
    const auto source = correlated_source(200, 23);
    const auto model = fit_dichotomized_gaussian(binary_stats(source));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(model.latent_correlation(i, i) == doctest::Approx(1.0));
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(model.latent_correlation(i, j) == model.latent_correlation(j, i));
            if (i != j) CHECK(std::fabs(model.latent_correlation(i, j)) < 1.0);
        }
    }
}

TEST_CASE("resampling report") {
    BinaryStats a{{"r1", "r2"}, {0.5, 0.4}, RealMatrix(2, 2)};
    BinaryStats b = a;
    CHECK(resampling_report(a, b).max_mean_gap == 0.0);
    CHECK(resampling_report(a, b).max_covariance_gap == 0.0);
    b.means[1] = 0.45;
    CHECK(resampling_report(a, b).max_mean_gap == doctest::Approx(0.05));
    BinaryStats c{{"r1"}, {0.5}, RealMatrix(1, 1)};
    CHECK_THROWS_AS(resampling_report(a, c), ArgumentError);
}

TEST_CASE("resample of a resample: larger samples shrink the gaps") {
    const auto source = correlated_source(400, 31);
    const auto model = fit_dichotomized_gaussian(binary_stats(source));
    const auto target = binary_stats(source);
    double small = 0.0, large = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        small += resampling_report(target, binary_stats(sample_dichotomized_gaussian(model, 1000, seed))).max_covariance_gap;
        large += resampling_report(target, binary_stats(sample_dichotomized_gaussian(model, 100000, seed))).max_covariance_gap;
    }
    CHECK(large < small);
}

TEST_CASE("resample loop converges with doubling counts") {
    const auto source = correlated_source(200, 41);
    ResampleOptions opts;
    opts.seed = 8;
    opts.tolerance = 0.02;
    const auto outcome = resample(source, opts);
    CHECK(outcome.converged);
    CHECK(outcome.report.max_mean_gap < 0.02);
    CHECK(outcome.report.max_covariance_gap < 0.02);
    CHECK(outcome.samples.requirement_ids() == source.requirement_ids());
}

}
