#include "depsel/preferences.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>

#include "depsel/errors.hpp"
#include "depsel/kernels/kernels.hpp"
#include "depsel/normal.hpp"
#include "text.hpp"

namespace depsel {

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
    std::set<std::string_view> seen;
    for (const auto& id : ids) {
        if (id.empty()) throw ArgumentError(std::string("empty ") + what + " id");
        if (!seen.insert(id).second) throw ArgumentError(std::string("duplicate ") + what + " id '" + id + "'");
    }
}

bool is_binary_token(std::string_view s) { return s == "0" || s == "1"; }

} // namespace

PreferenceMatrix::PreferenceMatrix(std::vector<std::string> requirement_ids, std::vector<std::string> user_ids,
                                   Matrix<std::uint8_t> cells)
    : requirement_ids_(std::move(requirement_ids)), user_ids_(std::move(user_ids)), cells_(std::move(cells)) {
    if (requirement_ids_.empty()) throw ArgumentError("preference matrix needs at least one requirement");
    if (user_ids_.empty()) throw ArgumentError("preference matrix needs at least one user");
    if (cells_.rows() != requirement_ids_.size() || cells_.cols() != user_ids_.size())
        throw ArgumentError("preference matrix cells do not match the id lists");
    require_unique(requirement_ids_, "requirement");
    require_unique(user_ids_, "user");
    for (std::size_t i = 0; i < cells_.rows(); ++i)
        for (std::size_t t = 0; t < cells_.cols(); ++t)
            if (cells_(i, t) > 1) throw ArgumentError("preference cell is not binary");
}

PackedRows pack_rows(const PreferenceMatrix& m) {
    PackedRows packed;
    packed.rows = m.requirement_count();
    packed.users = m.user_count();
    packed.words = (packed.users + 63) / 64;
    packed.bits.assign(packed.rows * packed.words, 0);
    for (std::size_t i = 0; i < packed.rows; ++i)
        for (std::size_t w = 0; w < packed.words; ++w) {
            const std::size_t begin = w * 64;
            const std::size_t end = std::min(begin + 64, packed.users);
            std::uint64_t word = 0;
            for (std::size_t t = begin; t < end; ++t) word |= std::uint64_t{m.cell(i, t) != 0} << (t - begin);
            packed.bits[i * packed.words + w] = word;
        }
    return packed;
}

PreferenceMatrix load_preference_matrix(std::istream& in) {
    text::LineReader reader(in);
    std::string line;
    std::vector<std::string> requirement_ids;
    std::vector<std::string> user_ids;
    std::vector<std::uint8_t> cells;
    std::size_t width = 0;
    bool first = true;

    while (reader.next(line)) {
        const auto parsed = text::split_csv_cells(line);
        std::vector<std::string> fields;
        for (const auto& c : parsed) fields.push_back(c.text);
        const std::size_t ln = reader.line_number();
        if (fields.size() < 2) throw FormatError("expected a requirement id followed by at least one user column", ln);

        if (first) {
            first = false;
            width = fields.size();
            if (!is_binary_token(fields[1])) {
                user_ids.assign(fields.begin() + 1, fields.end());
                continue;
            }
            for (std::size_t t = 1; t < width; ++t) user_ids.push_back("u" + std::to_string(t));
        }
        if (fields.size() != width)
            throw FormatError("ragged row: expected " + std::to_string(width) + " columns, found " +
                                  std::to_string(fields.size()),
                              ln);
        requirement_ids.push_back(fields[0]);
        for (std::size_t t = 1; t < width; ++t) {
            if (!is_binary_token(fields[t]))
                throw FormatError("non-binary preference value '" + fields[t] + "'", ln, parsed[t].column);
            cells.push_back(fields[t] == "1" ? 1 : 0);
        }
    }
    if (requirement_ids.empty()) throw FormatError("preference matrix has no data rows");

    Matrix<std::uint8_t> grid(requirement_ids.size(), user_ids.size());
    std::copy(cells.begin(), cells.end(), grid.data());
    try {
        return PreferenceMatrix(std::move(requirement_ids), std::move(user_ids), std::move(grid));
    } catch (const ArgumentError& e) {
        throw FormatError(e.what());
    }
}

void write_preference_matrix(std::ostream& out, const PreferenceMatrix& m) {
    out << "req_id";
    for (const auto& u : m.user_ids()) out << ',' << text::quote_csv(u);
    out << '\n';
    std::string row;
    for (std::size_t i = 0; i < m.requirement_count(); ++i) {
        row = text::quote_csv(m.requirement_ids()[i]);
        for (std::size_t t = 0; t < m.user_count(); ++t) {
            row += ',';
            row += m.cell(i, t) ? '1' : '0';
        }
        row += '\n';
        out << row;
    }
}

BinaryStats binary_stats(const PreferenceMatrix& m) {
    const std::size_t n = m.requirement_count();
    const double k = static_cast<double>(m.user_count());
    const PackedRows packed = pack_rows(m);
    const auto& kernel = kernels::active();

    BinaryStats stats;
    stats.requirement_ids = m.requirement_ids();
    stats.means.resize(n);
    std::vector<std::uint64_t> counts(n);
    for (std::size_t i = 0; i < n; ++i) {
        counts[i] = kernel.count(packed.row(i), packed.words);
        stats.means[i] = static_cast<double>(counts[i]) / k;
    }
    stats.covariance = RealMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        stats.covariance(i, i) = stats.means[i] * (1.0 - stats.means[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double joint = static_cast<double>(kernel.and_count(packed.row(i), packed.row(j), packed.words)) / k;
            const double c = joint - stats.means[i] * stats.means[j];
            stats.covariance(i, j) = c;
            stats.covariance(j, i) = c;
        }
    }
    return stats;
}

namespace {

double solve_latent_correlation(double gi, double gj, double target, double tolerance) {
    double lo = -1.0;
    double hi = 1.0;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (bivariate_normal_cdf(gi, gj, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

DichotomizedGaussianModel fit_dichotomized_gaussian(const BinaryStats& stats, const FitOptions& options) {
    const std::size_t n = stats.means.size();
    if (n == 0) throw ArgumentError("fit_dichotomized_gaussian: no requirements");
    if (stats.covariance.rows() != n || stats.covariance.cols() != n)
        throw ArgumentError("fit_dichotomized_gaussian: covariance dimension mismatch");

    auto label = [&](std::size_t i) {
        return i < stats.requirement_ids.size() ? stats.requirement_ids[i] : "#" + std::to_string(i + 1);
    };

    DichotomizedGaussianModel model;
    model.requirement_ids = stats.requirement_ids;
    model.thresholds.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = stats.means[i];
        if (!(p > 0.0 && p < 1.0)) throw DegenerateMarginalError(label(i));
        model.thresholds[i] = inverse_normal_cdf(p);
    }

    Eigen::MatrixXd lambda = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    constexpr double slack = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double pi = stats.means[i];
            const double pj = stats.means[j];
            const double target = pi * pj + stats.covariance(i, j);
            const double lower = std::max(0.0, pi + pj - 1.0);
            const double upper = std::min(pi, pj);
            if (target < lower - slack || target > upper + slack)
                throw InfeasibleCovarianceError("covariance between '" + label(i) + "' and '" + label(j) +
                                                "' implies joint probability " + text::format_double(target) +
                                                " outside [" + text::format_double(lower) + ", " +
                                                text::format_double(upper) + "]");
            const double rho = solve_latent_correlation(model.thresholds[i], model.thresholds[j], target,
                                                        options.bisection_tolerance);
            lambda(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho;
            lambda(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rho;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lambda);
    if (eig.eigenvalues().minCoeff() < 0.0) {
        Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(options.eigenvalue_floor);
        Eigen::MatrixXd repaired = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
        const Eigen::VectorXd inv_sd = repaired.diagonal().cwiseSqrt().cwiseInverse();
        repaired = inv_sd.asDiagonal() * repaired * inv_sd.asDiagonal();
        repaired = 0.5 * (repaired + repaired.transpose());
        repaired.diagonal().setOnes();
        model.psd_repaired = true;
        model.repair_shift = (repaired - lambda).norm();
        lambda = repaired;
    }

    model.latent_correlation = RealMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            model.latent_correlation(i, j) = lambda(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return model;
}

PreferenceMatrix sample_dichotomized_gaussian(const DichotomizedGaussianModel& model, std::size_t count,
                                              std::uint64_t seed, std::size_t shards) {
    const std::size_t n = model.thresholds.size();
    if (n == 0) throw ArgumentError("sample_dichotomized_gaussian: empty model");
    if (count == 0) throw ArgumentError("sample_dichotomized_gaussian: count must be positive");
    if (shards == 0) shards = 1;
    if (model.latent_correlation.rows() != n || model.latent_correlation.cols() != n)
        throw ArgumentError("sample_dichotomized_gaussian: correlation dimension mismatch");

    // Symmetric square root through the eigendecomposition tolerates the
    // floor-level eigenvalues left by the PSD repair.
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd lambda(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            lambda(i, j) = model.latent_correlation(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lambda);
    const Eigen::MatrixXd factor = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    Matrix<std::uint8_t> cells(n, count);
    Eigen::VectorXd noise(dim);
    Eigen::VectorXd latent(dim);
    std::size_t user = 0;
    for (std::size_t s = 0; s < shards; ++s) {
        const std::size_t block = count / shards + (s < count % shards ? 1 : 0);
        std::mt19937_64 rng(seed + s);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t b = 0; b < block; ++b, ++user) {
            for (Eigen::Index i = 0; i < dim; ++i) noise(i) = normal(rng);
            latent.noalias() = factor * noise;
            for (std::size_t i = 0; i < n; ++i)
                cells(i, user) = latent(static_cast<Eigen::Index>(i)) + model.thresholds[i] > 0.0 ? 1 : 0;
        }
    }

    std::vector<std::string> ids = model.requirement_ids;
    if (ids.size() != n) {
        ids.clear();
        for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i + 1));
    }
    std::vector<std::string> users;
    users.reserve(count);
    for (std::size_t t = 0; t < count; ++t) users.push_back("s" + std::to_string(t + 1));
    return PreferenceMatrix(std::move(ids), std::move(users), std::move(cells));
}

ResamplingReport resampling_report(const BinaryStats& original, const BinaryStats& resampled) {
    const std::size_t n = original.means.size();
    if (resampled.means.size() != n || original.covariance.rows() != n || resampled.covariance.rows() != n)
        throw ArgumentError("resampling_report: dimension mismatch");
    ResamplingReport report;
    for (std::size_t i = 0; i < n; ++i) {
        report.max_mean_gap = std::max(report.max_mean_gap, std::fabs(original.means[i] - resampled.means[i]));
        for (std::size_t j = 0; j < n; ++j)
            report.max_covariance_gap = std::max(report.max_covariance_gap,
                                                 std::fabs(original.covariance(i, j) - resampled.covariance(i, j)));
    }
    return report;
}

ResampleOutcome resample(const PreferenceMatrix& source, const ResampleOptions& options) {
    const BinaryStats original = binary_stats(source);
    DichotomizedGaussianModel model = fit_dichotomized_gaussian(original, options.fit);
    std::size_t count = std::max<std::size_t>(1, options.initial_count);
    const std::size_t rounds = std::max<std::size_t>(1, options.max_rounds);
    for (std::size_t round = 1;; ++round, count *= 2) {
        PreferenceMatrix samples = sample_dichotomized_gaussian(model, count, options.seed + round - 1);
        const ResamplingReport report = resampling_report(original, binary_stats(samples));
        const bool converged =
            report.max_mean_gap <= options.tolerance && report.max_covariance_gap <= options.tolerance;
        if (converged || round == rounds)
            return ResampleOutcome{std::move(model), std::move(samples), report, round, converged};
    }
}

} // namespace depsel
