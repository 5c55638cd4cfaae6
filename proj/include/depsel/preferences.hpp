#pragma once
// Binary user-preference matrices: ingestion, summary statistics and
// resampling through a dichotomized Gaussian (latent multivariate normal
// thresholded at zero).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "depsel/matrix.hpp"

namespace depsel {

// Rows are requirements, columns are users. cell(i, t) == 1 when user t
// selected requirement i.
class PreferenceMatrix {
public:
    // Validates shape, binary cells and id uniqueness; throws ArgumentError.
    PreferenceMatrix(std::vector<std::string> requirement_ids, std::vector<std::string> user_ids,
                     Matrix<std::uint8_t> cells);

    std::size_t requirement_count() const noexcept { return requirement_ids_.size(); }
    std::size_t user_count() const noexcept { return user_ids_.size(); }

    const std::vector<std::string>& requirement_ids() const noexcept { return requirement_ids_; }
    const std::vector<std::string>& user_ids() const noexcept { return user_ids_; }
    const Matrix<std::uint8_t>& cells() const noexcept { return cells_; }
    std::uint8_t cell(std::size_t requirement, std::size_t user) const { return cells_(requirement, user); }

    friend bool operator==(const PreferenceMatrix&, const PreferenceMatrix&) = default;

private:
    std::vector<std::string> requirement_ids_;
    std::vector<std::string> user_ids_;
    Matrix<std::uint8_t> cells_;
};

// Each requirement row packed into 64-bit words, bit t = user t.
struct PackedRows {
    std::size_t rows = 0;
    std::size_t users = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;

    const std::uint64_t* row(std::size_t r) const { return bits.data() + r * words; }
};

PackedRows pack_rows(const PreferenceMatrix& m);

struct BinaryStats {
    std::vector<std::string> requirement_ids;
    std::vector<double> means;
    RealMatrix covariance; // population covariance, divisor = user count
};

struct DichotomizedGaussianModel {
    std::vector<std::string> requirement_ids;
    std::vector<double> thresholds;  // latent means; P(z_i > 0) = Phi(threshold_i)
    RealMatrix latent_correlation;   // unit diagonal, positive semi-definite
    bool psd_repaired = false;
    double repair_shift = 0.0;       // Frobenius norm of the change made by the repair
};

struct FitOptions {
    double bisection_tolerance = 1e-6;
    double eigenvalue_floor = 1e-9;
};

struct ResamplingReport {
    double max_mean_gap = 0.0;
    double max_covariance_gap = 0.0;
};

// CSV: `req_id,u1,u2,...`. An optional header row of user ids is recognised
// when its first data cell is not 0/1. Blank lines and lines starting with
// '#' are skipped. Throws FormatError with 1-based line/column.
PreferenceMatrix load_preference_matrix(std::istream& in);
void write_preference_matrix(std::ostream& out, const PreferenceMatrix& m);

BinaryStats binary_stats(const PreferenceMatrix& m);

// Throws DegenerateMarginalError for a mean of 0 or 1 and
// InfeasibleCovarianceError when a pairwise joint probability is outside
// its Frechet bounds.
DichotomizedGaussianModel fit_dichotomized_gaussian(const BinaryStats& stats, const FitOptions& options = {});

// Draws `count` users. Work is split into `shards` contiguous blocks; block s
// uses seed + s, so output depends only on (model, count, seed, shards).
PreferenceMatrix sample_dichotomized_gaussian(const DichotomizedGaussianModel& model, std::size_t count,
                                              std::uint64_t seed, std::size_t shards = 1);

ResamplingReport resampling_report(const BinaryStats& original, const BinaryStats& resampled);

// Fit once, then sample with a doubling count until both gaps fall below
// `tolerance` or `max_rounds` is reached.
struct ResampleOutcome {
    DichotomizedGaussianModel model;
    PreferenceMatrix samples;
    ResamplingReport report;
    std::size_t rounds = 0;
    bool converged = false;
};

struct ResampleOptions {
    std::size_t initial_count = 1000;
    std::size_t max_rounds = 8;
    double tolerance = 0.02;
    std::uint64_t seed = 0;
    FitOptions fit{};
};

ResampleOutcome resample(const PreferenceMatrix& source, const ResampleOptions& options);

} // namespace depsel
