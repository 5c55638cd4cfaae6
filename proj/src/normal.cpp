#include "depsel/normal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "depsel/errors.hpp"

namespace depsel {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("inverse_normal_cdf: probability must lie in (0, 1)");

    // Acklam's rational approximation followed by Halley refinement.
    static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                             6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                             3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    for (int iter = 0; iter < 2; ++iter) {
        const double e = normal_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kronrod_nodes{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                              0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                              0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                              0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kronrod_weights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> gauss_weights{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
double gauss_kronrod(F&& f, double lo, double hi, double& error) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (std::size_t k = 0; k < 7; ++k) {
        const double dx = half * kronrod_nodes[k];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[k] * sum;
        if (k % 2 == 1) gauss += gauss_weights[k / 2] * sum;
    }
    error = std::fabs((kronrod - gauss) * half);
    return kronrod * half;
}

template <typename F>
double adaptive(F& f, double lo, double hi, double tolerance, int depth) {
    double error = 0.0;
    const double whole = gauss_kronrod(f, lo, hi, error);
    if (error <= tolerance || depth >= 40) return whole;
    const double mid = 0.5 * (lo + hi);
    return adaptive(f, lo, mid, 0.5 * tolerance, depth + 1) + adaptive(f, mid, hi, 0.5 * tolerance, depth + 1);
}

// Beyond this the normal density is below 1e-40 and contributes nothing.
constexpr double kTail = 13.0;

} // namespace

double bivariate_normal_cdf(double a, double b, double rho) {
    if (std::isnan(a) || std::isnan(b) || std::isnan(rho)) throw ArgumentError("bivariate_normal_cdf: NaN argument");
    rho = std::clamp(rho, -1.0, 1.0);
    if (rho == 0.0) return normal_cdf(a) * normal_cdf(b);
    if (rho == 1.0) return normal_cdf(std::min(a, b));
    if (rho == -1.0) return std::max(0.0, normal_cdf(a) + normal_cdf(b) - 1.0);

    const double upper = std::min(a, kTail);
    if (upper <= -kTail) return 0.0;

    const double scale = std::sqrt((1.0 - rho) * (1.0 + rho));
    auto integrand = [&](double x) { return normal_pdf(x) * normal_cdf((b - rho * x) / scale); };

    // The conditional CDF steps sharply around x = b / rho when |rho| -> 1;
    // splitting there keeps each panel smooth.
    constexpr double tolerance = 1e-9;
    const double knee = b / rho;
    if (knee > -kTail && knee < upper) {
        return adaptive(integrand, -kTail, knee, 0.5 * tolerance, 0) + adaptive(integrand, knee, upper, 0.5 * tolerance, 0);
    }
    return adaptive(integrand, -kTail, upper, tolerance, 0);
}

} // namespace depsel
