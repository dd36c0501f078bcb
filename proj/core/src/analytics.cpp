#include "advdist/analytics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "advdist/numerics.hpp"
#include "advdist/reconciliation.hpp"

namespace advdist {

namespace {

constexpr int kQuadNodes = 512;

struct QuadRule {
    std::array<double, kQuadNodes> node;    // on (-1, 1)
    std::array<double, kQuadNodes> weight;
};

// Gauss-Legendre nodes/weights by Newton iteration on the Legendre
// polynomial (Numerical Recipes gauleg).
const QuadRule& gauss_legendre() {
    static const QuadRule rule = [] {
        QuadRule r{};
        const int n = kQuadNodes;
        const int m = (n + 1) / 2;
        for (int i = 0; i < m; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                double z1 = z;
                z = z1 - p1 / pp;
                if (std::fabs(z - z1) < 1e-15)
                    break;
            }
            r.node[i] = -z;
            r.node[n - 1 - i] = z;
            r.weight[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            r.weight[n - 1 - i] = r.weight[i];
        }
        return r;
    }();
    return rule;
}

double chi2_log_pdf(double m, double n) {
    return (0.5 * n - 1.0) * std::log(m) - 0.5 * m - std::lgamma(0.5 * n) -
           0.5 * n * M_LN2;
}

double theta_or_negative(double m, std::uint32_t n, double alpha, const ChannelParams& ch,
                         const ModulationParams& mod) {
    return threshold(m, n, alpha, ch, mod);
}

}  // namespace

double pi1(double m, std::uint32_t n, double alpha, const ChannelParams& ch,
           const ModulationParams& mod) {
    const double theta = theta_or_negative(m, n, alpha, ch, mod);
    if (theta <= 0.0)
        return 1.0;
    DerivedVariances dv = derived_variances(ch, mod);
    const double lambda1 = noncentralities(m, ch, mod).lambda1;
    return noncentral_chi2_sf(theta / dv.sigma_y_given_x2, {double(n), lambda1});
}

double pi0(double m, std::uint32_t n, double alpha, const ChannelParams& ch,
           const ModulationParams& mod) {
    const double theta = theta_or_negative(m, n, alpha, ch, mod);
    if (theta <= 0.0)
        return 0.0;
    DerivedVariances dv = derived_variances(ch, mod);
    const double lambda0 = noncentralities(m, ch, mod).lambda0;
    return noncentral_chi2_cdf(theta / dv.sigma_y2, {double(n), lambda0});
}

ConditionalRates conditional_rates(double m, const SchemeParams& scheme, std::uint32_t n,
                                   const ChannelParams& ch, const ModulationParams& mod) {
    if (scheme.q < 2)
        throw std::domain_error("conditional_rates: q must be >= 2");
    ConditionalRates r;
    r.pi1 = pi1(m, n, scheme.alpha, ch, mod);
    r.pi0 = pi0(m, n, scheme.alpha, ch, mod);
    const double q = double(scheme.q);
    // (1-pi0)^(q-1) in log space so q = 2^20 cannot underflow prematurely.
    const double log1m_pi0 = std::log1p(-r.pi0);
    r.p_ta = (1.0 - r.pi1) * std::exp((q - 1.0) * log1m_pi0);
    r.p_fa = (q - 1.0) * r.pi1 * r.pi0 * std::exp((q - 2.0) * log1m_pi0);
    r.p_acc = r.p_ta + r.p_fa;
    if (r.p_acc > 1e-300) {
        r.ser = r.p_fa / r.p_acc;
    } else {
        r.ser = 0.0;
        r.degenerate = true;
    }
    return r;
}

double average_over_m(const std::function<double(double)>& f, std::uint32_t n) {
    if (n < 1)
        throw std::domain_error("average_over_m: n must be >= 1");
    const double nn = double(n);
    const double half_width = 12.0 * std::sqrt(2.0 * nn);
    const double lo = std::max(0.0, nn - half_width);
    const double hi = nn + half_width;
    const QuadRule& rule = gauss_legendre();
    double integral = 0.0, mass = 0.0;
    for (int i = 0; i < kQuadNodes; ++i) {
        const double m = 0.5 * (hi - lo) * rule.node[i] + 0.5 * (hi + lo);
        if (m <= 0.0)
            continue;
        const double w = 0.5 * (hi - lo) * rule.weight[i] * std::exp(chi2_log_pdf(m, nn));
        mass += w;
        integral += w * f(m);
    }
    return integral / mass;
}

int blocklength(std::uint64_t q, double gamma, const ChannelParams& ch,
                const ModulationParams& mod) {
    if (q < 2)
        throw std::domain_error("blocklength: q must be >= 2");
    const double ixy = mutual_info_xy(ch, mod);
    if (!(gamma > 0.0) || !(gamma * ixy > 0.0))
        throw std::domain_error("blocklength: gamma * I(X;Y) must be > 0");
    const double n = std::log2(double(q)) / (gamma * ixy);
    if (!(n < 1e9))
        throw std::domain_error("blocklength: rate equation gives an unusable n");
    return std::max(1, int(std::lround(n)));
}

RatePrediction secret_key_ratio(const SchemeParams& scheme, const ChannelParams& ch,
                                const ModulationParams& mod) {
    RatePrediction out;
    out.n_computed = blocklength(scheme.q, scheme.gamma, ch, mod);
    out.n = scheme.n_override > 0 ? scheme.n_override : out.n_computed;
    const std::uint32_t n = std::uint32_t(out.n);

    // Single quadrature pass; the noncentral chi-square evaluations dominate.
    {
        const double nn = double(n);
        const double half_width = 12.0 * std::sqrt(2.0 * nn);
        const double lo = std::max(0.0, nn - half_width);
        const double hi = nn + half_width;
        const QuadRule& rule = gauss_legendre();
        double mass = 0.0, ta = 0.0, fa = 0.0, ser = 0.0;
        for (int i = 0; i < kQuadNodes; ++i) {
            const double m = 0.5 * (hi - lo) * rule.node[i] + 0.5 * (hi + lo);
            if (m <= 0.0)
                continue;
            const double w =
                0.5 * (hi - lo) * rule.weight[i] * std::exp(chi2_log_pdf(m, nn));
            ConditionalRates r = conditional_rates(m, scheme, n, ch, mod);
            mass += w;
            ta += w * r.p_ta;
            fa += w * r.p_fa;
            ser += w * r.ser;
        }
        out.p_ta_av = ta / mass;
        out.p_fa_av = fa / mass;
        out.ser_av = ser / mass;
        out.p_acc_av = out.p_ta_av + out.p_fa_av;
    }

    out.ser_pooled =
        out.p_acc_av > 1e-300 ? out.p_fa_av / out.p_acc_av : 0.0;

    out.i_xy = mutual_info_xy(ch, mod);
    out.i_ey = leakage_ey(ch, mod).leakage_bits;
    const double code_factor = scheme.gamma * (1.0 - binary_entropy(out.ser_av / 2.0));
    out.skr = out.p_acc_av * (code_factor * out.i_xy - out.i_ey);
    const double ser_eff = std::max(out.ser_av, std::min(out.ser_pooled, 1.0));
    out.skr_guarded = out.p_acc_av *
                      (scheme.gamma * (1.0 - binary_entropy(ser_eff / 2.0)) * out.i_xy -
                       out.i_ey);

    // Small-T closed form of the same bracket.
    const double log2e = 1.4426950408889634074;
    out.skr_small_t =
        out.p_acc_av * ch.transmission * log2e * mod.sigma_x2 *
        (code_factor - mod.sigma_x2 * std::log1p(1.0 / mod.sigma_x2));
    return out;
}

double skr_decoupled_beta(double beta, double p_fail, const ChannelParams& ch,
                          const ModulationParams& mod) {
    if (!(p_fail >= 0.0 && p_fail <= 1.0))
        throw std::domain_error("skr_decoupled_beta: p_fail must be in [0,1]");
    return (1.0 - p_fail) *
           (beta * mutual_info_xy(ch, mod) - leakage_ey(ch, mod).leakage_bits);
}

}  // namespace advdist
