#include "advdist/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "advdist/numerics.hpp"

namespace advdist {

namespace {

void validate(const ChannelParams& ch, const ModulationParams& mod) {
    if (!(ch.transmission > 0.0 && ch.transmission <= 1.0))
        throw std::domain_error("channel: transmission must be in (0,1]");
    if (!(ch.excess_noise >= 0.0))
        throw std::domain_error("channel: excess noise must be >= 0");
    if (!(mod.sigma_x2 >= 0.0))
        throw std::domain_error("channel: sigma_x2 must be >= 0");
}

}  // namespace

double default_excess_noise(double sigma_x2) {
    return 0.01 * sigma_x2;
}

DerivedVariances derived_variances(const ChannelParams& ch, const ModulationParams& mod) {
    validate(ch, mod);
    DerivedVariances d;
    d.sigma_y_given_x2 = 0.5 + 0.5 * ch.transmission * ch.excess_noise;
    d.sigma_y2 = ch.transmission * mod.sigma_x2 + d.sigma_y_given_x2;
    return d;
}

double mutual_info_xy(const ChannelParams& ch, const ModulationParams& mod) {
    DerivedVariances d = derived_variances(ch, mod);
    double snr = ch.transmission * mod.sigma_x2 / d.sigma_y_given_x2;
    return 0.5 * std::log2(1.0 + snr);
}

LeakageDecomposition leakage_ey(const ChannelParams& ch, const ModulationParams& mod) {
    DerivedVariances d = derived_variances(ch, mod);
    const double T = ch.transmission;
    const double Vb = 2.0 * d.sigma_y2;

    LeakageDecomposition L;
    L.V = 1.0 + 2.0 * mod.sigma_x2;
    const double V2m1 = L.V * L.V - 1.0;
    L.Delta = L.V * L.V + Vb * Vb - 2.0 * T * V2m1;
    L.D = (L.V * Vb - T * V2m1) * (L.V * Vb - T * V2m1);

    double disc = L.Delta * L.Delta - 4.0 * L.D;
    if (disc < 0.0) {
        if (disc < -1e-9 * L.Delta * L.Delta)
            throw std::runtime_error("leakage_ey: negative discriminant");
        disc = 0.0;
    }
    const double root = std::sqrt(disc);
    const double nu1_sq = (L.Delta + root) / 2.0;
    // nu2 via the product of the roots: (Delta - root)/2 cancels badly when
    // Delta^2 >> 4D.
    double nu_sq[3] = {
        nu1_sq,
        nu1_sq > 0.0 ? L.D / nu1_sq : 0.0,
        L.V * (L.V - T * V2m1 / Vb),
    };
    double nu[3];
    for (int i = 0; i < 3; ++i) {
        // Absorb floating-point noise just below the vacuum limit.
        if (nu_sq[i] < 1.0) {
            if (nu_sq[i] < 1.0 - 1e-6)
                throw std::runtime_error("leakage_ey: non-physical symplectic eigenvalue");
            nu_sq[i] = 1.0;
        }
        nu[i] = std::sqrt(nu_sq[i]);
        if (nu[i] < 1.0) nu[i] = 1.0;
    }
    L.nu1 = nu[0];
    L.nu2 = nu[1];
    L.nu3 = nu[2];
    L.leakage_bits = thermal_entropy_g((L.nu1 - 1.0) / 2.0) +
                     thermal_entropy_g((L.nu2 - 1.0) / 2.0) -
                     thermal_entropy_g((L.nu3 - 1.0) / 2.0);
    if (L.leakage_bits < 0.0 && L.leakage_bits > -1e-12)
        L.leakage_bits = 0.0;
    return L;
}

double devetak_winter(const ChannelParams& ch, const ModulationParams& mod) {
    return mutual_info_xy(ch, mod) - leakage_ey(ch, mod).leakage_bits;
}

double max_dw(double transmission) {
    if (!(transmission > 0.0 && transmission <= 1.0))
        throw std::domain_error("max_dw: transmission must be in (0,1]");
    auto dw = [&](double log10_sx2) {
        ModulationParams mod{std::pow(10.0, log10_sx2)};
        return devetak_winter({transmission, 0.0}, mod);
    };
    // Golden-section over log10 sigma_x2 in [-4, 8]; the objective is
    // unimodal (monotone toward the small-T supremum counts as unimodal).
    const double invphi = 0.6180339887498948482;
    double a = -4.0, b = 8.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = dw(c), fd = dw(d);
    while (b - a > 1e-7 * (1.0 + std::fabs(a) + std::fabs(b))) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = dw(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = dw(d);
        }
    }
    return std::max(dw((a + b) / 2.0), std::max(fc, fd));
}

double plob_cv(double transmission) {
    if (!(transmission > 0.0 && transmission <= 1.0))
        throw std::domain_error("plob_cv: transmission must be in (0,1]");
    if (transmission == 1.0)
        return std::numeric_limits<double>::infinity();
    return -std::log2(1.0 - transmission);
}

double f_beta(double beta, double x) {
    if (!(x > 0.0))
        throw std::domain_error("f_beta: x must be > 0");
    return 2.0 * x * (beta - x * std::log1p(1.0 / x));
}

double distance_to_transmission(double distance_km) {
    if (!(distance_km >= 0.0))
        throw std::domain_error("distance_to_transmission: distance must be >= 0");
    return std::pow(10.0, -0.022 * distance_km);
}

}  // namespace advdist
