#pragma once

// Physical-layer model of the lossy Gaussian channel: derived variances,
// mutual information I(X;Y), Eve's holevo leakage I(E;Y) from the symplectic
// eigenvalues of the collective-attack covariance matrix, and the reference
// bounds (Devetak-Winter, its supremum over the modulation, repeaterless PLOB).
//
// Units: shot noise has variance 1/2 per quadrature; T is the power
// transmission; xi the excess noise, contributing variance T*xi/2 at the
// receiver. All information quantities are in bits.

namespace advdist {

struct ChannelParams {
    double transmission = 1.0;  // T in (0, 1]
    double excess_noise = 0.0;  // xi >= 0
};

struct ModulationParams {
    double sigma_x2 = 1.0;  // per-quadrature modulation variance, >= 0
};

struct DerivedVariances {
    double sigma_y2 = 0.0;          // T sx2 + 1/2 + T xi / 2
    double sigma_y_given_x2 = 0.0;  // 1/2 + T xi / 2
};

// Symplectic-eigenvalue decomposition behind the leakage value.
struct LeakageDecomposition {
    double V = 0.0;      // 1 + 2 sigma_x2
    double Delta = 0.0;
    double D = 0.0;
    double nu1 = 1.0, nu2 = 1.0, nu3 = 1.0;
    double leakage_bits = 0.0;  // I(Y;E) per symbol
};

// Default excess-noise rule when none is given: xi = 0.01 * sigma_x2
// (phase-noise model; overridable everywhere).
double default_excess_noise(double sigma_x2);

DerivedVariances derived_variances(const ChannelParams& ch, const ModulationParams& mod);

// I(X;Y) = 1/2 log2(1 + T sx2 / sigma_{Y|X}^2), bits per symbol.
double mutual_info_xy(const ChannelParams& ch, const ModulationParams& mod);

// Holevo leakage I(Y;E) = g((nu1-1)/2) + g((nu2-1)/2) - g((nu3-1)/2).
// Throws std::runtime_error if an eigenvalue is non-physical (nu^2 < 1 - 1e-6).
LeakageDecomposition leakage_ey(const ChannelParams& ch, const ModulationParams& mod);

// One-way reverse-reconciliation bound I(X;Y) - I(Y;E); may be negative.
double devetak_winter(const ChannelParams& ch, const ModulationParams& mod);

// Supremum of devetak_winter over sigma_x2 at xi = 0; for T << 1 this
// approaches (T/2) log2 e. Golden-section search over log10 sigma_x2.
double max_dw(double transmission);

// Repeaterless CV bound -log2(1 - T), bits per channel use.
// Returns +infinity at T = 1.
double plob_cv(double transmission);

// f_beta(x) = 2x [beta - x ln(1 + 1/x)]; beta*I - leakage ~ (T/2) log2(e) f_beta(sx2)
// in the small-T regime.
double f_beta(double beta, double x);

// Fiber transmission at 0.22 dB/km: T = 10^(-0.022 d).
double distance_to_transmission(double distance_km);

}  // namespace advdist
