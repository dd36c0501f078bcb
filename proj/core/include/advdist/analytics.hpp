#pragma once

#include <cstdint>
#include <functional>

#include "advdist/channel.hpp"

// Closed-form performance engine: per-m error probabilities pi0/pi1, the
// accept/false-accept/symbol-error rates, chi-square(n) averaging over the
// block energy m, blocklength selection and the secret key ratio.

namespace advdist {

struct SchemeParams {
    std::uint64_t q = 2;   // codebook size, >= 2
    double gamma = 1.0;    // code rate relative to capacity, > 0
    double alpha = 0.0;    // threshold offset per sample
    int n_override = 0;    // pin blocklength when > 0 (else derived)
};

// Rates conditional on a given block energy m.
struct ConditionalRates {
    double pi1 = 0.0;   // true score above threshold
    double pi0 = 0.0;   // a given wrong score below threshold
    double p_ta = 0.0;  // (1-pi1)(1-pi0)^(q-1)
    double p_fa = 0.0;  // (q-1) pi1 pi0 (1-pi0)^(q-2)
    double p_acc = 0.0;
    double ser = 0.0;   // p_fa / p_acc, 0 at degenerate points
    bool degenerate = false;  // p_acc underflowed to zero
};

struct RatePrediction {
    int n = 0;              // blocklength used
    int n_computed = 0;     // blocklength from the rate equation (pre-override)
    double p_ta_av = 0.0;
    double p_fa_av = 0.0;
    double p_acc_av = 0.0;
    double ser_av = 0.0;        // E_m[SER(m)]
    double ser_pooled = 0.0;    // p_fa_av / p_acc_av: error rate of the pooled
                                // accepted stream
    double skr = 0.0;           // bits per channel use, from ser_av
    double skr_guarded = 0.0;   // from max(ser_av, ser_pooled); equals skr in
                                // the operating regime, collapses the corners
                                // where the E_m[SER] model is too optimistic
    double skr_small_t = 0.0;   // small-T closed form, for cross-checking
    double i_xy = 0.0;
    double i_ey = 0.0;
};

// P[true-codeword score above threshold] at block energy m.
// Returns 1 when the threshold is non-positive.
double pi1(double m, std::uint32_t n, double alpha, const ChannelParams& ch,
           const ModulationParams& mod);

// P[a given wrong-codeword score below threshold]; 0 when threshold <= 0.
double pi0(double m, std::uint32_t n, double alpha, const ChannelParams& ch,
           const ModulationParams& mod);

ConditionalRates conditional_rates(double m, const SchemeParams& scheme, std::uint32_t n,
                                   const ChannelParams& ch, const ModulationParams& mod);

// E[f(m)] for m ~ chi-square(n): 512-node Gauss-Legendre on
// [max(0, n - 12 sqrt(2n)), n + 12 sqrt(2n)], renormalized by the captured
// probability mass. Deterministic; relative error ~1e-6 for smooth f.
double average_over_m(const std::function<double(double)>& f, std::uint32_t n);

// n = round(log2(q) / (gamma I(X;Y))), at least 1.
int blocklength(std::uint64_t q, double gamma, const ChannelParams& ch,
                const ModulationParams& mod);

RatePrediction secret_key_ratio(const SchemeParams& scheme, const ChannelParams& ch,
                                const ModulationParams& mod);

// Decoupled-reconciliation rate (1 - p_fail) [beta I(X;Y) - I(Y;E)].
double skr_decoupled_beta(double beta, double p_fail, const ChannelParams& ch,
                          const ModulationParams& mod);

}  // namespace advdist
