#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "advdist/analytics.hpp"
#include "advdist/channel.hpp"
#include "advdist/reconciliation.hpp"

// Empirical verification harness: full protocol trials (sender, channel,
// receiver-side decoding), outcome tallies, conditional score sampling for
// distribution tests, and accumulation of accepted symbols into a bit string.

namespace advdist {

enum class TrialMode { kFreeM, kFixedM, kFixedX };

struct TrialConfig {
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
    SchemeParams scheme;
    ChannelParams channel;
    ModulationParams modulation;
    TrialMode mode = TrialMode::kFreeM;
    double fixed_m = 0.0;             // used when mode == kFixedM
    std::vector<double> fixed_x;      // used when mode == kFixedX
    unsigned threads = 0;             // 0 = hardware concurrency
    bool reuse_codebook = false;      // experimental: one table for all trials
};

struct TrialResult {
    Decision decision;
    OutcomeCase outcome;
    std::uint32_t u_true = 0;
    std::uint32_t u_hat = 0;  // 0 unless accepted
};

struct AcceptedSymbol {
    std::uint64_t trial = 0;
    std::uint32_t u_true = 0;
    std::uint32_t u_hat = 0;
};

struct TrialTally {
    std::uint64_t trials = 0;
    std::array<std::uint64_t, 5> case_counts{};  // outcome cases 1..5
    std::vector<AcceptedSymbol> accepted;        // ordered by trial index

    std::uint64_t accepts() const { return case_counts[0] + case_counts[1]; }
    double p_ta_hat() const { return trials ? double(case_counts[0]) / trials : 0.0; }
    double p_fa_hat() const { return trials ? double(case_counts[1]) / trials : 0.0; }
    double p_acc_hat() const { return trials ? double(accepts()) / trials : 0.0; }
    double ser_hat() const {
        return accepts() ? double(case_counts[1]) / accepts() : 0.0;
    }
    // Binomial standard errors at the empirical rates.
    double p_ta_se() const;
    double p_fa_se() const;
    double ser_se() const;
};

// Blocklength resolved from the scheme (override or rate equation).
std::uint32_t resolve_blocklength(const TrialConfig& config);

// One full protocol round. The per-trial seed drives both the noise and the
// fresh codebook.
TrialResult run_trial(std::uint64_t trial_seed, const TrialConfig& config, std::uint32_t n);

// All trials; per-trial seeds derive from (master_seed, index) so the tally
// is independent of execution order and worker count.
TrialTally run_batch(const TrialConfig& config);

// Deterministic JSON export of a tally (includes a config echo).
std::string tally_to_json(const TrialTally& tally, const TrialConfig& config);

// Normalized conditional score samples for the distribution tests:
// true-codeword scores S_u / sigma_{Y|X}^2 over fresh (Y, W), or
// wrong-codeword scores S_ell / sigma_Y^2 (fixed y, u; fresh tables).
// Requires fixed-m or fixed-x mode so the noncentralities are fixed.
enum class ScoreKind { kTrueCodeword, kWrongCodeword };
std::vector<double> score_samples(const TrialConfig& config, ScoreKind which,
                                  std::uint64_t samples);

// Concatenated binary representation of the first N accepted symbols.
struct AcceptedBits {
    std::string bits;          // '0'/'1', length N*log2(q)
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
};
// Throws std::runtime_error (message carries the available count) if the
// tally holds fewer than N accepted symbols.
AcceptedBits accumulate_accepted(const TrialTally& tally, std::uint64_t N,
                                 std::uint64_t q);

// Statistical decoupling report: uniformity of the published c-coordinates
// and a two-sample comparison across two fixed secret indices.
struct DecouplingReport {
    double chi2_p_u_a = 0.0;       // uniformity p-value, samples with u = a
    double chi2_p_u_b = 0.0;       // uniformity p-value, samples with u = b
    double ks_two_sample_p = 0.0;  // c | u=a  vs  c | u=b
    std::uint64_t samples_per_side = 0;
};
DecouplingReport decoupling_test(const TrialConfig& config, std::uint64_t samples);

}  // namespace advdist
