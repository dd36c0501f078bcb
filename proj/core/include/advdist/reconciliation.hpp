#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "advdist/channel.hpp"

// Protocol core for one q-ary symbol: codebook generation, the sender-side
// masking of the rank-transformed measurements, the per-candidate quadratic
// scores, the threshold construction and the accept/reject decision, plus
// the five-way outcome classification used by the simulation tallies.

namespace advdist {

// A q x n table of uniform [0,1) entries. Entries are either generated on
// demand from a counter-based hash of (seed, row, column) or taken from an
// explicit matrix (tests, table-reuse experiments).
class Codebook {
public:
    Codebook(std::uint64_t seed, std::uint32_t q, std::uint32_t n);

    static Codebook from_matrix(std::vector<std::vector<double>> entries);

    std::uint32_t rows() const { return q_; }
    std::uint32_t row_length() const { return n_; }
    std::uint64_t seed() const { return seed_; }

    double entry(std::uint32_t row, std::uint32_t i) const {
        if (!matrix_.empty())
            return matrix_[row][i];
        return entry_hash(row_key(row), i);
    }

    // Hoisted per-row key for tight scoring loops.
    std::uint64_t row_key(std::uint32_t row) const;
    static double entry_hash(std::uint64_t row_key, std::uint32_t i);

private:
    Codebook() = default;
    std::uint64_t seed_ = 0;
    std::uint32_t q_ = 0;
    std::uint32_t n_ = 0;
    std::vector<std::vector<double>> matrix_;  // empty => procedural
};

struct EncodedMessage {
    std::vector<double> c;  // each in [0,1)
    std::uint32_t u = 0;    // secret row index, 1-based (sender side only)
};

struct ScoreSet {
    std::vector<double> scores;  // S_1..S_q, all >= 0
};

struct Decision {
    bool accepted = false;
    std::uint32_t index = 0;  // decoded row index (1-based) when accepted
};

// Outcome classes of the decision, given the ground-truth index:
//   1 true accept, 2 false accept, 3 reject with several rivals below
//   threshold, 4 all scores above threshold, 5 true score below threshold
//   but not unique.
enum class OutcomeCase : int {
    kTrueAccept = 1,
    kFalseAccept = 2,
    kRejectMultipleRivals = 3,
    kRejectAllAbove = 4,
    kRejectTrueNotUnique = 5,
};

// m = sigma_x^{-2} sum_i x_i^2; chi-square(n) distributed over the modulation.
double empirical_m(std::span<const double> x, const ModulationParams& mod);

// Centering multiplier k = sigma_Y^2 / (sqrt(T) sigma_X^2) applied to x_i
// inside the score.
double score_centering(const ChannelParams& ch, const ModulationParams& mod);

// c_i = F_Y(y_i) + w_{u,i} mod 1.
EncodedMessage encode(std::span<const double> y, const Codebook& cb, std::uint32_t u,
                      const DerivedVariances& dv);

// S_ell = sum_i [F_Y^inv(c_i - w_{ell,i} mod 1) - k x_i]^2.
double score(std::span<const double> x, const Codebook& cb, std::span<const double> c,
             std::uint32_t ell, const ChannelParams& ch, const ModulationParams& mod);

// All q scores.
ScoreSet score_all(std::span<const double> x, const Codebook& cb, std::span<const double> c,
                   const ChannelParams& ch, const ModulationParams& mod);

// Noncentralities of the true- and wrong-codeword score laws at a given m:
// lambda1 = m sigma_{Y|X}^2 / (T sigma_X^2), lambda0 = m sigma_Y^2 / (T sigma_X^2).
struct Noncentralities {
    double lambda1 = 0.0;
    double lambda0 = 0.0;
};
Noncentralities noncentralities(double m, const ChannelParams& ch, const ModulationParams& mod);

// Decision threshold, anchored at the expected true-codeword score:
// theta = sigma_{Y|X}^2 (n + lambda1(m)) + n * alpha.
// May be <= 0 for very negative alpha, in which case every score exceeds it
// and the decision is a guaranteed reject.
double threshold(double m, std::uint32_t n, double alpha, const ChannelParams& ch,
                 const ModulationParams& mod);

// Accept iff exactly one score is strictly below theta (ties count as above).
Decision decide(const ScoreSet& scores, double theta);

OutcomeCase classify_outcome(const Decision& d, const ScoreSet& scores, double theta,
                             std::uint32_t u_true);

}  // namespace advdist
