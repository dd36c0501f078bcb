#include "advdist/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "advdist/numerics.hpp"
#include "advdist/rng.hpp"
#include "doctest.h"
#include "stat_tests.hpp"

using namespace advdist;

namespace {

TrialConfig small_config() {
    TrialConfig cfg;
    cfg.trials = 2000;
    cfg.master_seed = 12345;
    cfg.scheme = {16, 1.2, -0.4, 8};
    cfg.channel = {1e-3, 1.34};
    cfg.modulation = {134.0};
    cfg.threads = 1;
    return cfg;
}

bool tallies_equal(const TrialTally& a, const TrialTally& b) {
    if (a.trials != b.trials || a.case_counts != b.case_counts ||
        a.accepted.size() != b.accepted.size())
        return false;
    for (std::size_t i = 0; i < a.accepted.size(); ++i) {
        if (a.accepted[i].trial != b.accepted[i].trial ||
            a.accepted[i].u_true != b.accepted[i].u_true ||
            a.accepted[i].u_hat != b.accepted[i].u_hat)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("noiseless channel accepts everything correctly") {
    TrialConfig cfg;
    cfg.trials = 100;
    cfg.master_seed = 7;
    cfg.scheme = {16, 1.0, 2.0, 8};
    cfg.channel = {1.0, 0.0};
    cfg.modulation = {100.0};
    cfg.threads = 1;
    auto tally = run_batch(cfg);
    CHECK(tally.case_counts[0] == 100);
    CHECK(tally.ser_hat() == 0.0);
}

TEST_CASE("hugely negative alpha rejects every trial") {
    auto cfg = small_config();
    cfg.scheme.alpha = -99.0;
    auto tally = run_batch(cfg);
    CHECK(tally.accepts() == 0);
    // every score is above a negative threshold: case 4 only
    CHECK(tally.case_counts[3] == cfg.trials);
}

TEST_CASE("tally is reproducible and thread-count invariant") {
    auto cfg = small_config();
    auto t1 = run_batch(cfg);
    auto t1b = run_batch(cfg);
    CHECK(tallies_equal(t1, t1b));
    for (unsigned workers : {2u, 4u, 7u}) {
        auto cfg2 = cfg;
        cfg2.threads = workers;
        auto t2 = run_batch(cfg2);
        CHECK(tallies_equal(t1, t2));
    }
}

TEST_CASE("tally bookkeeping identities") {
    auto cfg = small_config();
    cfg.trials = 5000;
    auto tally = run_batch(cfg);
    std::uint64_t sum = 0;
    for (auto c : tally.case_counts)
        sum += c;
    CHECK(sum == tally.trials);
    CHECK(tally.case_counts[0] + tally.case_counts[1] == tally.accepted.size());
    if (tally.accepts()) {
        CHECK(tally.ser_hat() ==
              doctest::Approx(double(tally.case_counts[1]) / double(tally.accepts())));
    }
    // accepted symbols are in trial order with consistent indices
    for (std::size_t i = 1; i < tally.accepted.size(); ++i)
        CHECK(tally.accepted[i].trial > tally.accepted[i - 1].trial);
    for (const auto& s : tally.accepted) {
        CHECK(s.u_hat >= 1);
        CHECK(s.u_hat <= cfg.scheme.q);
    }
}

TEST_CASE("fixed-m conditional rates match the analytic values within 3 sigma") {
    TrialConfig cfg;
    cfg.trials = 20000;
    cfg.master_seed = 99;
    cfg.scheme = {64, 1.2, -0.35, 20};
    cfg.channel = {1e-3, 1.34};
    cfg.modulation = {134.0};
    cfg.mode = TrialMode::kFixedM;
    cfg.fixed_m = 20.0;
    cfg.threads = 2;
    auto tally = run_batch(cfg);
    auto analytic = conditional_rates(cfg.fixed_m, cfg.scheme, 20, cfg.channel,
                                      cfg.modulation);
    const double se_ta = std::sqrt(analytic.p_ta * (1 - analytic.p_ta) / cfg.trials);
    const double se_fa = std::sqrt(analytic.p_fa * (1 - analytic.p_fa) / cfg.trials);
    CHECK(std::fabs(tally.p_ta_hat() - analytic.p_ta) < 3.0 * se_ta);
    CHECK(std::fabs(tally.p_fa_hat() - analytic.p_fa) < 3.0 * se_fa);
}

TEST_CASE("true-codeword score samples pass KS against the noncentral law") {
    TrialConfig cfg;
    cfg.master_seed = 4242;
    cfg.scheme = {16, 1.2, -0.4, 16};
    cfg.channel = {1e-3, 1.34};
    cfg.modulation = {134.0};
    cfg.mode = TrialMode::kFixedM;
    cfg.fixed_m = 16.0;
    auto samples = score_samples(cfg, ScoreKind::kTrueCodeword, 4000);
    const double lambda1 =
        noncentralities(cfg.fixed_m, cfg.channel, cfg.modulation).lambda1;
    CHECK(teststat::ks_test_p(samples, [&](double z) {
              return noncentral_chi2_cdf(std::max(z, 0.0), {16.0, lambda1});
          }) > 0.01);
}

TEST_CASE("wrong-codeword score samples pass KS against the noncentral law") {
    TrialConfig cfg;
    cfg.master_seed = 777;
    cfg.scheme = {16, 1.2, -0.4, 16};
    cfg.channel = {1e-3, 1.34};
    cfg.modulation = {134.0};
    cfg.mode = TrialMode::kFixedM;
    cfg.fixed_m = 16.0;
    auto samples = score_samples(cfg, ScoreKind::kWrongCodeword, 4000);
    const double lambda0 =
        noncentralities(cfg.fixed_m, cfg.channel, cfg.modulation).lambda0;
    CHECK(teststat::ks_test_p(samples, [&](double z) {
              return noncentral_chi2_cdf(std::max(z, 0.0), {16.0, lambda0});
          }) > 0.01);
}

TEST_CASE("score samples require a conditional mode") {
    TrialConfig cfg = small_config();
    cfg.mode = TrialMode::kFreeM;
    CHECK_THROWS_AS(score_samples(cfg, ScoreKind::kTrueCodeword, 10), std::domain_error);
}

TEST_CASE("accumulate accepted bits") {
    TrialTally tally;
    tally.trials = 3;
    tally.case_counts[0] = 2;
    tally.case_counts[1] = 1;
    // q = 2: one bit per symbol; u_hat = (1,2,2), u_true = (1,2,1)
    tally.accepted = {{0, 1, 1}, {1, 2, 2}, {2, 1, 2}};
    auto bits = accumulate_accepted(tally, 3, 2);
    CHECK(bits.bits == "011");
    CHECK(bits.bit_errors == 1);
    CHECK(bits.ber == doctest::Approx(1.0 / 3.0));

    // all-correct prefix
    auto two = accumulate_accepted(tally, 2, 2);
    CHECK(two.bit_errors == 0);

    CHECK_THROWS_AS(accumulate_accepted(tally, 4, 2), std::runtime_error);

    // q = 16: four bits per symbol, u_hat = 6 -> "0101" (6-1 = 5)
    TrialTally t2;
    t2.accepted = {{0, 6, 6}};
    auto b2 = accumulate_accepted(t2, 1, 16);
    CHECK(b2.bits == "0101");
    CHECK(b2.bit_errors == 0);
}

TEST_CASE("accumulated bit error rate approximates half the symbol error rate") {
    // a wrong symbol decodes to a random index, i.e. ~50% flipped bits
    TrialConfig cfg;
    cfg.trials = 60000;
    cfg.master_seed = 808;
    cfg.scheme = {64, 1.2, -0.35, 20};
    cfg.channel = {1e-3, 1.34};
    cfg.modulation = {134.0};
    cfg.threads = 2;
    auto tally = run_batch(cfg);
    REQUIRE(tally.accepted.size() >= 10000);
    auto bits = accumulate_accepted(tally, 10000, 64);
    const double ser = tally.ser_hat();
    const double target = ser / 2.0;
    // binomial error on the per-bit estimate, plus the SER estimate's own
    // uncertainty propagated through the factor 1/2
    const double se_bits =
        std::sqrt(target * (1.0 - target) / double(bits.bits.size()));
    const double se_ser = tally.ser_se() / 2.0;
    const double se = std::sqrt(se_bits * se_bits + se_ser * se_ser);
    CHECK(std::fabs(bits.ber - target) < 3.0 * se);
}

TEST_CASE("experimental codebook reuse stays deterministic and differs from fresh tables") {
    auto cfg = small_config();
    cfg.reuse_codebook = true;
    auto a = run_batch(cfg);
    auto b = run_batch(cfg);
    CHECK(tallies_equal(a, b));
    auto cfg_fresh = small_config();
    auto fresh = run_batch(cfg_fresh);
    CHECK_FALSE(tallies_equal(a, fresh));
}

TEST_CASE("decoupling: published coordinates uniform, independent of the index") {
    TrialConfig cfg;
    cfg.master_seed = 31415;
    cfg.scheme = {64, 1.2, -0.4, 16};
    cfg.channel = {1e-3, 1.34};
    cfg.modulation = {134.0};
    auto rep = decoupling_test(cfg, 200000);
    CHECK(rep.samples_per_side >= 200000);
    CHECK(rep.chi2_p_u_a > 0.001);
    CHECK(rep.chi2_p_u_b > 0.001);
    CHECK(rep.ks_two_sample_p > 0.01);
}

TEST_CASE("degenerate all-zero table still yields uniform coordinates") {
    // c = F_Y(y) + 0: uniform by the probability integral transform.
    auto dv = derived_variances({1e-3, 1.34}, {134.0});
    Codebook zero = Codebook::from_matrix(
        {std::vector<double>(16, 0.0), std::vector<double>(16, 0.0)});
    SplitMix64 rng(5);
    const double sigma_y = std::sqrt(dv.sigma_y2);
    std::vector<double> samples;
    for (int r = 0; r < 8000; ++r) {
        std::vector<double> y(16);
        for (auto& v : y)
            v = sigma_y * rng.next_gaussian();
        auto msg = encode(y, zero, 1, dv);
        samples.insert(samples.end(), msg.c.begin(), msg.c.end());
    }
    CHECK(teststat::chi2_uniformity_p(samples, 100) > 0.001);
}

TEST_CASE("tally JSON export is deterministic and parseable") {
    auto cfg = small_config();
    auto tally = run_batch(cfg);
    const std::string a = tally_to_json(tally, cfg);
    const std::string b = tally_to_json(run_batch(cfg), cfg);
    CHECK(a == b);
    CHECK(a.find("\"case_counts\"") != std::string::npos);
    CHECK(a.find("\"p_ta\"") != std::string::npos);
}

TEST_CASE("free-m empirical rates approach the m-averaged analytics") {
    TrialConfig cfg;
    cfg.trials = 20000;
    cfg.master_seed = 2;
    cfg.scheme = {64, 1.2, -0.35, 20};
    cfg.channel = {1e-3, 1.34};
    cfg.modulation = {134.0};
    cfg.threads = 2;
    auto tally = run_batch(cfg);
    auto pred = secret_key_ratio(cfg.scheme, cfg.channel, cfg.modulation);
    // compare at the resolved blocklength
    CHECK(resolve_blocklength(cfg) == 20);
    const double se_ta = std::sqrt(pred.p_ta_av * (1 - pred.p_ta_av) / cfg.trials);
    CHECK(std::fabs(tally.p_ta_hat() - pred.p_ta_av) < 4.0 * se_ta);
}
