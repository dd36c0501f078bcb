#include "advdist/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "advdist/numerics.hpp"
#include "advdist/rng.hpp"

namespace advdist {

namespace {

constexpr std::uint64_t kCodebookTag = 0xA5C0DEB00CULL;

double binom_se(double p, double n) {
    if (n <= 0.0) return 0.0;
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
}

// Draws the sender block for a trial: x with the configured energy profile,
// y through the channel.
void draw_block(SplitMix64& rng, const TrialConfig& cfg, std::uint32_t n,
                std::vector<double>& x, std::vector<double>& y) {
    const double sigma_x = std::sqrt(cfg.modulation.sigma_x2);
    const double root_t = std::sqrt(cfg.channel.transmission);
    DerivedVariances dv = derived_variances(cfg.channel, cfg.modulation);
    const double sigma_noise = std::sqrt(dv.sigma_y_given_x2);

    x.resize(n);
    y.resize(n);
    switch (cfg.mode) {
        case TrialMode::kFreeM:
            for (std::uint32_t i = 0; i < n; ++i)
                x[i] = sigma_x * rng.next_gaussian();
            break;
        case TrialMode::kFixedM: {
            // Gaussian direction rescaled to the exact energy: uniform on the
            // sphere of radius sigma_x sqrt(m), the conditional law given m.
            double ss = 0.0;
            for (std::uint32_t i = 0; i < n; ++i) {
                x[i] = rng.next_gaussian();
                ss += x[i] * x[i];
            }
            const double scale =
                sigma_x * std::sqrt(cfg.fixed_m / std::max(ss, 1e-300));
            for (std::uint32_t i = 0; i < n; ++i)
                x[i] *= scale;
            break;
        }
        case TrialMode::kFixedX:
            if (cfg.fixed_x.size() != n)
                throw std::domain_error("run_trial: fixed_x length != n");
            x = cfg.fixed_x;
            break;
    }
    for (std::uint32_t i = 0; i < n; ++i)
        y[i] = root_t * x[i] + sigma_noise * rng.next_gaussian();
}

// One-sample/two-sample Kolmogorov asymptotic tail
// Q(t) = 2 sum_j (-1)^(j-1) exp(-2 j^2 t^2).
double kolmogorov_q(double t) {
    if (t <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * std::exp(-2.0 * double(j) * double(j) * t * t);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::min(std::max(sum, 0.0), 1.0);
}

double chi2_uniformity_p(const std::vector<std::uint64_t>& bin_counts,
                         std::uint64_t total) {
    const double k = double(bin_counts.size());
    const double expected = double(total) / k;
    double stat = 0.0;
    for (std::uint64_t c : bin_counts) {
        const double d = double(c) - expected;
        stat += d * d / expected;
    }
    return regularized_gamma_q((k - 1.0) / 2.0, stat / 2.0);
}

double two_sample_ks_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::fabs(double(i) / na - double(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

}  // namespace

double TrialTally::p_ta_se() const { return binom_se(p_ta_hat(), double(trials)); }
double TrialTally::p_fa_se() const { return binom_se(p_fa_hat(), double(trials)); }
double TrialTally::ser_se() const { return binom_se(ser_hat(), double(accepts())); }

std::uint32_t resolve_blocklength(const TrialConfig& config) {
    if (config.scheme.n_override > 0)
        return std::uint32_t(config.scheme.n_override);
    return std::uint32_t(
        blocklength(config.scheme.q, config.scheme.gamma, config.channel, config.modulation));
}

TrialResult run_trial(std::uint64_t trial_seed, const TrialConfig& config, std::uint32_t n) {
    SplitMix64 rng(trial_seed);
    std::vector<double> x, y;
    draw_block(rng, config, n, x, y);

    const std::uint64_t cb_seed =
        config.reuse_codebook ? mix64(config.master_seed ^ kCodebookTag)
                              : mix64(trial_seed ^ kCodebookTag);
    Codebook cb(cb_seed, std::uint32_t(config.scheme.q), n);

    const std::uint32_t u =
        std::uint32_t(rng.next_below(config.scheme.q)) + 1;
    DerivedVariances dv = derived_variances(config.channel, config.modulation);
    EncodedMessage msg = encode(y, cb, u, dv);

    ScoreSet scores = score_all(x, cb, msg.c, config.channel, config.modulation);
    const double m = empirical_m(x, config.modulation);
    const double theta = threshold(m, n, config.scheme.alpha, config.channel,
                                   config.modulation);
    TrialResult res;
    res.decision = decide(scores, theta);
    res.outcome = classify_outcome(res.decision, scores, theta, u);
    res.u_true = u;
    res.u_hat = res.decision.accepted ? res.decision.index : 0;
    return res;
}

TrialTally run_batch(const TrialConfig& config) {
    if (config.trials < 1)
        throw std::domain_error("run_batch: trials must be >= 1");
    const std::uint32_t n = resolve_blocklength(config);

    unsigned workers = config.threads ? config.threads
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = unsigned(std::min<std::uint64_t>(workers, config.trials));

    std::vector<TrialTally> partial(workers);
    auto work = [&](unsigned w) {
        TrialTally& t = partial[w];
        const std::uint64_t begin = config.trials * w / workers;
        const std::uint64_t end = config.trials * (w + 1) / workers;
        for (std::uint64_t i = begin; i < end; ++i) {
            TrialResult r = run_trial(derive_seed(config.master_seed, i), config, n);
            ++t.trials;
            ++t.case_counts[std::size_t(int(r.outcome) - 1)];
            if (r.decision.accepted)
                t.accepted.push_back({i, r.u_true, r.u_hat});
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& th : pool)
            th.join();
    }

    TrialTally total;
    for (const auto& t : partial) {
        total.trials += t.trials;
        for (std::size_t i = 0; i < total.case_counts.size(); ++i)
            total.case_counts[i] += t.case_counts[i];
        total.accepted.insert(total.accepted.end(), t.accepted.begin(), t.accepted.end());
    }
    // Workers own disjoint, increasing trial ranges; a final sort makes the
    // order independent of the partition.
    std::sort(total.accepted.begin(), total.accepted.end(),
              [](const AcceptedSymbol& a, const AcceptedSymbol& b) { return a.trial < b.trial; });
    return total;
}

std::string tally_to_json(const TrialTally& tally, const TrialConfig& config) {
    nlohmann::ordered_json j;
    j["config"] = {
        {"trials", config.trials},
        {"seed", config.master_seed},
        {"q", config.scheme.q},
        {"gamma", config.scheme.gamma},
        {"alpha", config.scheme.alpha},
        {"n", resolve_blocklength(config)},
        {"transmission", config.channel.transmission},
        {"excess_noise", config.channel.excess_noise},
        {"sigma_x2", config.modulation.sigma_x2},
        {"mode", config.mode == TrialMode::kFreeM    ? "free-m"
                 : config.mode == TrialMode::kFixedM ? "fixed-m"
                                                     : "fixed-x"},
        {"reuse_codebook", config.reuse_codebook},
    };
    if (config.mode == TrialMode::kFixedM)
        j["config"]["fixed_m"] = config.fixed_m;
    j["case_counts"] = tally.case_counts;
    j["accepts"] = tally.accepts();
    j["rates"] = {
        {"p_ta", tally.p_ta_hat()},   {"p_ta_se", tally.p_ta_se()},
        {"p_fa", tally.p_fa_hat()},   {"p_fa_se", tally.p_fa_se()},
        {"p_acc", tally.p_acc_hat()}, {"ser", tally.ser_hat()},
        {"ser_se", tally.ser_se()},
    };
    return j.dump(2);
}

std::vector<double> score_samples(const TrialConfig& config, ScoreKind which,
                                  std::uint64_t samples) {
    if (config.mode == TrialMode::kFreeM)
        throw std::domain_error("score_samples: needs fixed-m or fixed-x mode");
    const std::uint32_t n = resolve_blocklength(config);
    DerivedVariances dv = derived_variances(config.channel, config.modulation);

    std::vector<double> out;
    out.reserve(samples);

    // Fixed sender block across samples.
    SplitMix64 x_rng(derive_seed(config.master_seed, 0xF1D0));
    std::vector<double> x, y0;
    draw_block(x_rng, config, n, x, y0);

    const double root_t = std::sqrt(config.channel.transmission);
    const double sigma_noise = std::sqrt(dv.sigma_y_given_x2);

    const std::uint32_t u = 1;
    Codebook fixed_cb(mix64(config.master_seed ^ kCodebookTag),
                      std::uint32_t(config.scheme.q), n);

    for (std::uint64_t s = 0; s < samples; ++s) {
        const std::uint64_t seed = derive_seed(config.master_seed, s + 1);
        SplitMix64 rng(seed);

        if (which == ScoreKind::kTrueCodeword) {
            // Fixed (x, w, u), fresh Y each sample; S_u / sigma_{Y|X}^2.
            std::vector<double> y(n);
            for (std::uint32_t i = 0; i < n; ++i)
                y[i] = root_t * x[i] + sigma_noise * rng.next_gaussian();
            EncodedMessage msg = encode(y, fixed_cb, u, dv);
            out.push_back(score(x, fixed_cb, msg.c, u, config.channel, config.modulation) /
                          dv.sigma_y_given_x2);
        } else {
            // Fixed (x, y, u), fresh table each sample; S_ell / sigma_Y^2 at
            // a fixed wrong index.
            Codebook cb(mix64(seed ^ kCodebookTag), std::uint32_t(config.scheme.q), n);
            EncodedMessage msg = encode(y0, cb, u, dv);
            const std::uint32_t ell = 2;
            out.push_back(score(x, cb, msg.c, ell, config.channel, config.modulation) /
                          dv.sigma_y2);
        }
    }
    return out;
}

AcceptedBits accumulate_accepted(const TrialTally& tally, std::uint64_t N,
                                 std::uint64_t q) {
    if (tally.accepted.size() < N)
        throw std::runtime_error("accumulate_accepted: only " +
                                 std::to_string(tally.accepted.size()) +
                                 " accepted symbols available, need " + std::to_string(N));
    std::uint32_t bits_per_symbol = 0;
    while ((1ull << bits_per_symbol) < q)
        ++bits_per_symbol;

    AcceptedBits out;
    out.bits.reserve(N * bits_per_symbol);
    for (std::uint64_t s = 0; s < N; ++s) {
        const auto& sym = tally.accepted[s];
        const std::uint64_t a = sym.u_hat - 1;
        const std::uint64_t b = sym.u_true - 1;
        for (int bit = int(bits_per_symbol) - 1; bit >= 0; --bit) {
            const int ba = int((a >> bit) & 1);
            const int bb = int((b >> bit) & 1);
            out.bits.push_back(char('0' + ba));
            if (ba != bb)
                ++out.bit_errors;
        }
    }
    out.ber = out.bits.empty() ? 0.0 : double(out.bit_errors) / double(out.bits.size());
    return out;
}

DecouplingReport decoupling_test(const TrialConfig& config, std::uint64_t samples) {
    const std::uint32_t n = resolve_blocklength(config);
    DerivedVariances dv = derived_variances(config.channel, config.modulation);
    const std::uint32_t u_a = 1;
    const std::uint32_t u_b = std::uint32_t(config.scheme.q);

    const std::uint64_t rounds = (samples + n - 1) / n;
    std::vector<double> ca, cb_samples;
    ca.reserve(rounds * n);
    cb_samples.reserve(rounds * n);
    std::vector<std::uint64_t> bins_a(100, 0), bins_b(100, 0);

    for (std::uint64_t r = 0; r < rounds; ++r) {
        const std::uint64_t seed = derive_seed(config.master_seed, r);
        SplitMix64 rng(seed);
        std::vector<double> x, y;
        draw_block(rng, config, n, x, y);
        Codebook cb(mix64(seed ^ kCodebookTag), std::uint32_t(config.scheme.q), n);
        EncodedMessage ma = encode(y, cb, u_a, dv);
        EncodedMessage mb = encode(y, cb, u_b, dv);
        for (std::uint32_t i = 0; i < n; ++i) {
            ca.push_back(ma.c[i]);
            cb_samples.push_back(mb.c[i]);
            ++bins_a[std::size_t(std::min(99.0, ma.c[i] * 100.0))];
            ++bins_b[std::size_t(std::min(99.0, mb.c[i] * 100.0))];
        }
    }

    DecouplingReport rep;
    rep.samples_per_side = ca.size();
    rep.chi2_p_u_a = chi2_uniformity_p(bins_a, ca.size());
    rep.chi2_p_u_b = chi2_uniformity_p(bins_b, cb_samples.size());
    rep.ks_two_sample_p = two_sample_ks_p(std::move(ca), std::move(cb_samples));
    return rep;
}

}  // namespace advdist
