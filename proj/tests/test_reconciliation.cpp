#include "advdist/reconciliation.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "advdist/numerics.hpp"
#include "advdist/rng.hpp"
#include "doctest.h"
#include "stat_tests.hpp"

using namespace advdist;

namespace {

const ChannelParams kCh{1e-3, 1.34};
const ModulationParams kMod{134.0};

// Independent re-implementation of the quadratic score, written directly
// from the definition (erfc-based normal quantile via bisection).
double brute_quantile(double p, double sigma) {
    double lo = -60.0 * sigma, hi = 60.0 * sigma;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (0.5 * std::erfc(-mid / sigma / std::sqrt(2.0)) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double brute_score(const std::vector<double>& x, const Codebook& cb,
                   const std::vector<double>& c, std::uint32_t ell,
                   const ChannelParams& ch, const ModulationParams& mod) {
    auto dv = derived_variances(ch, mod);
    const double sigma_y = std::sqrt(dv.sigma_y2);
    const double k = dv.sigma_y2 / (std::sqrt(ch.transmission) * mod.sigma_x2);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double arg = c[i] - cb.entry(ell - 1, std::uint32_t(i));
        arg -= std::floor(arg);
        arg = std::min(std::max(arg, 1e-15), 1.0 - 1e-15);
        const double r = brute_quantile(arg, sigma_y) - k * x[i];
        s += r * r;
    }
    return s;
}

}  // namespace

TEST_CASE("codebook determinism and seed sensitivity") {
    Codebook a(42, 64, 16), b(42, 64, 16), c(43, 64, 16);
    std::size_t diff = 0, total = 0;
    for (std::uint32_t r = 0; r < 64; ++r) {
        for (std::uint32_t i = 0; i < 16; ++i) {
            CHECK(a.entry(r, i) == b.entry(r, i));
            CHECK(a.entry(r, i) >= 0.0);
            CHECK(a.entry(r, i) < 1.0);
            if (a.entry(r, i) != c.entry(r, i))
                ++diff;
            ++total;
        }
    }
    CHECK(double(diff) / double(total) > 0.99);
}

TEST_CASE("codebook entries pass uniformity at 1e6 samples") {
    Codebook cb(777, 1024, 1024);
    std::vector<double> samples;
    samples.reserve(1024 * 1024);
    for (std::uint32_t r = 0; r < 1024; ++r)
        for (std::uint32_t i = 0; i < 1024; ++i)
            samples.push_back(cb.entry(r, i));
    CHECK(teststat::chi2_uniformity_p(samples, 100) > 0.001);
}

TEST_CASE("codebook validation") {
    CHECK_THROWS_AS(Codebook(1, 1, 16), std::domain_error);
    CHECK_THROWS_AS(Codebook(1, 4, 0), std::domain_error);
    CHECK_THROWS_AS(Codebook::from_matrix({{0.1, 0.2}, {0.3}}), std::domain_error);
}

TEST_CASE("encode basics") {
    auto dv = derived_variances(kCh, kMod);
    // zero mask: c = F_Y(y)
    Codebook zero = Codebook::from_matrix({{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}});
    std::vector<double> y{0.1, -0.4, 1.7};
    auto msg = encode(y, zero, 1, dv);
    const double sigma_y = std::sqrt(dv.sigma_y2);
    for (int i = 0; i < 3; ++i)
        CHECK(msg.c[i] == doctest::Approx(gaussian_cdf(y[i], sigma_y)).epsilon(1e-15));

    // constant mask 0.25 on y = 0: c = 0.75
    Codebook quarter = Codebook::from_matrix({{0.25, 0.25}, {0.25, 0.25}});
    std::vector<double> y0{0.0, 0.0};
    auto msg2 = encode(y0, quarter, 2, dv);
    CHECK(msg2.c[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(msg2.c[1] == doctest::Approx(0.75).epsilon(1e-15));

    CHECK_THROWS_AS(encode(y0, quarter, 3, dv), std::domain_error);
    CHECK_THROWS_AS(encode(y, quarter, 1, dv), std::domain_error);
}

TEST_CASE("encode/decode roundtrip recovers y") {
    auto dv = derived_variances(kCh, kMod);
    const double sigma_y = std::sqrt(dv.sigma_y2);
    Codebook cb(9, 8, 12);
    SplitMix64 rng(4);
    std::vector<double> y(12);
    for (auto& v : y)
        v = sigma_y * rng.next_gaussian();
    auto msg = encode(y, cb, 5, dv);
    for (std::size_t i = 0; i < y.size(); ++i) {
        double arg = msg.c[i] - cb.entry(4, std::uint32_t(i));
        arg -= std::floor(arg);
        const double back = gaussian_cdf_inv(arg, sigma_y);
        CHECK(back == doctest::Approx(y[i]).epsilon(1e-6));
    }
}

TEST_CASE("score at the centering point is zero") {
    // n = 1, y chosen so F_Y^inv(c - w) = k x: the residual vanishes.
    auto dv = derived_variances(kCh, kMod);
    const double k = score_centering(kCh, kMod);
    const double x1 = 0.37;
    std::vector<double> y{k * x1};
    Codebook cb(123, 2, 1);
    auto msg = encode(y, cb, 1, dv);
    std::vector<double> x{x1};
    CHECK(score(x, cb, msg.c, 1, kCh, kMod) < 1e-18);
}

TEST_CASE("score with zero x drops the centering term") {
    Codebook cb(5, 4, 6);
    std::vector<double> x(6, 0.0), c{0.9, 0.1, 0.5, 0.33, 0.77, 0.05};
    auto dv = derived_variances(kCh, kMod);
    const double sigma_y = std::sqrt(dv.sigma_y2);
    for (std::uint32_t ell = 1; ell <= 4; ++ell) {
        double expect = 0.0;
        for (int i = 0; i < 6; ++i) {
            double arg = c[i] - cb.entry(ell - 1, i);
            arg -= std::floor(arg);
            const double v = gaussian_cdf_inv(std::min(std::max(arg, 1e-15), 1.0 - 1e-15),
                                              sigma_y);
            expect += v * v;
        }
        CHECK(score(x, cb, c, ell, kCh, kMod) == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("score equals brute-force evaluation on a random instance") {
    Codebook cb(2718, 4, 8);
    SplitMix64 rng(99);
    auto dv = derived_variances(kCh, kMod);
    std::vector<double> x(8), y(8);
    const double sigma_x = std::sqrt(kMod.sigma_x2);
    const double root_t = std::sqrt(kCh.transmission);
    const double sigma_n = std::sqrt(dv.sigma_y_given_x2);
    for (int i = 0; i < 8; ++i) {
        x[i] = sigma_x * rng.next_gaussian();
        y[i] = root_t * x[i] + sigma_n * rng.next_gaussian();
    }
    auto msg = encode(y, cb, 3, dv);
    for (std::uint32_t ell = 1; ell <= 4; ++ell) {
        const double got = score(x, cb, msg.c, ell, kCh, kMod);
        const double want = brute_score(x, cb, msg.c, ell, kCh, kMod);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("scores invariant under integer shifts of the wrapped argument") {
    Codebook cb(31, 4, 5);
    std::vector<double> x{0.3, -0.2, 0.9, -1.4, 0.05};
    std::vector<double> c{0.12, 0.98, 0.43, 0.66, 0.01};
    const double base = score(x, cb, c, 2, kCh, kMod);
    for (int shift : {-3, -1, 1, 2}) {
        std::vector<double> shifted = c;
        for (auto& v : shifted)
            v += shift;
        CHECK(score(x, cb, shifted, 2, kCh, kMod) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("noncentralities") {
    auto nc = noncentralities(0.0, kCh, kMod);
    CHECK(nc.lambda1 == 0.0);
    CHECK(nc.lambda0 == 0.0);

    auto dv = derived_variances(kCh, kMod);
    const double m = 41.0;
    nc = noncentralities(m, kCh, kMod);
    CHECK(nc.lambda1 ==
          doctest::Approx(m * dv.sigma_y_given_x2 / (kCh.transmission * kMod.sigma_x2))
              .epsilon(1e-14));
    CHECK(nc.lambda0 / nc.lambda1 ==
          doctest::Approx(dv.sigma_y2 / dv.sigma_y_given_x2).epsilon(1e-14));
    CHECK_THROWS_AS(noncentralities(1.0, {1e-3, 0.0}, {0.0}), std::domain_error);
}

TEST_CASE("threshold anchors at the expected true score") {
    auto dv = derived_variances(kCh, kMod);
    const std::uint32_t n = 41;
    const double m = 38.5;
    const double lambda1 = noncentralities(m, kCh, kMod).lambda1;
    // E[S_u | m] = sigma_{Y|X}^2 (n + lambda1); alpha shifts in units of n.
    CHECK(threshold(m, n, 0.0, kCh, kMod) ==
          doctest::Approx(dv.sigma_y_given_x2 * (n + lambda1)).epsilon(1e-14));
    CHECK(threshold(m, n, -0.55, kCh, kMod) ==
          doctest::Approx(dv.sigma_y_given_x2 * (n + lambda1) - 0.55 * n).epsilon(1e-14));
    // alpha -> -inf: negative threshold, guaranteed reject
    CHECK(threshold(m, n, -1e9, kCh, kMod) < 0.0);
}

TEST_CASE("decision rule") {
    ScoreSet s{{0.5, 3.0, 4.0}};
    auto d = decide(s, 1.0);
    CHECK(d.accepted);
    CHECK(d.index == 1);

    d = decide({{0.5, 0.7, 4.0}}, 1.0);
    CHECK_FALSE(d.accepted);
    d = decide({{5.0, 3.0, 4.0}}, 1.0);
    CHECK_FALSE(d.accepted);
    // tie at the threshold counts as not-below
    d = decide({{1.0, 3.0, 0.2}}, 1.0);
    CHECK(d.accepted);
    CHECK(d.index == 3);
}

TEST_CASE("outcome classification covers all five cases") {
    const double theta = 1.0;
    auto classify = [&](std::vector<double> scores, std::uint32_t u) {
        ScoreSet s{std::move(scores)};
        return classify_outcome(decide(s, theta), s, theta, u);
    };
    CHECK(classify({0.5, 2.0, 3.0}, 1) == OutcomeCase::kTrueAccept);
    CHECK(classify({2.0, 0.5, 3.0}, 1) == OutcomeCase::kFalseAccept);
    CHECK(classify({2.0, 0.5, 0.7}, 1) == OutcomeCase::kRejectMultipleRivals);
    CHECK(classify({2.0, 1.5, 3.0}, 1) == OutcomeCase::kRejectAllAbove);
    CHECK(classify({0.5, 0.7, 3.0}, 1) == OutcomeCase::kRejectTrueNotUnique);
}

TEST_CASE("score ordering matches the posterior ordering (likelihood-ratio form)") {
    // On random small instances, ascending scores must order exactly like
    // descending posteriors prod f_{Y|X}(F^inv(c-w)|x) / f_Y(F^inv(c-w)).
    auto dv = derived_variances(kCh, kMod);
    const double sigma_y = std::sqrt(dv.sigma_y2);
    const double sigma_yx = std::sqrt(dv.sigma_y_given_x2);
    const double root_t = std::sqrt(kCh.transmission);
    SplitMix64 rng(31337);
    for (int inst = 0; inst < 100; ++inst) {
        const std::uint32_t q = 2 + std::uint32_t(rng.next_below(15));
        const std::uint32_t n = 1 + std::uint32_t(rng.next_below(8));
        Codebook cb(rng.next_u64(), q, n);
        std::vector<double> x(n), y(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            x[i] = std::sqrt(kMod.sigma_x2) * rng.next_gaussian();
            y[i] = root_t * x[i] + sigma_yx * rng.next_gaussian();
        }
        const std::uint32_t u = 1 + std::uint32_t(rng.next_below(q));
        auto msg = encode(y, cb, u, dv);
        auto scores = score_all(x, cb, msg.c, kCh, kMod);

        std::vector<double> log_posterior(q, 0.0);
        for (std::uint32_t ell = 0; ell < q; ++ell) {
            for (std::uint32_t i = 0; i < n; ++i) {
                double arg = msg.c[i] - cb.entry(ell, i);
                arg -= std::floor(arg);
                arg = std::min(std::max(arg, 1e-15), 1.0 - 1e-15);
                const double yv = gaussian_cdf_inv(arg, sigma_y);
                const double num = (yv - root_t * x[i]) / sigma_yx;
                const double den = yv / sigma_y;
                // log of f_{Y|X}/f_Y up to a common constant
                log_posterior[ell] +=
                    -0.5 * num * num + 0.5 * den * den - std::log(sigma_yx / sigma_y);
            }
        }
        std::vector<std::uint32_t> by_score(q), by_post(q);
        std::iota(by_score.begin(), by_score.end(), 0u);
        std::iota(by_post.begin(), by_post.end(), 0u);
        std::sort(by_score.begin(), by_score.end(), [&](auto a, auto b) {
            return scores.scores[a] < scores.scores[b];
        });
        std::sort(by_post.begin(), by_post.end(), [&](auto a, auto b) {
            return log_posterior[a] > log_posterior[b];
        });
        CHECK(by_score == by_post);
    }
}

TEST_CASE("normalized true scores follow the noncentral chi-square law") {
    // Reduced version of the distribution check (full size in acceptance).
    const std::uint32_t n = 12;
    const double m = double(n);
    auto dv = derived_variances(kCh, kMod);
    const double lambda1 = noncentralities(m, kCh, kMod).lambda1;
    const double sigma_x = std::sqrt(kMod.sigma_x2);
    const double root_t = std::sqrt(kCh.transmission);
    const double sigma_n = std::sqrt(dv.sigma_y_given_x2);

    SplitMix64 rng(8888);
    std::vector<double> x(n);
    double ss = 0.0;
    for (auto& v : x) {
        v = rng.next_gaussian();
        ss += v * v;
    }
    for (auto& v : x)
        v *= sigma_x * std::sqrt(m / ss);

    Codebook cb(5150, 16, n);
    std::vector<double> samples;
    for (int s = 0; s < 3000; ++s) {
        std::vector<double> y(n);
        for (std::uint32_t i = 0; i < n; ++i)
            y[i] = root_t * x[i] + sigma_n * rng.next_gaussian();
        auto msg = encode(y, cb, 7, dv);
        samples.push_back(score(x, cb, msg.c, 7, kCh, kMod) / dv.sigma_y_given_x2);
    }
    const double p = teststat::ks_test_p(samples, [&](double z) {
        return noncentral_chi2_cdf(std::max(z, 0.0), {double(n), lambda1});
    });
    CHECK(p > 0.01);
}

TEST_CASE("x = 0 reduces both score laws to central chi-square") {
    const std::uint32_t n = 10;
    auto dv = derived_variances(kCh, kMod);
    SplitMix64 rng(456);
    const double sigma_n = std::sqrt(dv.sigma_y_given_x2);
    std::vector<double> x(n, 0.0);
    std::vector<double> samples_u, samples_w;
    for (int s = 0; s < 2500; ++s) {
        Codebook cb(rng.next_u64(), 8, n);
        std::vector<double> y(n);
        for (auto& v : y)
            v = sigma_n * rng.next_gaussian();  // sqrt(T) x = 0
        auto msg = encode(y, cb, 2, dv);
        samples_u.push_back(score(x, cb, msg.c, 2, kCh, kMod) / dv.sigma_y_given_x2);
        samples_w.push_back(score(x, cb, msg.c, 5, kCh, kMod) / dv.sigma_y2);
    }
    auto central = [&](double z) {
        return noncentral_chi2_cdf(std::max(z, 0.0), {double(n), 0.0});
    };
    CHECK(teststat::ks_test_p(samples_u, central) > 0.01);
    CHECK(teststat::ks_test_p(samples_w, central) > 0.01);
}
