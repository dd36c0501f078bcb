#include "advdist/reconciliation.hpp"

#include <cmath>
#include <stdexcept>

#include "advdist/numerics.hpp"
#include "advdist/rng.hpp"

namespace advdist {

namespace {

// Keeps F_Y^inv away from the saturating endpoints; the guarded band has
// probability ~1e-15 per coordinate.
constexpr double kUnitEps = 1e-15;

inline double mod1(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0) r = 0.0;  // guard against rounding at the boundary
    return r;
}

inline double clamp_unit(double v) {
    if (v < kUnitEps) return kUnitEps;
    if (v > 1.0 - kUnitEps) return 1.0 - kUnitEps;
    return v;
}

}  // namespace

Codebook::Codebook(std::uint64_t seed, std::uint32_t q, std::uint32_t n)
    : seed_(seed), q_(q), n_(n) {
    if (q < 2 || n < 1)
        throw std::domain_error("Codebook: need q >= 2 and n >= 1");
}

Codebook Codebook::from_matrix(std::vector<std::vector<double>> entries) {
    if (entries.size() < 2 || entries.front().empty())
        throw std::domain_error("Codebook: need q >= 2 and n >= 1");
    Codebook cb;
    cb.q_ = std::uint32_t(entries.size());
    cb.n_ = std::uint32_t(entries.front().size());
    for (const auto& row : entries)
        if (row.size() != cb.n_)
            throw std::domain_error("Codebook: ragged matrix");
    cb.matrix_ = std::move(entries);
    return cb;
}

std::uint64_t Codebook::row_key(std::uint32_t row) const {
    return mix64(seed_ ^ (0x9E3779B97F4A7C15ull * (std::uint64_t(row) + 1)));
}

double Codebook::entry_hash(std::uint64_t row_key, std::uint32_t i) {
    return u64_to_unit(mix64(row_key ^ (0xC2B2AE3D27D4EB4Full * (std::uint64_t(i) + 1))));
}

double empirical_m(std::span<const double> x, const ModulationParams& mod) {
    if (!(mod.sigma_x2 > 0.0))
        throw std::domain_error("empirical_m: sigma_x2 must be > 0");
    double s = 0.0;
    for (double v : x) s += v * v;
    return s / mod.sigma_x2;
}

double score_centering(const ChannelParams& ch, const ModulationParams& mod) {
    if (!(ch.transmission * mod.sigma_x2 > 0.0))
        throw std::domain_error("score_centering: degenerate channel (T sigma_x2 = 0)");
    DerivedVariances dv = derived_variances(ch, mod);
    return dv.sigma_y2 / (std::sqrt(ch.transmission) * mod.sigma_x2);
}

EncodedMessage encode(std::span<const double> y, const Codebook& cb, std::uint32_t u,
                      const DerivedVariances& dv) {
    if (u < 1 || u > cb.rows())
        throw std::domain_error("encode: index out of range");
    if (y.size() != cb.row_length())
        throw std::domain_error("encode: length mismatch");
    const double sigma_y = std::sqrt(dv.sigma_y2);
    EncodedMessage msg;
    msg.u = u;
    msg.c.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        msg.c[i] = mod1(gaussian_cdf(y[i], sigma_y) + cb.entry(u - 1, std::uint32_t(i)));
    return msg;
}

double score(std::span<const double> x, const Codebook& cb, std::span<const double> c,
             std::uint32_t ell, const ChannelParams& ch, const ModulationParams& mod) {
    if (ell < 1 || ell > cb.rows())
        throw std::domain_error("score: index out of range");
    if (x.size() != c.size() || x.size() != cb.row_length())
        throw std::domain_error("score: length mismatch");
    DerivedVariances dv = derived_variances(ch, mod);
    const double sigma_y = std::sqrt(dv.sigma_y2);
    const double k = score_centering(ch, mod);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = cb.entry(ell - 1, std::uint32_t(i));
        const double arg = clamp_unit(mod1(c[i] - w));
        const double resid = sigma_y * std_normal_quantile(arg) - k * x[i];
        s += resid * resid;
    }
    return s;
}

ScoreSet score_all(std::span<const double> x, const Codebook& cb, std::span<const double> c,
                   const ChannelParams& ch, const ModulationParams& mod) {
    if (x.size() != c.size() || x.size() != cb.row_length())
        throw std::domain_error("score_all: length mismatch");
    DerivedVariances dv = derived_variances(ch, mod);
    const double sigma_y = std::sqrt(dv.sigma_y2);
    const double k = score_centering(ch, mod);
    ScoreSet out;
    out.scores.resize(cb.rows());
    std::vector<double> centered(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        centered[i] = k * x[i];
    for (std::uint32_t ell = 0; ell < cb.rows(); ++ell) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double w = cb.entry(ell, std::uint32_t(i));
            const double arg = clamp_unit(mod1(c[i] - w));
            const double resid = sigma_y * std_normal_quantile(arg) - centered[i];
            s += resid * resid;
        }
        out.scores[ell] = s;
    }
    return out;
}

Noncentralities noncentralities(double m, const ChannelParams& ch, const ModulationParams& mod) {
    if (!(m >= 0.0))
        throw std::domain_error("noncentralities: m must be >= 0");
    const double t_sx2 = ch.transmission * mod.sigma_x2;
    if (!(t_sx2 > 0.0))
        throw std::domain_error("noncentralities: degenerate channel (T sigma_x2 = 0)");
    DerivedVariances dv = derived_variances(ch, mod);
    return {dv.sigma_y_given_x2 / t_sx2 * m, dv.sigma_y2 / t_sx2 * m};
}

double threshold(double m, std::uint32_t n, double alpha, const ChannelParams& ch,
                 const ModulationParams& mod) {
    DerivedVariances dv = derived_variances(ch, mod);
    const double lambda1 = noncentralities(m, ch, mod).lambda1;
    return dv.sigma_y_given_x2 * (double(n) + lambda1) + double(n) * alpha;
}

Decision decide(const ScoreSet& scores, double theta) {
    Decision d;
    std::uint32_t below = 0;
    for (std::uint32_t i = 0; i < scores.scores.size(); ++i) {
        if (scores.scores[i] < theta) {
            ++below;
            d.index = i + 1;
            if (below > 1) break;
        }
    }
    d.accepted = (below == 1);
    if (!d.accepted) d.index = 0;
    return d;
}

OutcomeCase classify_outcome(const Decision& d, const ScoreSet& scores, double theta,
                             std::uint32_t u_true) {
    if (u_true < 1 || u_true > scores.scores.size())
        throw std::domain_error("classify_outcome: ground-truth index out of range");
    const bool true_below = scores.scores[u_true - 1] < theta;
    std::uint32_t rivals_below = 0;
    for (std::uint32_t i = 0; i < scores.scores.size(); ++i)
        if (i + 1 != u_true && scores.scores[i] < theta) ++rivals_below;

    OutcomeCase oc;
    if (true_below && rivals_below == 0)
        oc = OutcomeCase::kTrueAccept;
    else if (!true_below && rivals_below == 1)
        oc = OutcomeCase::kFalseAccept;
    else if (!true_below && rivals_below >= 2)
        oc = OutcomeCase::kRejectMultipleRivals;
    else if (!true_below && rivals_below == 0)
        oc = OutcomeCase::kRejectAllAbove;
    else
        oc = OutcomeCase::kRejectTrueNotUnique;  // true below + rivals below

    const bool accept_case =
        oc == OutcomeCase::kTrueAccept || oc == OutcomeCase::kFalseAccept;
    if (accept_case != d.accepted)
        throw std::logic_error("classify_outcome: decision inconsistent with scores");
    return oc;
}

}  // namespace advdist
