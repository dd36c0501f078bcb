#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advdist/analytics.hpp"
#include "advdist/channel.hpp"

// Parameter search over (alpha, gamma, sigma_x2) at fixed (T, q): coarse grid
// with local refinement, SKR landscapes over (alpha, gamma), and distance
// sweeps with the PLOB / max-DW overlays.

namespace advdist {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;  // number of grid points, >= 1

    double at(int i) const {
        return steps > 1 ? lo + (hi - lo) * double(i) / double(steps - 1) : lo;
    }
};

struct SearchSpace {
    Range alpha;
    Range gamma;
    Range log10_sigma_x2;        // sigma_x2 grid is log-spaced
    bool couple_xi = true;       // xi = 0.01 sigma_x2 per candidate
    double fixed_xi = 0.0;       // used when couple_xi == false
    int max_blocklength = 512;   // skip cells whose derived n exceeds this
                                 // (0 = uncapped); such cells sit far outside
                                 // the protocol's operating regime
};

// Coarse grid matching the published operating regions: alpha in [-1.5, 0.5]
// step 0.05, gamma in [0.8, 2.2] step 0.05, sigma_x2 log-spaced 20 points per
// decade over [0.1/T * 1e-2, 0.1/T * 1e2].
SearchSpace default_search_space(double transmission);

struct GridPoint {
    double alpha = 0.0;
    double gamma = 0.0;
    double sigma_x2 = 0.0;
    RatePrediction rates;
};

struct Optimum {
    GridPoint best;
    bool all_negative = false;    // no positive-SKR cell in the space
    std::uint64_t evaluated = 0;  // cells fully evaluated
    std::uint64_t pruned = 0;     // cells skipped by the non-positive bound
};

// SKR over an (alpha, gamma) grid at fixed (T, q, sigma_x2). Negative values
// are preserved. Row-major in alpha, column-major in gamma.
struct Landscape {
    Range alpha;
    Range gamma;
    double sigma_x2 = 0.0;
    std::vector<GridPoint> cells;  // alpha-major: index = ia * gamma.steps + ig
};

Landscape landscape(double transmission, std::uint64_t q, double sigma_x2,
                    const Range& alpha, const Range& gamma, bool couple_xi = true,
                    double fixed_xi = 0.0, unsigned threads = 0);

// Grid scan plus Nelder-Mead refinement from the best cell; deterministic
// given the space. Worker count does not affect the result.
Optimum optimize(double transmission, std::uint64_t q, const SearchSpace& space,
                 unsigned threads = 0);

struct SweepRow {
    double distance_km = 0.0;
    double transmission = 0.0;
    GridPoint best;
    double plob = 0.0;
    double maxdw = 0.0;
};

std::vector<SweepRow> distance_sweep(const std::vector<double>& distances_km,
                                     std::uint64_t q, const SearchSpace& space,
                                     unsigned threads = 0);
// Variant deriving the space from each distance's transmission.
std::vector<SweepRow> distance_sweep(const std::vector<double>& distances_km,
                                     std::uint64_t q, unsigned threads = 0);

// CSV serializations (header row + one line per entry).
std::string landscape_csv(const Landscape& grid);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string grid_point_csv_header();
std::string grid_point_csv_row(const GridPoint& p);

}  // namespace advdist
