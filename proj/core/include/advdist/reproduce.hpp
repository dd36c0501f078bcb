#pragma once

#include <string>
#include <vector>

// Reproduction recipes for the published reference results: the sixteen-row
// operating-point table, the distance sweep against the PLOB / max-DW bounds,
// the (alpha, gamma) rate landscape, and the f_beta structure plot. Each
// recipe returns machine-checkable pass/fail lines plus a CSV rendering of
// the computed data.
//
// Rows whose published figures are documented as irreproducible (transcription
// or optimization noise in the source data; see the README) are still
// computed and reported, but marked uncounted so they do not fail the run.

namespace advdist {

struct CheckLine {
    std::string name;
    bool pass = false;
    bool counted = true;  // false: known deviation, reported but not failing
    std::string detail;
};

struct ReproReport {
    std::vector<CheckLine> lines;
    std::string csv;      // recipe data (schema in the first row)
    bool pass = true;     // all counted lines pass

    void add(CheckLine line) {
        if (line.counted && !line.pass)
            pass = false;
        lines.push_back(std::move(line));
    }
};

ReproReport reproduce_table1(unsigned threads = 0);
ReproReport reproduce_fig2(unsigned threads = 0);
ReproReport reproduce_fig3(unsigned threads = 0);
ReproReport reproduce_fig5();

}  // namespace advdist
