// Command-line front end: analytic rate prediction, Monte Carlo protocol
// runs, (alpha, gamma) landscapes, parameter optimization, distance sweeps
// and reproduction bundles for the published reference results.
//
// Exit codes: 0 success, 2 parameter validation error, 3 reproduction
// tolerance failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "advdist/analytics.hpp"
#include "advdist/channel.hpp"
#include "advdist/montecarlo.hpp"
#include "advdist/optimizer.hpp"
#include "advdist/reproduce.hpp"
#include "advdist/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitValidation = 2;
constexpr int kExitTolerance = 3;

struct CommonOpts {
    double transmission = 0.0;
    double distance_km = -1.0;
    std::uint64_t q = 1024;
    double alpha = -0.55;
    double gamma = 1.45;
    double sigma_x2 = 134.0;
    std::optional<double> xi;
    int n_pin = 0;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out_dir;
    std::string format = "csv";  // applies to the landscape/sweep grids
};

double resolve_transmission(const CommonOpts& o) {
    if (o.distance_km >= 0.0)
        return advdist::distance_to_transmission(o.distance_km);
    if (o.transmission > 0.0)
        return o.transmission;
    throw CLI::ValidationError("--T or --distance-km is required");
}

double resolve_xi(const CommonOpts& o) {
    return o.xi ? *o.xi : advdist::default_excess_noise(o.sigma_x2);
}

// Deterministic identifier for a run; outputs reference it, the manifest
// maps it to wall-clock metadata.
std::string run_id(const std::string& command, const ordered_json& params) {
    std::uint64_t h = 0x811C9DC5ull;
    for (char c : command + params.dump())
        h = advdist::mix64(h ^ std::uint64_t(static_cast<unsigned char>(c)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

struct Manifest {
    std::string command;
    ordered_json params;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void finalize(const std::string& out_dir) const {
        if (out_dir.empty())
            return;
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ordered_json j;
        j["tool"] = "advdist";
        j["version"] = kVersion;
        j["command"] = command;
        j["run_id"] = run_id(command, params);
        j["parameters"] = params;
        j["outputs"] = outputs;
        j["wall_clock_seconds"] = wall;
        write_file(fs::path(out_dir) / "manifest.json", j.dump(2) + "\n");
    }
};

ordered_json prediction_json(const advdist::RatePrediction& r, double T, double xi,
                             const CommonOpts& o) {
    ordered_json j;
    j["transmission"] = T;
    j["q"] = o.q;
    j["alpha"] = o.alpha;
    j["gamma"] = o.gamma;
    j["sigma_x2"] = o.sigma_x2;
    j["xi"] = xi;
    j["n"] = r.n;
    j["n_computed"] = r.n_computed;
    j["p_ta"] = r.p_ta_av;
    j["p_fa"] = r.p_fa_av;
    j["p_acc"] = r.p_acc_av;
    j["ser"] = r.ser_av;
    j["skr"] = r.skr;
    j["skr_small_t"] = r.skr_small_t;
    j["i_xy"] = r.i_xy;
    j["i_ey"] = r.i_ey;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rate calculator and protocol simulator for random-codebook "
                 "advantage distillation over a lossy Gaussian channel"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts o;

    auto add_channel_flags = [&](CLI::App* cmd, bool with_scheme) {
        cmd->add_option("--T", o.transmission, "channel transmission in (0,1]");
        cmd->add_option("--distance-km", o.distance_km,
                        "fiber length at 0.22 dB/km (alternative to --T)");
        cmd->add_option("--q", o.q, "codebook size (>= 2)")
            ->check(CLI::Range(std::uint64_t(2), std::uint64_t(1) << 30));
        if (with_scheme) {
            cmd->add_option("--alpha", o.alpha, "threshold offset per sample");
            cmd->add_option("--gamma", o.gamma, "code rate relative to capacity");
            cmd->add_option("--sigma-x2", o.sigma_x2, "modulation variance per quadrature");
            cmd->add_option("--xi", o.xi, "excess noise (default 0.01 sigma_x2)");
            cmd->add_option("--n", o.n_pin, "pin the blocklength");
        }
        cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
        cmd->add_option("--out", o.out_dir, "output directory");
        cmd->add_option("--format", o.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    // ---- predict ----
    auto* predict = app.add_subcommand("predict", "analytic rates at one operating point");
    add_channel_flags(predict, true);

    // ---- mc ----
    auto* mc = app.add_subcommand("mc", "Monte Carlo protocol trials vs analytics");
    add_channel_flags(mc, true);
    mc->add_option("--trials", o.trials, "number of protocol trials");
    mc->add_option("--seed", o.seed, "master seed");
    double fixed_m = -1.0;
    mc->add_option("--fixed-m", fixed_m, "condition on a fixed block energy m");

    // ---- landscape ----
    auto* land = app.add_subcommand("landscape", "SKR over an (alpha, gamma) grid");
    add_channel_flags(land, true);
    double a_lo = -1.5, a_hi = 0.5, g_lo = 0.8, g_hi = 2.2;
    int a_steps = 41, g_steps = 29;
    land->add_option("--alpha-min", a_lo);
    land->add_option("--alpha-max", a_hi);
    land->add_option("--alpha-steps", a_steps);
    land->add_option("--gamma-min", g_lo);
    land->add_option("--gamma-max", g_hi);
    land->add_option("--gamma-steps", g_steps);

    // ---- optimize ----
    auto* opt_cmd = app.add_subcommand("optimize", "maximize SKR over (alpha, gamma, sigma_x2)");
    add_channel_flags(opt_cmd, false);

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "optimize across distances with bound overlays");
    add_channel_flags(sweep, false);
    std::string distances_csv = "45,136,273,364";
    sweep->add_option("--distances", distances_csv, "comma-separated distances in km");

    // ---- reproduce ----
    auto* repro = app.add_subcommand("reproduce", "reproduce a published reference result");
    std::string target;
    repro->add_option("--target", target, "table1|fig2|fig3|fig5")
        ->required()
        ->check(CLI::IsMember({"table1", "fig2", "fig3", "fig5"}));
    repro->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    repro->add_option("--out", o.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (!o.out_dir.empty())
            fs::create_directories(o.out_dir);

        if (predict->parsed()) {
            const double T = resolve_transmission(o);
            const double xi = resolve_xi(o);
            advdist::ChannelParams ch{T, xi};
            advdist::ModulationParams mod{o.sigma_x2};
            advdist::SchemeParams scheme{o.q, o.gamma, o.alpha, o.n_pin};
            auto r = advdist::secret_key_ratio(scheme, ch, mod);
            const double dw = advdist::devetak_winter(ch, mod);
            const double plob = advdist::plob_cv(T);

            std::printf("T            %.6g\n", T);
            std::printf("n            %d%s\n", r.n, o.n_pin > 0 ? " (pinned)" : "");
            std::printf("P_TA         %.6g\n", r.p_ta_av);
            std::printf("P_FA         %.6g\n", r.p_fa_av);
            std::printf("SER          %.6g\n", r.ser_av);
            std::printf("SKR          %.6g\n", r.skr);
            std::printf("I(X;Y)       %.6g\n", r.i_xy);
            std::printf("I(E;Y)       %.6g\n", r.i_ey);
            std::printf("DW           %.6g\n", dw);
            std::printf("PLOB         %.6g\n", plob);

            Manifest man{"predict", {}};
            man.params = {{"T", T},           {"q", o.q},
                          {"alpha", o.alpha}, {"gamma", o.gamma},
                          {"sigma_x2", o.sigma_x2}, {"xi", xi},
                          {"n", o.n_pin}};
            if (!o.out_dir.empty()) {
                ordered_json j = prediction_json(r, T, xi, o);
                j["run_id"] = run_id("predict", man.params);
                j["dw"] = dw;
                j["plob_cv"] = plob;
                write_file(fs::path(o.out_dir) / "predict.json", j.dump(2) + "\n");
                man.outputs = {"predict.json"};
            }
            man.finalize(o.out_dir);
            return 0;
        }

        if (mc->parsed()) {
            const double T = resolve_transmission(o);
            const double xi = resolve_xi(o);
            advdist::TrialConfig cfg;
            cfg.trials = o.trials;
            cfg.master_seed = o.seed;
            cfg.scheme = {o.q, o.gamma, o.alpha, o.n_pin};
            cfg.channel = {T, xi};
            cfg.modulation = {o.sigma_x2};
            cfg.threads = o.threads;
            if (fixed_m >= 0.0) {
                cfg.mode = advdist::TrialMode::kFixedM;
                cfg.fixed_m = fixed_m;
            }
            const std::uint32_t n = advdist::resolve_blocklength(cfg);
            auto tally = advdist::run_batch(cfg);

            double p_ta_ref, p_fa_ref;
            if (cfg.mode == advdist::TrialMode::kFixedM) {
                auto c = advdist::conditional_rates(cfg.fixed_m, cfg.scheme, n,
                                                    cfg.channel, cfg.modulation);
                p_ta_ref = c.p_ta;
                p_fa_ref = c.p_fa;
            } else {
                auto r = advdist::secret_key_ratio(cfg.scheme, cfg.channel, cfg.modulation);
                p_ta_ref = r.p_ta_av;
                p_fa_ref = r.p_fa_av;
            }
            auto zscore = [&](double hat, double ref) {
                const double se =
                    std::sqrt(std::max(ref * (1.0 - ref), 1e-300) / double(cfg.trials));
                return (hat - ref) / se;
            };

            std::printf("trials       %llu\n",
                        static_cast<unsigned long long>(tally.trials));
            std::printf("n            %u\n", n);
            std::printf("case counts  %llu %llu %llu %llu %llu\n",
                        static_cast<unsigned long long>(tally.case_counts[0]),
                        static_cast<unsigned long long>(tally.case_counts[1]),
                        static_cast<unsigned long long>(tally.case_counts[2]),
                        static_cast<unsigned long long>(tally.case_counts[3]),
                        static_cast<unsigned long long>(tally.case_counts[4]));
            std::printf("P_TA         %.6g (analytic %.6g, z = %+.2f)\n",
                        tally.p_ta_hat(), p_ta_ref, zscore(tally.p_ta_hat(), p_ta_ref));
            std::printf("P_FA         %.6g (analytic %.6g, z = %+.2f)\n",
                        tally.p_fa_hat(), p_fa_ref, zscore(tally.p_fa_hat(), p_fa_ref));
            std::printf("SER          %.6g\n", tally.ser_hat());
            if (tally.accepts() == 0)
                std::printf("warning: no accepted trials (threshold rejects everything)\n");

            Manifest man{"mc", {}};
            man.params = {{"T", T},           {"q", o.q},
                          {"alpha", o.alpha}, {"gamma", o.gamma},
                          {"sigma_x2", o.sigma_x2}, {"xi", xi},
                          {"n", n},           {"trials", o.trials},
                          {"seed", o.seed},   {"fixed_m", fixed_m}};
            if (!o.out_dir.empty()) {
                write_file(fs::path(o.out_dir) / "mc_tally.json",
                           advdist::tally_to_json(tally, cfg) + "\n");
                man.outputs = {"mc_tally.json"};
            }
            man.finalize(o.out_dir);
            return 0;
        }

        if (land->parsed()) {
            const double T = resolve_transmission(o);
            auto grid = advdist::landscape(T, o.q, o.sigma_x2, {a_lo, a_hi, a_steps},
                                           {g_lo, g_hi, g_steps}, !o.xi.has_value(),
                                           o.xi.value_or(0.0), o.threads);
            double best = -1e300;
            for (const auto& cell : grid.cells)
                best = std::max(best, cell.rates.skr);
            std::printf("cells        %zu\n", grid.cells.size());
            std::printf("max SKR      %.6g\n", best);

            std::string payload, filename;
            if (o.format == "json") {
                ordered_json cells = ordered_json::array();
                for (const auto& cell : grid.cells) {
                    cells.push_back({{"alpha", cell.alpha},
                                     {"gamma", cell.gamma},
                                     {"sigma_x2", cell.sigma_x2},
                                     {"n", cell.rates.n},
                                     {"p_ta", cell.rates.p_ta_av},
                                     {"p_fa", cell.rates.p_fa_av},
                                     {"ser", cell.rates.ser_av},
                                     {"skr", cell.rates.skr}});
                }
                payload = cells.dump(2) + "\n";
                filename = "landscape.json";
            } else {
                payload = advdist::landscape_csv(grid);
                filename = "landscape.csv";
            }
            Manifest man{"landscape", {}};
            man.params = {{"T", T},           {"q", o.q},
                          {"sigma_x2", o.sigma_x2}, {"alpha_min", a_lo},
                          {"alpha_max", a_hi},      {"alpha_steps", a_steps},
                          {"gamma_min", g_lo},      {"gamma_max", g_hi},
                          {"gamma_steps", g_steps}};
            if (!o.out_dir.empty()) {
                write_file(fs::path(o.out_dir) / filename, payload);
                man.outputs = {filename};
            } else {
                std::fputs(payload.c_str(), stdout);
            }
            man.finalize(o.out_dir);
            return 0;
        }

        if (opt_cmd->parsed()) {
            const double T = resolve_transmission(o);
            auto space = advdist::default_search_space(T);
            auto opt = advdist::optimize(T, o.q, space, o.threads);
            const auto& b = opt.best;
            std::printf("SKR*         %.6g%s\n", b.rates.skr,
                        opt.all_negative ? " (all-negative space)" : "");
            std::printf("alpha        %.6g\n", b.alpha);
            std::printf("gamma        %.6g\n", b.gamma);
            std::printf("sigma_x2     %.6g\n", b.sigma_x2);
            std::printf("n            %d\n", b.rates.n);
            std::printf("P_TA         %.6g\n", b.rates.p_ta_av);
            std::printf("P_FA         %.6g\n", b.rates.p_fa_av);
            std::printf("SER          %.6g\n", b.rates.ser_av);
            std::printf("evaluated    %llu (pruned %llu)\n",
                        static_cast<unsigned long long>(opt.evaluated),
                        static_cast<unsigned long long>(opt.pruned));

            Manifest man{"optimize", {}};
            man.params = {{"T", T}, {"q", o.q}};
            if (!o.out_dir.empty()) {
                ordered_json j;
                j["run_id"] = run_id("optimize", man.params);
                j["T"] = T;
                j["q"] = o.q;
                j["skr"] = b.rates.skr;
                j["alpha"] = b.alpha;
                j["gamma"] = b.gamma;
                j["sigma_x2"] = b.sigma_x2;
                j["n"] = b.rates.n;
                j["p_ta"] = b.rates.p_ta_av;
                j["p_fa"] = b.rates.p_fa_av;
                j["ser"] = b.rates.ser_av;
                j["all_negative"] = opt.all_negative;
                j["evaluated"] = opt.evaluated;
                j["pruned"] = opt.pruned;
                j["plob_cv"] = advdist::plob_cv(T);
                j["max_dw"] = advdist::max_dw(T);
                write_file(fs::path(o.out_dir) / "optimize.json", j.dump(2) + "\n");
                man.outputs = {"optimize.json"};
            }
            man.finalize(o.out_dir);
            return 0;
        }

        if (sweep->parsed()) {
            std::vector<double> distances;
            std::stringstream ss(distances_csv);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty())
                    distances.push_back(std::stod(tok));
            if (distances.empty())
                throw CLI::ValidationError("sweep", "--distances must list at least one value");
            auto rows = advdist::distance_sweep(distances, o.q, o.threads);
            for (const auto& r : rows)
                std::printf("d=%.0f km  T=%.3g  SKR*=%.6g  plob=%.6g  max_dw=%.6g\n",
                            r.distance_km, r.transmission, r.best.rates.skr, r.plob,
                            r.maxdw);
            std::string payload, filename;
            if (o.format == "json") {
                ordered_json arr = ordered_json::array();
                for (const auto& r : rows) {
                    arr.push_back({{"distance_km", r.distance_km},
                                   {"transmission", r.transmission},
                                   {"alpha", r.best.alpha},
                                   {"gamma", r.best.gamma},
                                   {"sigma_x2", r.best.sigma_x2},
                                   {"n", r.best.rates.n},
                                   {"skr", r.best.rates.skr},
                                   {"plob_cv", r.plob},
                                   {"max_dw", r.maxdw}});
                }
                payload = arr.dump(2) + "\n";
                filename = "sweep.json";
            } else {
                payload = advdist::sweep_csv(rows);
                filename = "sweep.csv";
            }
            Manifest man{"sweep", {}};
            man.params = {{"q", o.q}, {"distances", distances_csv}};
            if (!o.out_dir.empty()) {
                write_file(fs::path(o.out_dir) / filename, payload);
                man.outputs = {filename};
            } else {
                std::fputs(payload.c_str(), stdout);
            }
            man.finalize(o.out_dir);
            return 0;
        }

        if (repro->parsed()) {
            advdist::ReproReport rep;
            if (target == "table1")
                rep = advdist::reproduce_table1(o.threads);
            else if (target == "fig2")
                rep = advdist::reproduce_fig2(o.threads);
            else if (target == "fig3")
                rep = advdist::reproduce_fig3(o.threads);
            else
                rep = advdist::reproduce_fig5();

            for (const auto& line : rep.lines) {
                const char* status = line.pass      ? "PASS"
                                     : line.counted ? "FAIL"
                                                    : "KNOWN-DEVIATION";
                std::printf("[%s] %s\n", status, line.name.c_str());
                if (!line.detail.empty())
                    std::printf("    %s\n", line.detail.c_str());
            }
            std::printf("%s: %s\n", target.c_str(), rep.pass ? "PASS" : "FAIL");

            Manifest man{"reproduce", {}};
            man.params = {{"target", target}};
            if (!o.out_dir.empty()) {
                const std::string csv_name = target + ".csv";
                write_file(fs::path(o.out_dir) / csv_name, rep.csv);
                ordered_json j;
                j["run_id"] = run_id("reproduce", man.params);
                j["target"] = target;
                j["pass"] = rep.pass;
                j["checks"] = ordered_json::array();
                for (const auto& line : rep.lines) {
                    j["checks"].push_back({{"name", line.name},
                                           {"pass", line.pass},
                                           {"counted", line.counted},
                                           {"detail", line.detail}});
                }
                write_file(fs::path(o.out_dir) / (target + "_report.json"),
                           j.dump(2) + "\n");
                man.outputs = {csv_name, target + "_report.json"};
            }
            man.finalize(o.out_dir);
            return rep.pass ? 0 : kExitTolerance;
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
