#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risura/airlink.hpp"
#include "risura/config.hpp"
#include "risura/ctad.hpp"
#include "risura/modem.hpp"

namespace risura {

struct StageTimes {
    double synth = 0;     // channel + RIS pattern generation
    double phase1 = 0;    // RIS-BS estimation
    double modulate = 0;  // tree encoding + tensor modulation
    double transmit = 0;  // received-signal synthesis
    double detect = 0;    // CTAD inference
    double decode = 0;    // demapping + tree stitching + metrics
    double total = 0;
};

struct TrialResult {
    std::uint64_t seed = 0;
    bool failed = false;
    std::string fail_stage;
    std::string fail_message;

    int K_hat = 0;            // reported rank after the energy threshold
    int K_hat_raw = 0;        // surviving CTAD columns
    bool rank_correct = false;
    double nmse = 1.0;        // linear scale
    double per = 1.0;
    int false_alarms = 0;
    double elbo_final = 0.0;
    int ctad_sweeps = 0;
    bool ctad_converged = false;
    std::vector<std::string> sent_hex;
    std::vector<std::string> decoded_hex;
    StageTimes wall;
};

// generate -> transmit -> detect -> demap -> stitch -> score, fully
// deterministic given (cfg, seed). Module errors mark the trial failed with
// a stage tag instead of propagating.
TrialResult run_trial(const SystemConfig& cfg, std::uint64_t seed);

// Components surviving pruning are reported only if their reconstructed
// energy clears a rank-1 noise-fit floor estimated from E[beta]. Returns
// the kept column indices.
std::vector<Index> reported_components(const CtadReport& rep, const CtadProblem& pb);

struct SweepRow {
    double axis_value = 0;
    double nmse_db = 0;        // 10 log10 of the mean linear NMSE
    double per = 0;
    double pr_rank = 0;        // Pr(K_hat == Ka)
    double k_hat_mean = 0;
    double wall_mean = 0;      // seconds per trial
    int failures = 0;
    double false_alarm_mean = 0;
    std::vector<TrialResult> trials;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
};

// T_r seeded trials per axis value, run on up to `workers` threads.
// Per-trial seeds derive from (master seed, value index, trial index), so
// results are independent of scheduling order.
SweepResult run_sweep(const SystemConfig& base, const std::string& axis,
                      const std::vector<double>& values, int trials, int workers);

// CSV with one header row and 9-significant-digit floats; byte-identical
// for identical config and master seed.
std::string sweep_csv(const SweepResult& sweep);

// Writes the CSV to out_path and one SVG per metric next to it
// (<stem>_nmse_db.svg etc.). Returns the CSV text.
std::string write_sweep_outputs(const SweepResult& sweep, const std::string& out_path);

std::string format_g9(double v);

}  // namespace risura
