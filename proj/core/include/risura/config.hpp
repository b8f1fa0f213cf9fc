#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace risura {

enum class ChannelMode { OnGrid, Physical };
enum class Phase1Estimator { Genie, Alternating };

struct PathLossModel {
    double l0_db = 0.0;       // gain at reference distance, dB
    double d0 = 1.0;          // reference distance, m
    double exp_devris = 2.0;  // device-RIS path-loss exponent
    double exp_risbs = 2.5;   // RIS-BS path-loss exponent
};

// Full scenario description. Defaults are the desk-scale configuration:
// a minutes-scale end-to-end pipeline with normalized path gains.
struct SystemConfig {
    // [arrays]
    int M = 16;    // BS antennas
    int N1 = 8;    // RIS panel rows
    int N2 = 8;    // RIS panel columns
    int N1g = 8;   // grid length for the first axis (>= N1)
    int N2g = 8;   // grid length for the second axis (>= N2)

    // [devices]
    int K_total = 256;  // device population (ID space)
    int Ka = 3;         // active devices
    int K_init = 8;     // column budget for detection (>= Ka)
    int paths_per_device = 4;
    double angular_spread_deg = 15.0;

    // [blocks]
    int L = 3;  // subblocks
    int d = 2;  // tensor order of the data part
    std::vector<int> tau = {8, 8};           // per-mode channel-use factors
    int R = 12;                              // coded bits per block
    int B_total = 18;                        // message bits incl. device ID
    std::vector<int> parity = {0, 6, 12};    // per-block parity bit counts
    std::vector<int> bits_per_mode = {6, 6}; // split of R over the d modes
    std::uint64_t code_seed = 7777;          // parity-equation generator seed
    std::uint64_t constellation_seed = 4242; // sub-constellation codebook seed

    // [channel]
    ChannelMode channel_mode = ChannelMode::OnGrid;
    int zeta_s = 4;  // nonzeros per angular coefficient vector (on-grid mode)
    PathLossModel pathloss;
    double dist_min = 1.0;    // device-RIS distance range, m
    double dist_max = 1.0;
    double dist_risbs = 1.0;  // RIS-BS distance, m

    // [power]
    double tx_power_db = 15.0;  // transmit power (signal scale vs noise_var)
    double noise_var = 1.0;
    double p_on = 0.5;          // phase-1 RIS element "on" probability

    // [phase1]
    Phase1Estimator phase1 = Phase1Estimator::Genie;
    int t_p = 0;                  // phase-1 pilot length; 0 means 4*N
    double phase1_ridge = 1e-6;   // trace-normalized ridge
    int phase1_max_iter = 50;
    double phase1_tol = 1e-9;

    // [ctad]
    double delta = 1e-6;   // gamma hyper-prior constant
    double kappa = 1e6;    // pruning threshold ratio
    int max_sweeps = 300;
    double elbo_tol = 1e-7;
    int prune_start = 20;
    int prune_every = 5;
    int omega_limit = 4096;  // max N_g * K_init for the dense posterior covariance

    // [run]
    std::uint64_t seed = 1;
    int trials = 1;
    int workers = 1;

    int N() const { return N1 * N2; }
    int Ng() const { return N1g * N2g; }
    int tau_total() const;
    int effective_t_p() const { return t_p > 0 ? t_p : 4 * N(); }
    std::vector<int> info_sizes() const;  // R - parity[l] per block

    // Throws std::invalid_argument with a description on any violated invariant.
    void validate() const;
};

// Strict key-value config file (INI sections). Unknown sections or keys are
// rejected. Missing keys keep their defaults.
SystemConfig load_config(const std::string& path);
SystemConfig parse_config(const std::string& text);

// Emits the full schema with current values; parse_config(emit_config(c)) == c.
std::string emit_config(const SystemConfig& cfg);

// Numeric fields addressable as sweep axes. Setting "L" re-derives a
// canonical parity profile for the new block count (see set_block_count).
std::vector<std::string> sweep_axis_names();
void set_sweep_axis(SystemConfig& cfg, const std::string& name, double value);
double get_sweep_axis(const SystemConfig& cfg, const std::string& name);

// Canonical tree-code family for a given L at fixed R: no parity in block 1,
// all-parity last block, half-parity middle blocks. B_total follows.
void set_block_count(SystemConfig& cfg, int L);

}  // namespace risura
