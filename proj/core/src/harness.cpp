#include "risura/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include "risura/metrics.hpp"
#include "risura/phase1.hpp"
#include "risura/svgplot.hpp"
#include "risura/treecode.hpp"

namespace risura {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// stage tags for per-stage RNG streams
enum StreamTag : std::uint64_t {
    kChannel = 1,
    kRisPattern = 2,
    kMessages = 3,
    kPhase1Noise = 4,
    kPhase2Noise = 5,
    kCtadInit = 6,
};

std::vector<Bits> draw_distinct_messages(int count, int bits, Rng& rng) {
    std::set<Bits> seen;
    std::vector<Bits> out;
    while (static_cast<int>(out.size()) < count) {
        Bits m(static_cast<std::size_t>(bits));
        for (auto& b : m) b = rng.bernoulli(0.5) ? 1 : 0;
        if (seen.insert(m).second) out.push_back(std::move(m));
    }
    return out;
}

}  // namespace

std::vector<Index> reported_components(const CtadReport& rep, const CtadProblem& pb) {
    // rank-1 fit of pure noise captures about noise_var*(sqrt(prod tau)+sqrt(M))^2
    // per block; demand a 3x margin over that floor
    double tau_prod = 1.0;
    for (Index t : pb.tau) tau_prod *= static_cast<double>(t);
    const double noise_var_hat = 1.0 / std::max(rep.beta_mean, 1e-300);
    const double floor = std::pow(std::sqrt(tau_prod) + std::sqrt(static_cast<double>(pb.M)), 2.0);
    const double threshold = 3.0 * static_cast<double>(pb.L) * floor * noise_var_hat;

    std::vector<Index> kept;
    for (Index k = 0; k < rep.K_hat; ++k) {
        double energy = 0.0;
        for (int l = 0; l < pb.L; ++l) {
            double mode_prod = 1.0;
            for (int i = 0; i < pb.d; ++i)
                mode_prod *= rep.factors[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)]
                                 .col(k)
                                 .squaredNorm();
            energy += mode_prod *
                      (pb.P[static_cast<std::size_t>(l)] * rep.G_hat.col(k)).squaredNorm();
        }
        if (energy > threshold) kept.push_back(k);
    }
    return kept;
}

TrialResult run_trial(const SystemConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    TrialResult res;
    res.seed = seed;
    const auto t_start = Clock::now();
    std::string stage = "setup";
    try {
        // channels and reflection patterns
        stage = "synth";
        auto t0 = Clock::now();
        Rng chan_rng(derive_seed(seed, kChannel));
        Rng ris_rng(derive_seed(seed, kRisPattern));
        ChannelRealization real = build_realization(cfg, chan_rng, ris_rng);
        res.wall.synth = seconds_since(t0);

        // phase 1: RIS-BS matrix
        stage = "phase1";
        t0 = Clock::now();
        Matrix U_hat;
        if (cfg.phase1 == Phase1Estimator::Genie) {
            U_hat = estimate_u_genie(real).U_hat;
        } else {
            Rng p1_rng(derive_seed(seed, kPhase1Noise));
            Vector g1(cfg.effective_t_p());
            for (Index t = 0; t < g1.size(); ++t) g1[t] = p1_rng.cgauss();
            const double power = db_to_linear(cfg.tx_power_db);
            const Matrix Y1 = phase1_rx(real.U, real.h.col(0), std::sqrt(power) * g1,
                                        real.V_phase1, cfg.noise_var, p1_rng);
            Phase1Options opts;
            opts.ridge = cfg.phase1_ridge;
            opts.max_iter = cfg.phase1_max_iter;
            opts.tol = cfg.phase1_tol;
            U_hat = estimate_u_alternating(Y1, real.V_phase1, std::sqrt(power) * g1, opts).U_hat;
        }
        std::vector<Matrix> P_hat;
        P_hat.reserve(real.v_phase2.size());
        for (const auto& v : real.v_phase2) P_hat.push_back(effective_mixing(U_hat, real.A_R, v));
        res.wall.phase1 = seconds_since(t0);

        // messages -> blocks -> rank-1 signals
        stage = "modulate";
        t0 = Clock::now();
        Rng msg_rng(derive_seed(seed, kMessages));
        const auto profile = TreeCodeProfile::from_config(cfg);
        const auto constellations = build_constellations(cfg);
        const auto messages = draw_distinct_messages(cfg.Ka, cfg.B_total, msg_rng);
        const double power = db_to_linear(cfg.tx_power_db);

        std::vector<std::vector<Matrix>> mode_factors(static_cast<std::size_t>(cfg.L));
        for (int l = 0; l < cfg.L; ++l)
            for (int i = 0; i < cfg.d; ++i)
                mode_factors[static_cast<std::size_t>(l)].push_back(
                    Matrix::Zero(cfg.tau[static_cast<std::size_t>(i)], cfg.Ka));
        for (int k = 0; k < cfg.Ka; ++k) {
            res.sent_hex.push_back(bits_to_hex(messages[static_cast<std::size_t>(k)]));
            const auto blocks = encode_tree(messages[static_cast<std::size_t>(k)], profile);
            for (int l = 0; l < cfg.L; ++l) {
                const auto mapped =
                    map_bits_to_signal(blocks[static_cast<std::size_t>(l)], constellations, power);
                for (int i = 0; i < cfg.d; ++i)
                    mode_factors[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)].col(k) =
                        mapped.mode_vectors[static_cast<std::size_t>(i)];
            }
        }
        res.wall.modulate = seconds_since(t0);

        // over-the-air synthesis uses the true channels
        stage = "transmit";
        t0 = Clock::now();
        Rng noise_rng(derive_seed(seed, kPhase2Noise));
        auto Y = phase2_rx(real, mode_factors, cfg.noise_var, noise_rng);
        res.wall.transmit = seconds_since(t0);

        // joint separation + channel estimation
        stage = "detect";
        t0 = Clock::now();
        CtadSchedule sched;
        sched.max_sweeps = cfg.max_sweeps;
        sched.tol = cfg.elbo_tol;
        sched.prune_start = cfg.prune_start;
        sched.prune_every = cfg.prune_every;
        sched.kappa = cfg.kappa;
        sched.omega_limit = cfg.omega_limit;
        const CtadProblem pb = CtadProblem::build(std::move(Y), std::move(P_hat));
        const CtadReport rep =
            run_ctad(pb, cfg.K_init, cfg.delta, sched, derive_seed(seed, kCtadInit));
        res.wall.detect = seconds_since(t0);
        res.elbo_final = rep.elbo_trace.empty() ? 0.0 : rep.elbo_trace.back();
        res.ctad_sweeps = rep.iterations;
        res.ctad_converged = rep.converged;
        res.K_hat_raw = static_cast<int>(rep.K_hat);

        // demap each reported component per block, stitch, score
        stage = "decode";
        t0 = Clock::now();
        const auto kept = reported_components(rep, pb);
        res.K_hat = static_cast<int>(kept.size());
        res.rank_correct = res.K_hat == cfg.Ka;

        Matrix g_kept(cfg.Ng(), static_cast<Index>(kept.size()));
        for (std::size_t j = 0; j < kept.size(); ++j) g_kept.col(static_cast<Index>(j)) = rep.G_hat.col(kept[j]);
        res.nmse = cfg.Ka > 0 ? nmse(real.lambda, g_kept) : 0.0;

        std::vector<std::vector<Bits>> lists(static_cast<std::size_t>(cfg.L));
        for (Index k : kept) {
            for (int l = 0; l < cfg.L; ++l) {
                Bits frag;
                bool ok = true;
                for (int i = 0; i < cfg.d && ok; ++i) {
                    const Vector x =
                        rep.factors[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)].col(k);
                    if (x.norm() == 0.0) {
                        ok = false;
                        break;
                    }
                    const auto [idx, conf] =
                        demap_mode(x, constellations[static_cast<std::size_t>(i)]);
                    const Bits group =
                        index_to_bits(idx, constellations[static_cast<std::size_t>(i)].bits);
                    frag.insert(frag.end(), group.begin(), group.end());
                }
                if (ok) lists[static_cast<std::size_t>(l)].push_back(std::move(frag));
            }
        }
        const auto decoded = decode_tree(lists, profile);
        for (const auto& m : decoded) res.decoded_hex.push_back(bits_to_hex(m));
        res.per = cfg.Ka > 0 ? packet_error_rate(messages, decoded, cfg.Ka) : 0.0;
        res.false_alarms = false_alarm_count(messages, decoded);
        res.wall.decode = seconds_since(t0);
    } catch (const std::exception& e) {
        res.failed = true;
        res.fail_stage = stage;
        res.fail_message = e.what();
    }
    res.wall.total = seconds_since(t_start);
    return res;
}

SweepResult run_sweep(const SystemConfig& base, const std::string& axis,
                      const std::vector<double>& values, int trials, int workers) {
    SweepResult sweep;
    sweep.axis = axis;
    if (values.empty()) throw std::invalid_argument("sweep: no axis values");
    if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");

    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        SystemConfig cfg = base;
        set_sweep_axis(cfg, axis, values[vi]);
        cfg.validate();

        std::vector<TrialResult> results(static_cast<std::size_t>(trials));
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= trials) return;
                const std::uint64_t trial_seed = derive_seed(
                    base.seed, (static_cast<std::uint64_t>(vi) << 32) |
                                   static_cast<std::uint64_t>(t));
                results[static_cast<std::size_t>(t)] = run_trial(cfg, trial_seed);
            }
        };
        const int nw = std::max(1, std::min(workers, trials));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();

        SweepRow row;
        row.axis_value = values[vi];
        double nmse_sum = 0, per_sum = 0, khat_sum = 0, wall_sum = 0, fa_sum = 0;
        int rank_ok = 0, ok = 0;
        for (const auto& r : results) {
            if (r.failed) {
                ++row.failures;
                continue;
            }
            ++ok;
            nmse_sum += r.nmse;
            per_sum += r.per;
            khat_sum += r.K_hat;
            wall_sum += r.wall.total;
            fa_sum += r.false_alarms;
            rank_ok += r.rank_correct ? 1 : 0;
        }
        if (ok > 0) {
            row.nmse_db = linear_to_db(nmse_sum / ok);
            row.per = per_sum / ok;
            row.pr_rank = static_cast<double>(rank_ok) / ok;
            row.k_hat_mean = khat_sum / ok;
            row.wall_mean = wall_sum / ok;
            row.false_alarm_mean = fa_sum / ok;
        } else {
            row.nmse_db = row.per = row.pr_rank = row.k_hat_mean = row.wall_mean =
                row.false_alarm_mean = std::numeric_limits<double>::quiet_NaN();
        }
        row.trials = std::move(results);
        sweep.rows.push_back(std::move(row));
    }
    return sweep;
}

std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string sweep_csv(const SweepResult& sweep) {
    std::string csv = sweep.axis +
                      ",nmse_db,per,pr_rank_success,k_hat_mean,wall_s_mean,failures,"
                      "false_alarm_mean\n";
    for (const auto& r : sweep.rows) {
        csv += format_g9(r.axis_value);
        csv += ',' + format_g9(r.nmse_db);
        csv += ',' + format_g9(r.per);
        csv += ',' + format_g9(r.pr_rank);
        csv += ',' + format_g9(r.k_hat_mean);
        csv += ',' + format_g9(r.wall_mean);
        csv += ',' + std::to_string(r.failures);
        csv += ',' + format_g9(r.false_alarm_mean);
        csv += '\n';
    }
    return csv;
}

std::string write_sweep_outputs(const SweepResult& sweep, const std::string& out_path) {
    const std::string csv = sweep_csv(sweep);
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("sweep: cannot open output: " + out_path);
    os << csv;
    os.close();

    std::vector<double> xs;
    for (const auto& r : sweep.rows) xs.push_back(r.axis_value);
    const std::filesystem::path p(out_path);
    const std::string stem = (p.parent_path() / p.stem()).string();
    auto plot = [&](const std::string& metric, auto getter) {
        std::vector<double> ys;
        for (const auto& r : sweep.rows) ys.push_back(getter(r));
        write_line_svg(stem + "_" + metric + ".svg", metric + " vs " + sweep.axis, sweep.axis,
                       metric, xs, ys);
    };
    plot("nmse_db", [](const SweepRow& r) { return r.nmse_db; });
    plot("per", [](const SweepRow& r) { return r.per; });
    plot("pr_rank_success", [](const SweepRow& r) { return r.pr_rank; });
    plot("k_hat_mean", [](const SweepRow& r) { return r.k_hat_mean; });
    plot("wall_s_mean", [](const SweepRow& r) { return r.wall_mean; });
    return csv;
}

}  // namespace risura
