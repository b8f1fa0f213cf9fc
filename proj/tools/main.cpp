#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "risura/als.hpp"
#include "risura/harness.hpp"
#include "risura/metrics.hpp"
#include "risura/tensor_io.hpp"
#include "risura/treecode.hpp"

namespace {

using namespace risura;

SystemConfig load_or_default(const std::string& path) {
    if (path.empty()) return SystemConfig{};
    return load_config(path);
}

void apply_phase1_flag(SystemConfig& cfg, const std::string& phase1) {
    if (phase1.empty()) return;
    if (phase1 == "genie") cfg.phase1 = Phase1Estimator::Genie;
    else if (phase1 == "alternating") cfg.phase1 = Phase1Estimator::Alternating;
    else throw CLI::ValidationError("--phase1 must be genie or alternating");
}

void print_trial(const TrialResult& r) {
    std::cout << "seed            " << r.seed << "\n";
    if (r.failed) {
        std::cout << "status          FAILED at stage '" << r.fail_stage << "': " << r.fail_message
                  << "\n";
        return;
    }
    std::cout << "status          ok\n"
              << "K_hat           " << r.K_hat << " (raw columns " << r.K_hat_raw << ")\n"
              << "rank_correct    " << (r.rank_correct ? "yes" : "no") << "\n"
              << "nmse_db         " << format_g9(linear_to_db(r.nmse)) << "\n"
              << "per             " << format_g9(r.per) << "\n"
              << "false_alarms    " << r.false_alarms << "\n"
              << "elbo_final      " << format_g9(r.elbo_final) << "\n"
              << "ctad_sweeps     " << r.ctad_sweeps << (r.ctad_converged ? " (converged)" : "")
              << "\n";
    std::cout << "sent            ";
    for (const auto& h : r.sent_hex) std::cout << h << ' ';
    std::cout << "\ndecoded         ";
    for (const auto& h : r.decoded_hex) std::cout << h << ' ';
    std::cout << "\nwall_s          total " << format_g9(r.wall.total) << " (synth "
              << format_g9(r.wall.synth) << ", phase1 " << format_g9(r.wall.phase1)
              << ", modulate " << format_g9(r.wall.modulate) << ", transmit "
              << format_g9(r.wall.transmit) << ", detect " << format_g9(r.wall.detect)
              << ", decode " << format_g9(r.wall.decode) << ")\n";
}

int cmd_run(const std::string& config, std::uint64_t seed, bool seed_set,
            const std::string& phase1, bool print_config) {
    SystemConfig cfg = load_or_default(config);
    apply_phase1_flag(cfg, phase1);
    if (seed_set) cfg.seed = seed;
    cfg.validate();
    if (print_config) {
        std::cout << emit_config(cfg);
        return 0;
    }
    const TrialResult r = run_trial(cfg, cfg.seed);
    print_trial(r);
    return r.failed ? 1 : 0;
}

int cmd_sweep(const std::string& config, const std::string& axis, std::vector<double> values,
              int trials, bool trials_set, std::uint64_t seed, bool seed_set,
              const std::string& out, int workers, bool workers_set, const std::string& phase1) {
    SystemConfig cfg = load_or_default(config);
    apply_phase1_flag(cfg, phase1);
    if (seed_set) cfg.seed = seed;
    if (trials_set) cfg.trials = trials;
    if (workers_set) cfg.workers = workers;
    const SweepResult sweep = run_sweep(cfg, axis, values, cfg.trials, cfg.workers);
    const std::string csv = write_sweep_outputs(sweep, out);
    std::cout << csv;
    return 0;
}

int cmd_ctad(const std::string& input, int k_init, double delta, int max_sweeps, double tol,
             std::uint64_t seed, const std::string& diag, const std::string& out) {
    const auto records = read_ctb(input);
    std::map<std::string, const ComplexTensor*> by_name;
    for (const auto& [name, t] : records) by_name[name] = &t;

    std::vector<ComplexTensor> Y;
    std::vector<Matrix> P;
    for (int l = 0;; ++l) {
        const auto yit = by_name.find("Y" + std::to_string(l));
        const auto pit = by_name.find("P" + std::to_string(l));
        if (yit == by_name.end() || pit == by_name.end()) break;
        Y.push_back(*yit->second);
        P.push_back(tensor_to_matrix(*pit->second));
    }
    if (Y.empty())
        throw std::runtime_error("ctad: input container must hold records Y0/P0, Y1/P1, ...");

    CtadSchedule sched;
    sched.max_sweeps = max_sweeps;
    sched.tol = tol;
    std::ofstream diag_os;
    std::ostream* diag_ptr = nullptr;
    if (!diag.empty()) {
        diag_os.open(diag);
        if (!diag_os) throw std::runtime_error("ctad: cannot open diagnostics file " + diag);
        diag_ptr = &diag_os;
    }
    const CtadReport rep =
        run_ctad(std::move(Y), std::move(P), k_init, delta, sched, seed, diag_ptr);

    std::cout << "K_hat        " << rep.K_hat << "\n"
              << "beta_mean    " << format_g9(rep.beta_mean) << "\n"
              << "sweeps       " << rep.iterations << (rep.converged ? " (converged)" : "") << "\n"
              << "elbo_final   "
              << format_g9(rep.elbo_trace.empty() ? 0.0 : rep.elbo_trace.back()) << "\n";
    if (!out.empty()) {
        std::vector<NamedTensor> results;
        results.emplace_back("G_hat", matrix_to_tensor(rep.G_hat));
        for (std::size_t l = 0; l < rep.factors.size(); ++l)
            for (std::size_t i = 0; i < rep.factors[l].size(); ++i)
                results.emplace_back("X" + std::to_string(l) + "_" + std::to_string(i),
                                     matrix_to_tensor(rep.factors[l][i]));
        write_ctb(out, results);
    }
    return 0;
}

// quick invariant suites over random instances; detail lives in tests/
int cmd_selftest(std::uint64_t seed) {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };
    Rng rng(seed);

    {  // fold/unfold round trip + Kruskal unfolding identity
        bool ok = true;
        for (int rep = 0; rep < 20 && ok; ++rep) {
            std::vector<Index> shape = {2 + static_cast<Index>(rng.index(3)),
                                        2 + static_cast<Index>(rng.index(3)),
                                        2 + static_cast<Index>(rng.index(3))};
            ComplexTensor t(shape);
            for (Index i = 0; i < t.size(); ++i) t.vec()[i] = rng.cgauss();
            for (int m = 0; m < 3 && ok; ++m)
                ok = (fold(unfold(t, m), m, shape).vec() - t.vec()).norm() == 0.0;
            KruskalFactors f;
            for (Index s : shape) {
                Matrix fm(s, 2);
                for (Index c = 0; c < 2; ++c)
                    for (Index r = 0; r < s; ++r) fm(r, c) = rng.cgauss();
                f.factors.push_back(fm);
            }
            const ComplexTensor kt = kruskal_reconstruct(f);
            for (int m = 0; m < 3 && ok; ++m) {
                const Matrix lhs = unfold(kt, m);
                const Matrix rhs =
                    f.factors[static_cast<std::size_t>(m)] *
                    khatri_rao_chain_excluding(f.factors, m).transpose();
                ok = (lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm());
            }
        }
        check(ok, "tensor algebra identities");
    }

    {  // Gram-Hadamard identity
        bool ok = true;
        for (int rep = 0; rep < 20 && ok; ++rep) {
            Matrix a(4, 3), b(5, 3);
            for (Index j = 0; j < 3; ++j) {
                for (Index i = 0; i < 4; ++i) a(i, j) = rng.cgauss();
                for (Index i = 0; i < 5; ++i) b(i, j) = rng.cgauss();
            }
            const Matrix kr = khatri_rao(a, b);
            const Matrix lhs = kr.adjoint() * kr;
            const Matrix rhs = (a.adjoint() * a).cwiseProduct(b.adjoint() * b);
            ok = (lhs - rhs).norm() <= 1e-12 * rhs.norm();
        }
        check(ok, "Gram-Hadamard identity");
    }

    {  // codec round trip
        TreeCodeProfile prof{3, 12, {0, 6, 12}, 99};
        bool ok = true;
        for (int rep = 0; rep < 10 && ok; ++rep) {
            Bits msg(18);
            for (auto& b : msg) b = rng.bernoulli(0.5) ? 1 : 0;
            std::vector<std::vector<Bits>> lists(3);
            const auto blocks = encode_tree(msg, prof);
            for (int l = 0; l < 3; ++l) lists[static_cast<std::size_t>(l)].push_back(blocks[static_cast<std::size_t>(l)]);
            const auto dec = decode_tree(lists, prof);
            ok = dec.size() == 1 && dec.front() == msg;
        }
        check(ok, "tree code round trip");
    }

    {  // ELBO monotone over sweeps on a small noisy instance
        SystemConfig cfg;
        cfg.M = 4;
        cfg.N1 = cfg.N2 = 2;
        cfg.N1g = cfg.N2g = 2;
        cfg.Ka = 2;
        cfg.K_init = 3;
        cfg.K_total = 16;
        cfg.L = 2;
        cfg.tau = {4, 4};
        cfg.zeta_s = 2;
        cfg.B_total = 12;
        cfg.R = 12;
        cfg.parity = {0, 12};
        cfg.bits_per_mode = {6, 6};
        cfg.tx_power_db = 15;
        Rng crng(derive_seed(seed, 11)), rrng(derive_seed(seed, 12)), nrng(derive_seed(seed, 13));
        auto real = build_realization(cfg, crng, rrng);
        std::vector<std::vector<Matrix>> mf(2);
        for (int l = 0; l < 2; ++l)
            for (int i = 0; i < 2; ++i) {
                Matrix x(4, 2);
                for (Index c = 0; c < 2; ++c)
                    for (Index r = 0; r < 4; ++r) x(r, c) = rng.cgauss();
                mf[static_cast<std::size_t>(l)].push_back(std::sqrt(db_to_linear(15.0) / 4.0) * x);
            }
        auto Y = phase2_rx(real, mf, 1.0, nrng);
        CtadSchedule sched;
        sched.max_sweeps = 30;
        sched.prune_enabled = false;
        const auto rep = run_ctad(Y, real.P, 3, 1e-6, sched, derive_seed(seed, 14));
        bool ok = rep.elbo_trace.size() >= 2;
        for (std::size_t i = 1; i < rep.elbo_trace.size() && ok; ++i)
            ok = rep.elbo_trace[i] >=
                 rep.elbo_trace[i - 1] - 1e-8 * std::abs(rep.elbo_trace[i - 1]);
        check(ok, "ELBO monotone per sweep");
    }

    std::cout << (failures == 0 ? "selftest: all suites passed\n"
                                : "selftest: " + std::to_string(failures) + " suite(s) failed\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-aided unsourced random access link simulator"};
    app.require_subcommand(1);

    std::string config, phase1, out = "sweep.csv", axis, ctb_in, diag, ctad_out;
    std::uint64_t seed = 1;
    int trials = 1, workers = 1, k_init = 8, max_sweeps = 300;
    double delta = 1e-6, tol = 1e-7;
    std::vector<double> values;
    bool print_config = false;

    auto* run = app.add_subcommand("run", "run a single trial and print its report");
    run->add_option("--config", config, "config file (INI schema)");
    auto* run_seed = run->add_option("--seed", seed, "master seed");
    run->add_option("--phase1", phase1, "phase-1 estimator: genie|alternating");
    run->add_flag("--print-config", print_config, "print the effective config and exit");

    auto* sw = app.add_subcommand("sweep", "sweep one config axis and emit CSV + SVG plots");
    sw->add_option("--config", config, "config file (INI schema)");
    sw->add_option("--axis", axis, "config field to sweep")->required();
    sw->add_option("--values", values, "axis values")->required()->expected(-1);
    auto* sw_trials = sw->add_option("--trials", trials, "Monte Carlo trials per value");
    auto* sw_seed = sw->add_option("--seed", seed, "master seed");
    sw->add_option("--out", out, "output CSV path");
    auto* sw_workers = sw->add_option("--workers", workers, "worker threads");
    sw->add_option("--phase1", phase1, "phase-1 estimator: genie|alternating");

    auto* ct = app.add_subcommand("ctad", "run CTAD on tensors from a CTB container");
    ct->add_option("input", ctb_in, "CTB file with records Y0,P0,Y1,P1,...")->required();
    ct->add_option("--kinit", k_init, "column budget");
    ct->add_option("--delta", delta, "hyper-prior constant");
    ct->add_option("--max-sweeps", max_sweeps, "sweep limit");
    ct->add_option("--tol", tol, "relative ELBO tolerance");
    ct->add_option("--seed", seed, "init seed");
    ct->add_option("--diag", diag, "per-sweep diagnostics CSV (sweep, ELBO, K_c, E[beta])");
    ct->add_option("--out", ctad_out, "write G_hat and factor means to this CTB file");

    auto* st = app.add_subcommand("selftest", "run the built-in invariant suites");
    st->add_option("--seed", seed, "suite seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config, seed, run_seed->count() > 0, phase1, print_config);
        if (sw->parsed())
            return cmd_sweep(config, axis, values, trials, sw_trials->count() > 0, seed,
                             sw_seed->count() > 0, out, workers, sw_workers->count() > 0, phase1);
        if (ct->parsed())
            return cmd_ctad(ctb_in, k_init, delta, max_sweeps, tol, seed, diag, ctad_out);
        if (st->parsed()) return cmd_selftest(seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
