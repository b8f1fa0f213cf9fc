#include <doctest.h>

#include "risura/config.hpp"

using namespace risura;

TEST_CASE("defaults validate and survive an emit/parse round trip") {
    SystemConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    const std::string text = emit_config(cfg);
    const SystemConfig back = parse_config(text);
    CHECK(back.M == cfg.M);
    CHECK(back.tau == cfg.tau);
    CHECK(back.parity == cfg.parity);
    CHECK(back.delta == cfg.delta);
    CHECK(back.seed == cfg.seed);
    CHECK(emit_config(back) == text);
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS(parse_config("[arrays]\nbogus = 1\n"));
    CHECK_THROWS(parse_config("[nonsense]\nM = 4\n"));
    CHECK_THROWS(parse_config("M = 4\n"));  // key outside any section
    CHECK_THROWS(parse_config("[arrays]\nM 4\n"));
}

TEST_CASE("comments and whitespace are tolerated") {
    const SystemConfig cfg = parse_config(
        "# comment\n"
        "[arrays]\n"
        "M = 32   ; trailing\n"
        "\n"
        "[power]\n"
        "tx_power_db = 10\n");
    CHECK(cfg.M == 32);
    CHECK(cfg.tx_power_db == 10.0);
}

TEST_CASE("validation catches the contract violations") {
    SystemConfig cfg;
    cfg.N1g = 4;  // < N1 = 8
    CHECK_THROWS(cfg.validate());

    cfg = SystemConfig{};
    cfg.Ka = 9;  // > K_init = 8
    CHECK_THROWS(cfg.validate());

    cfg = SystemConfig{};
    cfg.parity = {0, 6, 11};  // info sizes no longer sum to B_total
    CHECK_THROWS(cfg.validate());

    cfg = SystemConfig{};
    cfg.parity = {1, 6, 11};  // p_1 != 0
    CHECK_THROWS(cfg.validate());

    cfg = SystemConfig{};
    cfg.parity = {0, 12, 6};  // middle block all parity
    cfg.B_total = 18;
    CHECK_THROWS(cfg.validate());

    cfg = SystemConfig{};
    cfg.bits_per_mode = {5, 6};
    CHECK_THROWS(cfg.validate());

    cfg = SystemConfig{};
    cfg.K_init = 200;
    cfg.K_total = 256;
    CHECK_THROWS(cfg.validate());  // omega_limit guard (64 * 200 > 4096)
}

TEST_CASE("sweep axes read and write config fields") {
    SystemConfig cfg;
    set_sweep_axis(cfg, "M", 32);
    CHECK(cfg.M == 32);
    CHECK(get_sweep_axis(cfg, "M") == 32.0);
    set_sweep_axis(cfg, "tx_power_db", 7.5);
    CHECK(cfg.tx_power_db == 7.5);
    CHECK_THROWS(set_sweep_axis(cfg, "no_such_field", 1.0));
}

TEST_CASE("sweeping L re-derives a consistent tree-code family") {
    SystemConfig cfg;
    set_sweep_axis(cfg, "L", 1);
    CHECK(cfg.L == 1);
    CHECK(cfg.parity == std::vector<int>{0});
    CHECK(cfg.B_total == cfg.R);
    CHECK_NOTHROW(cfg.validate());

    set_sweep_axis(cfg, "L", 4);
    CHECK(cfg.parity == std::vector<int>{0, 6, 6, 12});
    CHECK(cfg.B_total == 12 + 6 + 6 + 0);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("effective phase-1 pilot length defaults to 4N") {
    SystemConfig cfg;
    CHECK(cfg.effective_t_p() == 4 * cfg.N());
    cfg.t_p = 100;
    CHECK(cfg.effective_t_p() == 100);
}
