#include "risura/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace risura {

int SystemConfig::tau_total() const {
    int t = 1;
    for (int ti : tau) t *= ti;
    return t;
}

std::vector<int> SystemConfig::info_sizes() const {
    std::vector<int> b;
    b.reserve(parity.size());
    for (int p : parity) b.push_back(R - p);
    return b;
}

void SystemConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

    if (M < 1 || N1 < 1 || N2 < 1) fail("array sizes must be positive");
    if (N1g < N1 || N2g < N2) fail("grid lengths must satisfy N1g >= N1 and N2g >= N2");
    if (Ka < 0 || K_init < 1) fail("Ka must be >= 0 and K_init >= 1");
    if (Ka > K_init) fail("Ka must not exceed K_init");
    if (K_init > K_total) fail("K_init must not exceed K_total");
    if (L < 1) fail("L must be >= 1");
    if (d < 1) fail("tensor order d must be >= 1");
    if (static_cast<int>(tau.size()) != d) fail("tau must list exactly d mode sizes");
    for (int t : tau)
        if (t < 1) fail("every tau_i must be >= 1");
    if (static_cast<int>(parity.size()) != L) fail("parity profile must list exactly L entries");
    if (parity.front() != 0) fail("first block carries no parity (p_1 == 0)");
    for (std::size_t l = 0; l < parity.size(); ++l) {
        if (parity[l] < 0 || parity[l] > R) fail("parity counts must lie in [0, R]");
        if (l + 1 < parity.size() && parity[l] >= R)
            fail("only the last block may be all parity");
    }
    int info_total = 0;
    for (int p : parity) info_total += R - p;
    if (info_total != B_total) fail("sum of per-block info sizes (R - p_l) must equal B_total");
    if (static_cast<int>(bits_per_mode.size()) != d) fail("bits_per_mode must list d entries");
    int bsum = 0;
    for (int b : bits_per_mode) {
        if (b < 0) fail("bits_per_mode entries must be >= 0");
        bsum += b;
    }
    if (bsum != R) fail("bits_per_mode must sum to R");
    if (zeta_s < 1 || zeta_s > Ng()) fail("zeta_s must lie in [1, N1g*N2g]");
    if (noise_var < 0) fail("noise_var must be >= 0");
    if (p_on < 0 || p_on > 1) fail("p_on must lie in [0, 1]");
    if (dist_min <= 0 || dist_max < dist_min) fail("device-RIS distance range invalid");
    if (dist_risbs <= 0) fail("dist_risbs must be positive");
    if (delta <= 0) fail("delta must be positive");
    if (kappa <= 1) fail("kappa must exceed 1");
    if (max_sweeps < 1) fail("max_sweeps must be >= 1");
    if (trials < 1) fail("trials must be >= 1");
    if (workers < 1) fail("workers must be >= 1");
    if (K_total < (1 << 4) && B_total < 8) fail("message space too small to draw distinct messages");
    const long long nk = static_cast<long long>(Ng()) * K_init;
    if (nk > omega_limit)
        fail("N_g*K_init = " + std::to_string(nk) + " exceeds omega_limit = " +
             std::to_string(omega_limit) +
             ": the dense posterior covariance has (N_g*K)^2 complex entries and each sweep "
             "inverts it at O((N_g*K)^3) cost; reduce the grid or the column budget");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad integer in list for key '" + key + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for key '" + key + "'");
    return out;
}

long long parse_int(const std::string& v, const std::string& key) {
    try {
        return std::stoll(trim(v));
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for key '" + key + "'");
    }
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        return std::stod(trim(v));
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for key '" + key + "'");
    }
}

using Setter = std::function<void(SystemConfig&, const std::string&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    auto i = [](int SystemConfig::* f) {
        return Setter([f](SystemConfig& c, const std::string& v, const std::string& k) {
            c.*f = static_cast<int>(parse_int(v, k));
        });
    };
    auto u64 = [](std::uint64_t SystemConfig::* f) {
        return Setter([f](SystemConfig& c, const std::string& v, const std::string& k) {
            c.*f = static_cast<std::uint64_t>(parse_int(v, k));
        });
    };
    auto dbl = [](double SystemConfig::* f) {
        return Setter([f](SystemConfig& c, const std::string& v, const std::string& k) {
            c.*f = parse_double(v, k);
        });
    };
    auto ilist = [](std::vector<int> SystemConfig::* f) {
        return Setter([f](SystemConfig& c, const std::string& v, const std::string& k) {
            c.*f = parse_int_list(v, k);
        });
    };

    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"arrays",
         {{"M", i(&SystemConfig::M)},
          {"N1", i(&SystemConfig::N1)},
          {"N2", i(&SystemConfig::N2)},
          {"N1g", i(&SystemConfig::N1g)},
          {"N2g", i(&SystemConfig::N2g)}}},
        {"devices",
         {{"K_total", i(&SystemConfig::K_total)},
          {"Ka", i(&SystemConfig::Ka)},
          {"K_init", i(&SystemConfig::K_init)},
          {"paths_per_device", i(&SystemConfig::paths_per_device)},
          {"angular_spread_deg", dbl(&SystemConfig::angular_spread_deg)}}},
        {"blocks",
         {{"L", i(&SystemConfig::L)},
          {"d", i(&SystemConfig::d)},
          {"tau", ilist(&SystemConfig::tau)},
          {"R", i(&SystemConfig::R)},
          {"B_total", i(&SystemConfig::B_total)},
          {"parity", ilist(&SystemConfig::parity)},
          {"bits_per_mode", ilist(&SystemConfig::bits_per_mode)},
          {"code_seed", u64(&SystemConfig::code_seed)},
          {"constellation_seed", u64(&SystemConfig::constellation_seed)}}},
        {"channel",
         {{"mode",
           [](SystemConfig& c, const std::string& v, const std::string&) {
               const std::string m = trim(v);
               if (m == "ongrid") c.channel_mode = ChannelMode::OnGrid;
               else if (m == "physical") c.channel_mode = ChannelMode::Physical;
               else throw std::invalid_argument("config: mode must be 'ongrid' or 'physical'");
           }},
          {"zeta_s", i(&SystemConfig::zeta_s)},
          {"l0_db",
           [](SystemConfig& c, const std::string& v, const std::string& k) {
               c.pathloss.l0_db = parse_double(v, k);
           }},
          {"d0",
           [](SystemConfig& c, const std::string& v, const std::string& k) {
               c.pathloss.d0 = parse_double(v, k);
           }},
          {"exp_devris",
           [](SystemConfig& c, const std::string& v, const std::string& k) {
               c.pathloss.exp_devris = parse_double(v, k);
           }},
          {"exp_risbs",
           [](SystemConfig& c, const std::string& v, const std::string& k) {
               c.pathloss.exp_risbs = parse_double(v, k);
           }},
          {"dist_min", dbl(&SystemConfig::dist_min)},
          {"dist_max", dbl(&SystemConfig::dist_max)},
          {"dist_risbs", dbl(&SystemConfig::dist_risbs)}}},
        {"power",
         {{"tx_power_db", dbl(&SystemConfig::tx_power_db)},
          {"noise_var", dbl(&SystemConfig::noise_var)},
          {"p_on", dbl(&SystemConfig::p_on)}}},
        {"phase1",
         {{"estimator",
           [](SystemConfig& c, const std::string& v, const std::string&) {
               const std::string m = trim(v);
               if (m == "genie") c.phase1 = Phase1Estimator::Genie;
               else if (m == "alternating") c.phase1 = Phase1Estimator::Alternating;
               else throw std::invalid_argument(
                   "config: estimator must be 'genie' or 'alternating'");
           }},
          {"t_p", i(&SystemConfig::t_p)},
          {"ridge", dbl(&SystemConfig::phase1_ridge)},
          {"max_iter", i(&SystemConfig::phase1_max_iter)},
          {"tol", dbl(&SystemConfig::phase1_tol)}}},
        {"ctad",
         {{"delta", dbl(&SystemConfig::delta)},
          {"kappa", dbl(&SystemConfig::kappa)},
          {"max_sweeps", i(&SystemConfig::max_sweeps)},
          {"tol", dbl(&SystemConfig::elbo_tol)},
          {"prune_start", i(&SystemConfig::prune_start)},
          {"prune_every", i(&SystemConfig::prune_every)},
          {"omega_limit", i(&SystemConfig::omega_limit)}}},
        {"run",
         {{"seed", u64(&SystemConfig::seed)},
          {"trials", i(&SystemConfig::trials)},
          {"workers", i(&SystemConfig::workers)}}},
    };
    return s;
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
    SystemConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (schema().find(section) == schema().end())
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unknown section '" + section + "'");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": key outside any section");
        const auto& keys = schema().at(section);
        const auto it = keys.find(key);
        if (it == keys.end())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "' in section [" + section + "]");
        it->second(cfg, value, key);
    }
    cfg.validate();
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

std::string fmt_d(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string emit_config(const SystemConfig& c) {
    std::ostringstream os;
    os << "[arrays]\n"
       << "M = " << c.M << "\n"
       << "N1 = " << c.N1 << "\n"
       << "N2 = " << c.N2 << "\n"
       << "N1g = " << c.N1g << "\n"
       << "N2g = " << c.N2g << "\n\n";
    os << "[devices]\n"
       << "K_total = " << c.K_total << "\n"
       << "Ka = " << c.Ka << "\n"
       << "K_init = " << c.K_init << "\n"
       << "paths_per_device = " << c.paths_per_device << "\n"
       << "angular_spread_deg = " << fmt_d(c.angular_spread_deg) << "\n\n";
    os << "[blocks]\n"
       << "L = " << c.L << "\n"
       << "d = " << c.d << "\n"
       << "tau = " << join_ints(c.tau) << "\n"
       << "R = " << c.R << "\n"
       << "B_total = " << c.B_total << "\n"
       << "parity = " << join_ints(c.parity) << "\n"
       << "bits_per_mode = " << join_ints(c.bits_per_mode) << "\n"
       << "code_seed = " << c.code_seed << "\n"
       << "constellation_seed = " << c.constellation_seed << "\n\n";
    os << "[channel]\n"
       << "mode = " << (c.channel_mode == ChannelMode::OnGrid ? "ongrid" : "physical") << "\n"
       << "zeta_s = " << c.zeta_s << "\n"
       << "l0_db = " << fmt_d(c.pathloss.l0_db) << "\n"
       << "d0 = " << fmt_d(c.pathloss.d0) << "\n"
       << "exp_devris = " << fmt_d(c.pathloss.exp_devris) << "\n"
       << "exp_risbs = " << fmt_d(c.pathloss.exp_risbs) << "\n"
       << "dist_min = " << fmt_d(c.dist_min) << "\n"
       << "dist_max = " << fmt_d(c.dist_max) << "\n"
       << "dist_risbs = " << fmt_d(c.dist_risbs) << "\n\n";
    os << "[power]\n"
       << "tx_power_db = " << fmt_d(c.tx_power_db) << "\n"
       << "noise_var = " << fmt_d(c.noise_var) << "\n"
       << "p_on = " << fmt_d(c.p_on) << "\n\n";
    os << "[phase1]\n"
       << "estimator = " << (c.phase1 == Phase1Estimator::Genie ? "genie" : "alternating") << "\n"
       << "t_p = " << c.t_p << "\n"
       << "ridge = " << fmt_d(c.phase1_ridge) << "\n"
       << "max_iter = " << c.phase1_max_iter << "\n"
       << "tol = " << fmt_d(c.phase1_tol) << "\n\n";
    os << "[ctad]\n"
       << "delta = " << fmt_d(c.delta) << "\n"
       << "kappa = " << fmt_d(c.kappa) << "\n"
       << "max_sweeps = " << c.max_sweeps << "\n"
       << "tol = " << fmt_d(c.elbo_tol) << "\n"
       << "prune_start = " << c.prune_start << "\n"
       << "prune_every = " << c.prune_every << "\n"
       << "omega_limit = " << c.omega_limit << "\n\n";
    os << "[run]\n"
       << "seed = " << c.seed << "\n"
       << "trials = " << c.trials << "\n"
       << "workers = " << c.workers << "\n";
    return os.str();
}

void set_block_count(SystemConfig& cfg, int L) {
    if (L < 1) throw std::invalid_argument("block count must be >= 1");
    cfg.L = L;
    cfg.parity.assign(static_cast<std::size_t>(L), 0);
    if (L >= 2) {
        for (int l = 1; l + 1 < L; ++l) cfg.parity[static_cast<std::size_t>(l)] = cfg.R / 2;
        cfg.parity.back() = cfg.R;
    }
    int info = 0;
    for (int p : cfg.parity) info += cfg.R - p;
    cfg.B_total = info;
}

namespace {

struct Axis {
    std::function<double(const SystemConfig&)> get;
    std::function<void(SystemConfig&, double)> set;
};

const std::map<std::string, Axis>& axes() {
    auto iax = [](int SystemConfig::* f) {
        return Axis{[f](const SystemConfig& c) { return static_cast<double>(c.*f); },
                    [f](SystemConfig& c, double v) { c.*f = static_cast<int>(std::llround(v)); }};
    };
    auto dax = [](double SystemConfig::* f) {
        return Axis{[f](const SystemConfig& c) { return c.*f; },
                    [f](SystemConfig& c, double v) { c.*f = v; }};
    };
    static const std::map<std::string, Axis> a = {
        {"M", iax(&SystemConfig::M)},
        {"N1", iax(&SystemConfig::N1)},
        {"N2", iax(&SystemConfig::N2)},
        {"N1g", iax(&SystemConfig::N1g)},
        {"N2g", iax(&SystemConfig::N2g)},
        {"K_total", iax(&SystemConfig::K_total)},
        {"Ka", iax(&SystemConfig::Ka)},
        {"K_init", iax(&SystemConfig::K_init)},
        {"paths_per_device", iax(&SystemConfig::paths_per_device)},
        {"angular_spread_deg", dax(&SystemConfig::angular_spread_deg)},
        {"L",
         Axis{[](const SystemConfig& c) { return static_cast<double>(c.L); },
              [](SystemConfig& c, double v) { set_block_count(c, static_cast<int>(std::llround(v))); }}},
        {"zeta_s", iax(&SystemConfig::zeta_s)},
        {"tx_power_db", dax(&SystemConfig::tx_power_db)},
        {"noise_var", dax(&SystemConfig::noise_var)},
        {"p_on", dax(&SystemConfig::p_on)},
        {"t_p", iax(&SystemConfig::t_p)},
        {"dist_min", dax(&SystemConfig::dist_min)},
        {"dist_max", dax(&SystemConfig::dist_max)},
        {"dist_risbs", dax(&SystemConfig::dist_risbs)},
    };
    return a;
}

}  // namespace

std::vector<std::string> sweep_axis_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : axes()) out.push_back(k);
    return out;
}

void set_sweep_axis(SystemConfig& cfg, const std::string& name, double value) {
    const auto it = axes().find(name);
    if (it == axes().end()) throw std::invalid_argument("unknown sweep axis: " + name);
    it->second.set(cfg, value);
}

double get_sweep_axis(const SystemConfig& cfg, const std::string& name) {
    const auto it = axes().find(name);
    if (it == axes().end()) throw std::invalid_argument("unknown sweep axis: " + name);
    return it->second.get(cfg);
}

}  // namespace risura
