// marn-sim: Monte Carlo link-level simulator for multi-access relay networks.
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "marn/destination.hpp"
#include "marn/harness.hpp"
#include "marn/icrelay.hpp"

namespace {

using marn::ConfigError;

double parse_num(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " value '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t p = s.find(sep, start);
        out.push_back(s.substr(start, p == std::string::npos ? p : p - start));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    return out;
}

// "start:step:stop" (inclusive) or a comma list.
std::vector<double> parse_snr_grid(const std::string& s) {
    std::vector<double> grid;
    if (s.find(':') != std::string::npos) {
        const auto f = split(s, ':');
        if (f.size() != 3) throw ConfigError("--snr-db range must be start:step:stop");
        const double a = parse_num(f[0], "--snr-db");
        const double step = parse_num(f[1], "--snr-db");
        const double b = parse_num(f[2], "--snr-db");
        if (step <= 0 || b < a) throw ConfigError("--snr-db range must increase");
        for (double v = a; v <= b + 1e-9; v += step) grid.push_back(v);
    } else {
        for (const auto& tok : split(s, ',')) grid.push_back(parse_num(tok, "--snr-db"));
    }
    return grid;
}

// "lo:hi" or "lo:hi:n" (log-spaced, default 9 points) or a comma list.
std::vector<double> parse_eps_grid(const std::string& s) {
    std::vector<double> grid;
    if (s.find(':') != std::string::npos) {
        const auto f = split(s, ':');
        if (f.size() != 2 && f.size() != 3)
            throw ConfigError("--eps range must be lo:hi or lo:hi:count");
        const double lo = parse_num(f[0], "--eps");
        const double hi = parse_num(f[1], "--eps");
        const int n = f.size() == 3 ? static_cast<int>(parse_num(f[2], "--eps")) : 9;
        if (lo <= 0 || hi <= lo || n < 2) throw ConfigError("--eps range must satisfy 0 < lo < hi");
        for (int i = 0; i < n; ++i)
            grid.push_back(std::pow(10.0, std::log10(lo) +
                                              (std::log10(hi) - std::log10(lo)) * i / (n - 1)));
    } else {
        for (const auto& tok : split(s, ',')) grid.push_back(parse_num(tok, "--eps"));
    }
    return grid;
}

// Config files split comma-separated values into multiple tokens before they
// reach a string option; collect them as a vector and stitch them back.
std::string join_csv(const std::vector<std::string>& v, const std::string& dflt) {
    if (v.empty()) return dflt;
    std::string out = v[0];
    for (size_t i = 1; i < v.size(); ++i) out += "," + v[i];
    return out;
}

marn::NetworkConfig parse_network(const std::string& s) {
    const auto f = split(s, ',');
    if (f.size() != 4) throw ConfigError("--network must be J,Ja,Ra,M");
    marn::NetworkConfig net;
    net.J = static_cast<int>(parse_num(f[0], "--network"));
    net.Ja = static_cast<int>(parse_num(f[1], "--network"));
    net.Ra = static_cast<int>(parse_num(f[2], "--network"));
    net.M = static_cast<int>(parse_num(f[3], "--network"));
    return net;
}

marn::Rational parse_rational(const std::string& s) {
    const auto f = split(s, '/');
    if (f.size() == 1)
        return marn::Rational(static_cast<long long>(parse_num(f[0], "--Ro")));
    if (f.size() != 2) throw ConfigError("--Ro must be an integer or num/den");
    return marn::Rational(static_cast<long long>(parse_num(f[0], "--Ro")),
                          static_cast<long long>(parse_num(f[1], "--Ro")));
}

// ---------------------------------------------------------------- check suites

bool check_zf() {
    const std::pair<int, int> shapes[] = {{2, 2}, {2, 4}, {3, 4}, {4, 4}};
    double worst = 0.0;
    for (const auto& [J, Ra] : shapes) {
        marn::NetworkConfig cfg;
        cfg.J = J;
        cfg.Ja = 2;
        cfg.Ra = Ra;
        cfg.M = 1;
        cfg.validate();
        const std::vector<marn::CMat> r(cfg.Ra, marn::CMat::zeros(cfg.pad(), 1));
        for (uint64_t t = 0; t < 1000; ++t) {
            marn::RandomStream rng(9001, t);
            const auto ch = marn::draw_channel(cfg, rng);
            const auto subs = marn::separate_subsystems(cfg, r, ch);
            for (const auto& sub : subs) {
                marn::IcResult ic;
                try {
                    ic = marn::cancel_interference(cfg, sub, 0);
                } catch (const marn::DegenerateChannel&) {
                    continue;
                }
                for (int j = 1; j < J; ++j) {
                    const double num = (ic.canceller * sub.Fblk[j]).norm();
                    worst = std::max(worst, num / sub.Fblk[j].norm());
                }
            }
        }
    }
    std::cout << "zf: max leaked interference fraction " << worst << " over 4 shapes x 1000 channels: "
              << (worst <= 1e-10 ? "PASS" : "FAIL") << "\n";
    return worst <= 1e-10;
}

bool check_lemma2() {
    bool ok = true;
    const int nets[][4] = {{2, 2, 2, 1}, {2, 2, 4, 2}};
    for (const auto& n : nets) {
        marn::NetworkConfig cfg;
        cfg.J = n[0];
        cfg.Ja = n[1];
        cfg.Ra = n[2];
        cfg.M = n[3];
        cfg.validate();
        const uint64_t v = marn::check_lemma2_bound(cfg, 100000, 42);
        std::cout << "lemma2: (" << n[0] << ',' << n[1] << ',' << n[2] << ',' << n[3]
                  << ") violations " << v << "/100000: " << (v == 0 ? "PASS" : "FAIL") << "\n";
        ok = ok && v == 0;
    }
    return ok;
}

bool check_covariance() {
    marn::NetworkConfig cfg;
    cfg.J = 2;
    cfg.Ja = 2;
    cfg.Ra = 2;
    cfg.M = 1;
    cfg.validate();
    marn::RandomStream ch_rng(7, 0);
    const auto ch = marn::draw_channel(cfg, ch_rng);
    const std::vector<marn::CMat> zeros(1, marn::CMat::zeros(cfg.pad(), cfg.pad()));
    const std::vector<marn::CMat> zvec(cfg.Ra, marn::CMat::zeros(cfg.pad(), 1));

    // noise-only soft estimates: covariance should be (L / gamma_l) I_2
    const int draws = 20000;
    double s_oo = 0, s_ee = 0;
    marn::cplx s_oe = 0;
    double gamma_l = 0;
    std::vector<marn::CMat> cw(cfg.J, marn::CMat::zeros(cfg.pad(), cfg.pad()));
    for (int t = 0; t < draws; ++t) {
        marn::RandomStream rng(8, t);
        const auto r = marn::phase1_receive(cfg, ch, cw, cfg.P, &rng);
        const auto subs = marn::separate_subsystems(cfg, r, ch);
        const auto soft = marn::mrc_combine(marn::cancel_interference(cfg, subs[0], 0));
        gamma_l = soft.gamma_l;
        s_oo += std::norm(soft.odd);
        s_ee += std::norm(soft.even);
        s_oe += soft.odd * std::conj(soft.even);
    }
    const double target = cfg.L() / gamma_l;
    const double dev = std::max({std::abs(s_oo / draws - target) / target,
                                 std::abs(s_ee / draws - target) / target,
                                 std::abs(s_oe / double(draws)) / target});
    std::cout << "covariance: combiner noise vs (L/gamma_l) I deviation " << dev << ": "
              << (dev <= 0.1 ? "PASS" : "FAIL") << "\n";

    // fast path equivalent-noise variance vs the general formula
    double worst = 0.0;
    const double c = marn::relay_norm_c(1.0, 2, 2, 2, 2);
    for (uint64_t t = 0; t < 1000; ++t) {
        marn::RandomStream rng(9, t);
        const auto chl = marn::draw_channel(cfg, rng);
        marn::EquivalentSystem sys;
        try {
            const auto subs = marn::separate_subsystems(cfg, zvec, chl);
            sys.gamma_l = {marn::mrc_combine(marn::cancel_interference(cfg, subs[0], 0)).gamma_l};
        } catch (const marn::DegenerateChannel&) {
            continue;
        }
        sys.x = {0.0};
        sys.gamma_gv = marn::gamma_g(chl.G[0]);
        sys.c = c;
        sys.P = 1.0;
        sys.Ja = cfg.Ja;
        const double general = sys.sigma_u()[0];
        const double fast = marn::fast_noise_sigma(c, 1.0 / sys.gamma_l[0], chl.G[0](0, 0),
                                                   chl.G[0](1, 0)) /
                            sys.gamma_gv;
        worst = std::max(worst, std::abs(general - fast) / std::max(1.0, general));
    }
    std::cout << "covariance: fast vs general equivalent noise, max relative gap " << worst
              << ": " << (worst <= 1e-12 ? "PASS" : "FAIL") << "\n";
    return dev <= 0.1 && worst <= 1e-12;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo link-level simulator for multi-access relay networks"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Config file: ini with one [section] per subcommand (flags override)");

    // ------------------------------------------------------------- sweep
    auto* sweep = app.add_subcommand("sweep", "BER sweep over an SNR grid");
    sweep->fallthrough();
    std::string sw_scheme = "ic-relay-tdma";
    std::vector<std::string> sw_net_v, sw_snr_v, sw_plot_v;
    std::string sw_mod, sw_design, sw_out, sw_format = "csv";
    double sw_trials = 1e6, sw_target = 200, sw_batch = 4096;
    uint64_t sw_seed = 42;
    int sw_workers = 1;
    sweep->add_option("--scheme", sw_scheme, "Transmission scheme")->capture_default_str();
    sweep->add_option("--network", sw_net_v, "J,Ja,Ra,M")->default_str("2,2,2,1");
    sweep->add_option("--snr-db", sw_snr_v, "start:step:stop or comma list")
        ->default_str("10:2:40");
    sweep->add_option("--trials", sw_trials, "Max trials per SNR point")->capture_default_str();
    sweep->add_option("--target-errors", sw_target, "Early-stop aggregate bit errors (0 = none)")
        ->capture_default_str();
    sweep->add_option("--mod", sw_mod, "bpsk|qpsk|8psk|16psk (default: scheme's)");
    sweep->add_option("--design", sw_design, "Forwarding design (default: matches Ra)");
    sweep->add_option("--seed", sw_seed, "RNG seed")->capture_default_str();
    sweep->add_option("--workers", sw_workers, "Worker threads")->capture_default_str();
    sweep->add_option("--batch", sw_batch, "Trials per scheduling batch")->capture_default_str();
    sweep->add_option("--out", sw_out, "Output path (default: stdout)");
    sweep->add_option("--format", sw_format, "csv|json")->capture_default_str();
    sweep->add_option("--plot-cols", sw_plot_v, "Print a two-column extract, e.g. snr_db,ber");

    // ------------------------------------------------------------- outage
    auto* outage = app.add_subcommand("outage", "Outage probability of the receive SNR");
    outage->fallthrough();
    std::vector<std::string> ou_net_v, ou_eps_v;
    std::string ou_var = "gamma";
    double ou_trials = 1e7;
    uint64_t ou_seed = 42;
    int ou_workers = 1;
    outage->add_option("--network", ou_net_v, "J,Ja,Ra,M")->default_str("2,2,2,1");
    outage->add_option("--eps", ou_eps_v, "lo:hi[:count] (log-spaced) or comma list")
        ->default_str("1e-3:1e-1");
    outage->add_option("--trials", ou_trials, "Channel draws")->capture_default_str();
    outage->add_option("--seed", ou_seed, "RNG seed")->capture_default_str();
    outage->add_option("--workers", ou_workers, "Worker threads")->capture_default_str();
    outage->add_option("--variable", ou_var, "gamma | gamma-g")->capture_default_str();

    // ------------------------------------------------------------- check
    auto* check = app.add_subcommand("check", "Built-in numerical self-checks");
    check->fallthrough();
    std::string ck_suite;
    check->add_option("--suite", ck_suite, "zf|lemma2|covariance")
        ->required()
        ->check(CLI::IsMember({"zf", "lemma2", "covariance"}));

    // ------------------------------------------------------------- rate
    auto* rate = app.add_subcommand("rate", "Symbols per user per channel use");
    rate->fallthrough();
    std::string rt_scheme = "ic-relay-tdma", rt_ro = "1";
    int rt_j = 2;
    rate->add_option("--scheme", rt_scheme, "Transmission scheme")->capture_default_str();
    rate->add_option("--J", rt_j, "Number of sources")->capture_default_str();
    rate->add_option("--Ro", rt_ro, "Forwarding design rate, e.g. 3/4")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(sweep)) {
            const std::string sw_plot = join_csv(sw_plot_v, "");
            marn::SweepSpec spec;
            spec.scheme = marn::parse_scheme(sw_scheme);
            spec.net = parse_network(join_csv(sw_net_v, "2,2,2,1"));
            spec.snr_db = parse_snr_grid(join_csv(sw_snr_v, "10:2:40"));
            spec.max_trials = static_cast<uint64_t>(sw_trials);
            spec.target_bit_errors = static_cast<uint64_t>(sw_target);
            spec.seed = sw_seed;
            if (!sw_mod.empty()) spec.mod_order = marn::parse_mod_order(sw_mod);
            spec.design = sw_design;
            spec.workers = sw_workers;
            spec.batch = static_cast<uint64_t>(sw_batch);
            if (sw_format != "csv" && sw_format != "json")
                throw ConfigError("--format must be csv or json");
            const marn::SweepResult res = marn::run_sweep(spec);
            if (!sw_out.empty()) marn::emit(res, sw_format, sw_out);
            if (!sw_plot.empty())
                std::cout << marn::plot_columns(res, sw_plot);
            else if (sw_out.empty())
                std::cout << (sw_format == "json" ? marn::to_json(res) : marn::to_csv(res));
        } else if (app.got_subcommand(outage)) {
            marn::NetworkConfig net = parse_network(join_csv(ou_net_v, "2,2,2,1"));
            net.P = 1.0;
            net.validate();
            const marn::GammaExtractor extract =
                ou_var == "gamma-g" ? marn::GammaExtractor(marn::draw_gamma_g_only)
                                    : marn::GammaExtractor(marn::draw_receive_snr);
            if (ou_var != "gamma" && ou_var != "gamma-g")
                throw ConfigError("--variable must be gamma or gamma-g");
            const marn::OutageResult res =
                marn::estimate_outage(net, extract, parse_eps_grid(join_csv(ou_eps_v, "1e-3:1e-1")),
                                      static_cast<uint64_t>(ou_trials), ou_seed, ou_workers);
            std::cout << "epsilon,events,p\n";
            for (size_t i = 0; i < res.epsilon.size(); ++i) {
                char buf[80];
                std::snprintf(buf, sizeof(buf), "%.12g,%llu,%.12g\n", res.epsilon[i],
                              static_cast<unsigned long long>(res.events[i]), res.p[i]);
                std::cout << buf;
            }
            char buf[120];
            std::snprintf(buf, sizeof(buf), "# slope %.6g stderr %.3g points %llu trials %llu\n",
                          res.slope, res.slope_stderr,
                          static_cast<unsigned long long>(res.used_points),
                          static_cast<unsigned long long>(res.trials));
            std::cout << buf;
        } else if (app.got_subcommand(check)) {
            bool ok = false;
            if (ck_suite == "zf") ok = check_zf();
            else if (ck_suite == "lemma2") ok = check_lemma2();
            else ok = check_covariance();
            return ok ? 0 : 1;
        } else if (app.got_subcommand(rate)) {
            const marn::Rational r =
                marn::symbol_rate(marn::parse_scheme(rt_scheme), rt_j, parse_rational(rt_ro));
            std::cout << r.str() << "\n";
        }
    } catch (const marn::InsufficientData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const marn::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
