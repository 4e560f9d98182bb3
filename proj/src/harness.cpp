#include "marn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "marn/destination.hpp"
#include "marn/icrelay.hpp"

namespace marn {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void SweepSpec::validate() const {
    net.validate();
    if (net.flows) throw ConfigError("sweeps run single-destination configs (no flow profile)");
    if (snr_db.empty()) throw ConfigError("sweep needs at least one SNR point");
    for (size_t i = 1; i < snr_db.size(); ++i)
        if (snr_db[i] <= snr_db[i - 1])
            throw ConfigError("snr_db values must be strictly increasing");
    if (max_trials < 1) throw ConfigError("max_trials must be >= 1");
    if (batch < 1) throw ConfigError("batch must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (mod_order != 0 && mod_order != 2 && mod_order != 4 && mod_order != 8 &&
        mod_order != 16)
        throw ConfigError("mod_order must be one of 0,2,4,8,16");
}

uint64_t SnrRecord::total_bits() const {
    return trials * bits_per_source * bit_errors.size();
}
uint64_t SnrRecord::total_errors() const {
    uint64_t s = 0;
    for (uint64_t e : bit_errors) s += e;
    return s;
}
double SnrRecord::ber() const {
    const uint64_t n = total_bits();
    return n ? static_cast<double>(total_errors()) / static_cast<double>(n) : 0.0;
}

void wilson_interval(uint64_t k, uint64_t n, double& lo, double& hi) {
    if (n == 0) {
        lo = 0.0;
        hi = 1.0;
        return;
    }
    const double z = 1.959963984540054;  // 95%
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // the bounds are exact at the extremes; don't leak rounding residue
    lo = k == 0 ? 0.0 : std::max(0.0, center - half);
    hi = k == n ? 1.0 : std::min(1.0, center + half);
}

namespace {

std::string canonical_spec(const SweepSpec& s) {
    std::ostringstream os;
    os << "scheme=" << scheme_name(s.scheme) << ";network=" << s.net.J << ',' << s.net.Ja
       << ',' << s.net.Ra << ',' << s.net.M << ";snr=";
    for (size_t i = 0; i < s.snr_db.size(); ++i) {
        if (i) os << ',';
        os << fmt_double(s.snr_db[i]);
    }
    os << ";max_trials=" << s.max_trials << ";target=" << s.target_bit_errors
       << ";seed=" << s.seed << ";mod=" << s.mod_order << ";design=" << s.design
       << ";batch=" << s.batch;
    return os.str();
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::string config_hash(const SweepSpec& spec) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_spec(spec))));
    return buf;
}

namespace {

struct BatchCounts {
    uint64_t trials = 0;
    uint64_t discarded = 0;
    std::vector<uint64_t> errors;
};

BatchCounts run_batch(const Scheme& sc, const NetworkConfig& net, uint64_t seed, uint64_t t0,
                      uint64_t t1) {
    BatchCounts bc;
    bc.errors.assign(net.J, 0);
    std::vector<std::vector<int>> bits(net.J, std::vector<int>(sc.bits_per_source));
    for (uint64_t t = t0; t < t1; ++t) {
        // substream layout per trial: 0 = channel, 1 = data bits, 2 = noise
        RandomStream ch_rng(seed, t * 4);
        RandomStream bit_rng(seed, t * 4 + 1);
        RandomStream noise_rng(seed, t * 4 + 2);
        const ChannelRealization ch = draw_channel(net, ch_rng);
        for (int j = 0; j < net.J; ++j)
            for (int& v : bits[j]) v = bit_rng.bit();
        try {
            const auto dec = run_scheme_trial(sc, net, ch, bits, &noise_rng);
            ++bc.trials;
            for (int j = 0; j < net.J; ++j)
                for (int i = 0; i < sc.bits_per_source; ++i)
                    bc.errors[j] += static_cast<uint64_t>(bits[j][i] != dec[j][i]);
        } catch (const DegenerateChannel&) {
            ++bc.discarded;
        }
    }
    return bc;
}

SnrRecord run_point(const SweepSpec& spec, double snr_db) {
    NetworkConfig net = spec.net;
    net.P = std::pow(10.0, snr_db / 10.0);
    const Scheme sc = make_scheme(spec.scheme, net, spec.mod_order, spec.design);

    SnrRecord rec;
    rec.snr_db = snr_db;
    rec.bits_per_source = static_cast<uint64_t>(sc.bits_per_source);
    rec.bit_errors.assign(net.J, 0);

    const uint64_t nbatches = (spec.max_trials + spec.batch - 1) / spec.batch;
    uint64_t next = 0;
    bool stop = false;
    while (!stop && next < nbatches) {
        // One wave of up to `workers` batches.  Batches merge strictly in
        // index order and the stop rule is evaluated per batch, so the merged
        // set never depends on the worker count.
        const uint64_t wave = std::min<uint64_t>(spec.workers, nbatches - next);
        std::vector<BatchCounts> part(wave);
        if (wave == 1) {
            part[0] = run_batch(sc, net, spec.seed, next * spec.batch,
                                std::min((next + 1) * spec.batch, spec.max_trials));
        } else {
            std::vector<std::thread> pool;
            pool.reserve(wave);
            for (uint64_t w = 0; w < wave; ++w) {
                const uint64_t q = next + w;
                const uint64_t t0 = q * spec.batch;
                const uint64_t t1 = std::min(t0 + spec.batch, spec.max_trials);
                pool.emplace_back(
                    [&part, w, &sc, &net, &spec, t0, t1] { part[w] = run_batch(sc, net, spec.seed, t0, t1); });
            }
            for (auto& th : pool) th.join();
        }
        for (uint64_t w = 0; w < wave; ++w) {
            rec.trials += part[w].trials;
            rec.discarded += part[w].discarded;
            for (int j = 0; j < net.J; ++j) rec.bit_errors[j] += part[w].errors[j];
            ++next;
            if (spec.target_bit_errors && rec.total_errors() >= spec.target_bit_errors) {
                stop = true;
                break;
            }
        }
    }
    return rec;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult res;
    res.spec = spec;
    res.config_hash = config_hash(spec);
    for (double snr : spec.snr_db) res.points.push_back(run_point(spec, snr));
    return res;
}

double fit_diversity(const SweepResult& result, double ber_lo, double ber_hi) {
    std::vector<double> x, y;
    for (const SnrRecord& rec : result.points) {
        const double b = rec.ber();
        if (b < ber_lo || b > ber_hi || rec.total_errors() < 100) continue;
        x.push_back(rec.snr_db / 10.0);  // log10 of linear SNR
        y.push_back(std::log10(b));
    }
    if (x.size() < 3)
        throw InsufficientData("diversity fit needs >= 3 points inside the BER window");
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

double draw_receive_snr(const NetworkConfig& cfg, RandomStream& rng) {
    // Everything at P=1: the outage exponent concerns the channel factors.
    int T2 = 0, K = 0;
    if (cfg.Ra == 2) {
        T2 = 2;
        K = 2;
    } else if (cfg.Ra == 4) {
        T2 = 4;
        K = 3;
    } else {
        throw ConfigError("no built-in forwarding design for Ra=" + std::to_string(cfg.Ra));
    }
    const double c = relay_norm_c(1.0, T2, cfg.Ra, K, cfg.J);
    const ChannelRealization ch = draw_channel(cfg, rng);

    const int L = cfg.L();
    std::vector<CMat> r(cfg.Ra, CMat::zeros(cfg.pad(), 1));
    EquivalentSystem sys;
    sys.x.assign(L, 0.0);
    sys.gamma_l.resize(L);
    sys.gamma_gv = gamma_g(ch.G[0]);
    sys.c = c;
    sys.P = 1.0;
    sys.Ja = cfg.Ja;
    try {
        const auto subs = separate_subsystems(cfg, r, ch);
        for (int l = 0; l < L; ++l)
            sys.gamma_l[l] = mrc_combine(cancel_interference(cfg, subs[l], 0)).gamma_l;
    } catch (const DegenerateChannel&) {
        return std::numeric_limits<double>::infinity();  // measure-zero draw; never in outage
    }
    return normalized_receive_snr(sys);
}

double draw_gamma_g_only(const NetworkConfig& cfg, RandomStream& rng) {
    const ChannelRealization ch = draw_channel(cfg, rng);
    return gamma_g(ch.G[0]);
}

OutageResult estimate_outage(const NetworkConfig& cfg, const GammaExtractor& extract,
                             const std::vector<double>& epsilon, uint64_t trials,
                             uint64_t seed, int workers) {
    if (epsilon.empty()) throw ConfigError("outage needs a nonempty epsilon grid");
    std::vector<double> eps = epsilon;
    std::sort(eps.begin(), eps.end());

    OutageResult out;
    out.epsilon = eps;
    out.trials = trials;
    out.events.assign(eps.size(), 0);

    const int W = std::max(1, workers);
    std::vector<std::vector<uint64_t>> part(W, std::vector<uint64_t>(eps.size(), 0));
    auto work = [&](int w) {
        const uint64_t t0 = trials * static_cast<uint64_t>(w) / W;
        const uint64_t t1 = trials * static_cast<uint64_t>(w + 1) / W;
        for (uint64_t t = t0; t < t1; ++t) {
            RandomStream rng(seed, t);
            const double g = extract(cfg, rng);
            // eps is sorted: count the prefix of thresholds above g
            for (size_t e = eps.size(); e-- > 0;) {
                if (g >= eps[e]) break;
                ++part[w][e];
            }
        }
    };
    if (W == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < W; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (int w = 0; w < W; ++w)
        for (size_t e = 0; e < eps.size(); ++e) out.events[e] += part[w][e];

    out.p.resize(eps.size());
    for (size_t e = 0; e < eps.size(); ++e)
        out.p[e] = static_cast<double>(out.events[e]) / static_cast<double>(trials);

    if (out.events.back() < 50)
        throw InsufficientData("fewer than 50 outage events at the largest epsilon");

    std::vector<double> x, y;
    for (size_t e = 0; e < eps.size(); ++e) {
        if (out.events[e] < 50) continue;  // starved points are excluded from the fit
        x.push_back(std::log(eps[e]));
        y.push_back(std::log(out.p[e]));
    }
    if (x.size() < 2) throw InsufficientData("outage fit needs >= 2 usable epsilon points");
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / det;
    out.used_points = n;
    if (n > 2) {
        const double b0 = (sy - out.slope * sx) / n;
        double ss = 0;
        for (size_t i = 0; i < n; ++i) {
            const double r = y[i] - (b0 + out.slope * x[i]);
            ss += r * r;
        }
        out.slope_stderr = std::sqrt(ss / static_cast<double>(n - 2) / (sxx - sx * sx / n));
    }
    return out;
}

uint64_t check_lemma2_bound(const NetworkConfig& cfg, uint64_t trials, uint64_t seed,
                            bool infinite_gamma_g) {
    int T2 = 0, K = 0;
    if (cfg.Ra == 2) {
        T2 = 2;
        K = 2;
    } else if (cfg.Ra == 4) {
        T2 = 4;
        K = 3;
    } else {
        throw ConfigError("no built-in forwarding design for Ra=" + std::to_string(cfg.Ra));
    }
    const double c = relay_norm_c(1.0, T2, cfg.Ra, K, cfg.J);
    const int L = cfg.L();

    uint64_t violations = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        RandomStream rng(seed, t);
        const ChannelRealization ch = draw_channel(cfg, rng);
        std::vector<CMat> r(cfg.Ra, CMat::zeros(cfg.pad(), 1));
        EquivalentSystem sys;
        sys.x.assign(L, 0.0);
        sys.gamma_l.resize(L);
        sys.gamma_gv =
            infinite_gamma_g ? std::numeric_limits<double>::infinity() : gamma_g(ch.G[0]);
        sys.c = c;
        sys.P = 1.0;
        sys.Ja = cfg.Ja;
        double sum_gl = 0.0;
        try {
            const auto subs = separate_subsystems(cfg, r, ch);
            for (int l = 0; l < L; ++l) {
                sys.gamma_l[l] = mrc_combine(cancel_interference(cfg, subs[l], 0)).gamma_l;
                sum_gl += sys.gamma_l[l];
            }
        } catch (const DegenerateChannel&) {
            continue;
        }
        const double gamma = normalized_receive_snr(sys);
        const double bound = std::min(sum_gl / (L * c * c), L * sys.gamma_gv);
        // 1e-9 relative slack: the inequality is algebraic, the slack only
        // absorbs rounding of the two evaluation orders
        if (gamma > bound * (1.0 + 1e-9)) ++violations;
    }
    return violations;
}

namespace {

void csv_row(std::ostringstream& os, const SnrRecord& rec, uint64_t bits, uint64_t errors,
             const std::string& source_id) {
    double lo, hi;
    wilson_interval(errors, bits, lo, hi);
    const double ber = bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0;
    os << fmt_double(rec.snr_db) << ',' << rec.trials << ',' << rec.discarded << ',' << bits
       << ',' << errors << ',' << fmt_double(ber) << ',' << fmt_double(lo) << ','
       << fmt_double(hi) << ',' << source_id << '\n';
}

}  // namespace

std::string to_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "snr_db,trials,discarded,bits,bit_errors,ber,ber_ci_low,ber_ci_high,source_id\n";
    for (const SnrRecord& rec : result.points) {
        const uint64_t per_source_bits = rec.trials * rec.bits_per_source;
        for (size_t j = 0; j < rec.bit_errors.size(); ++j)
            csv_row(os, rec, per_source_bits, rec.bit_errors[j], std::to_string(j + 1));
        csv_row(os, rec, rec.total_bits(), rec.total_errors(), "all");
    }
    return os.str();
}

std::string to_json(const SweepResult& result) {
    nlohmann::json j;
    j["spec"] = {{"scheme", scheme_name(result.spec.scheme)},
                 {"network",
                  {result.spec.net.J, result.spec.net.Ja, result.spec.net.Ra,
                   result.spec.net.M}},
                 {"snr_db", result.spec.snr_db},
                 {"max_trials", result.spec.max_trials},
                 {"target_bit_errors", result.spec.target_bit_errors},
                 {"seed", result.spec.seed},
                 {"mod_order", result.spec.mod_order},
                 {"design", result.spec.design},
                 {"batch", result.spec.batch}};
    j["config_hash"] = result.config_hash;
    j["points"] = nlohmann::json::array();
    for (const SnrRecord& rec : result.points) {
        j["points"].push_back({{"snr_db", rec.snr_db},
                               {"trials", rec.trials},
                               {"discarded", rec.discarded},
                               {"bits_per_source", rec.bits_per_source},
                               {"bit_errors", rec.bit_errors}});
    }
    return j.dump(2) + "\n";
}

SweepResult sweep_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SweepResult r;
    const auto& s = j.at("spec");
    r.spec.scheme = parse_scheme(s.at("scheme").get<std::string>());
    const auto& net = s.at("network");
    r.spec.net.J = net.at(0).get<int>();
    r.spec.net.Ja = net.at(1).get<int>();
    r.spec.net.Ra = net.at(2).get<int>();
    r.spec.net.M = net.at(3).get<int>();
    r.spec.snr_db = s.at("snr_db").get<std::vector<double>>();
    r.spec.max_trials = s.at("max_trials").get<uint64_t>();
    r.spec.target_bit_errors = s.at("target_bit_errors").get<uint64_t>();
    r.spec.seed = s.at("seed").get<uint64_t>();
    r.spec.mod_order = s.at("mod_order").get<int>();
    r.spec.design = s.at("design").get<std::string>();
    r.spec.batch = s.at("batch").get<uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& pt : j.at("points")) {
        SnrRecord rec;
        rec.snr_db = pt.at("snr_db").get<double>();
        rec.trials = pt.at("trials").get<uint64_t>();
        rec.discarded = pt.at("discarded").get<uint64_t>();
        rec.bits_per_source = pt.at("bits_per_source").get<uint64_t>();
        rec.bit_errors = pt.at("bit_errors").get<std::vector<uint64_t>>();
        r.points.push_back(std::move(rec));
    }
    return r;
}

void emit(const SweepResult& result, const std::string& format, const std::string& path) {
    std::string body;
    if (format == "csv") body = to_csv(result);
    else if (format == "json") body = to_json(result);
    else throw ConfigError("emit: unknown format '" + format + "'");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw SimError("emit: cannot open '" + path + "' for writing");
    f << body;
    if (!f) throw SimError("emit: write failed for '" + path + "'");
}

std::string plot_columns(const SweepResult& result, const std::string& cols) {
    const auto comma = cols.find(',');
    if (comma == std::string::npos)
        throw ConfigError("plot columns must be 'colA,colB'");
    const std::string a = cols.substr(0, comma);
    const std::string b = cols.substr(comma + 1);
    auto value = [](const SnrRecord& rec, const std::string& name) -> std::string {
        if (name == "snr_db") return fmt_double(rec.snr_db);
        if (name == "trials") return std::to_string(rec.trials);
        if (name == "discarded") return std::to_string(rec.discarded);
        if (name == "bits") return std::to_string(rec.total_bits());
        if (name == "bit_errors") return std::to_string(rec.total_errors());
        if (name == "ber") return fmt_double(rec.ber());
        double lo, hi;
        wilson_interval(rec.total_errors(), rec.total_bits(), lo, hi);
        if (name == "ber_ci_low") return fmt_double(lo);
        if (name == "ber_ci_high") return fmt_double(hi);
        throw ConfigError("unknown plot column '" + name + "'");
    };
    std::ostringstream os;
    os << a << ',' << b << '\n';
    for (const SnrRecord& rec : result.points) os << value(rec, a) << ',' << value(rec, b) << '\n';
    return os.str();
}

}  // namespace marn
