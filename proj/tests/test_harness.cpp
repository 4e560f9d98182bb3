#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "marn/harness.hpp"

using namespace marn;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

SweepSpec tiny_spec() {
    SweepSpec spec;
    spec.scheme = SchemeId::ic_relay_tdma;
    spec.net.J = 2;
    spec.net.Ja = 1;
    spec.net.Ra = 2;
    spec.net.M = 1;
    spec.snr_db = {6.0, 9.0};
    spec.max_trials = 1536;
    spec.target_bit_errors = 40;
    spec.seed = 777;
    spec.mod_order = 2;
    spec.batch = 128;
    return spec;
}

// Record with one source whose BER is exactly errors/(trials*bits_per_source).
SnrRecord rec_one(double snr_db, uint64_t trials, uint64_t bits_per_source,
                  std::vector<uint64_t> errors) {
    SnrRecord r;
    r.snr_db = snr_db;
    r.trials = trials;
    r.bits_per_source = bits_per_source;
    r.bit_errors = std::move(errors);
    return r;
}

}  // namespace

TEST_CASE("wilson interval reference values") {
    double lo = -1, hi = -1;
    wilson_interval(5, 10, lo, hi);
    CHECK(lo == doctest::Approx(0.2365861).epsilon(1e-5));
    CHECK(hi == doctest::Approx(0.7634139).epsilon(1e-5));

    wilson_interval(0, 100, lo, hi);
    CHECK(lo == 0.0);
    CHECK(hi > 0.0);
    CHECK(hi < 0.05);

    wilson_interval(100, 100, lo, hi);
    CHECK(lo > 0.95);
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));

    wilson_interval(0, 0, lo, hi);
    CHECK(lo == 0.0);
    CHECK(hi == 1.0);

    // interval always brackets the point estimate
    wilson_interval(7, 31, lo, hi);
    CHECK(lo < 7.0 / 31.0);
    CHECK(hi > 7.0 / 31.0);
}

TEST_CASE("sweep spec validation") {
    CHECK_NOTHROW(tiny_spec().validate());
    SweepSpec bad = tiny_spec();
    bad.snr_db.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_spec();
    bad.snr_db = {10.0, 10.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_spec();
    bad.mod_order = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_spec();
    bad.batch = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_spec();
    bad.workers = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_spec();
    bad.max_trials = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = tiny_spec();
    bad.net.flows = FlowProfile{{{0, 1}}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config hash is stable and ignores the worker count") {
    const SweepSpec spec = tiny_spec();
    const std::string h = config_hash(spec);
    CHECK(h.size() == 16);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(config_hash(spec) == h);

    SweepSpec other = spec;
    other.workers = 7;
    CHECK(config_hash(other) == h);  // scheduling detail, not an input

    other = spec;
    other.batch = 8192;
    CHECK(config_hash(other) != h);
    other = spec;
    other.seed = 778;
    CHECK(config_hash(other) != h);
    other = spec;
    other.mod_order = 4;
    CHECK(config_hash(other) != h);
    other = spec;
    other.snr_db.push_back(12.0);
    CHECK(config_hash(other) != h);
}

TEST_CASE("sweep results do not depend on the worker count") {
    SweepSpec spec = tiny_spec();
    spec.workers = 1;
    const SweepResult a = run_sweep(spec);
    spec.workers = 3;
    const SweepResult b = run_sweep(spec);
    spec.workers = 1;
    const SweepResult c = run_sweep(spec);

    CHECK(to_csv(a) == to_csv(b));
    CHECK(to_json(a) == to_json(b));
    CHECK(to_csv(a) == to_csv(c));  // and reruns reproduce exactly
    CHECK(a.config_hash == b.config_hash);

    REQUIRE(a.points.size() == 2);
    for (const SnrRecord& rec : a.points) {
        CHECK(rec.trials > 0);
        CHECK(rec.bit_errors.size() == 2);
        CHECK(rec.bits_per_source == 2);  // one BPSK frame of two symbols
    }
}

TEST_CASE("early stop rounds to batch boundaries") {
    SweepSpec spec;
    spec.scheme = SchemeId::ic_relay_tdma;
    spec.net = NetworkConfig{};
    spec.snr_db = {0.0};
    spec.max_trials = 50000;
    spec.target_bit_errors = 25;
    spec.seed = 11;
    spec.mod_order = 2;
    spec.batch = 64;
    const SweepResult res = run_sweep(spec);
    REQUIRE(res.points.size() == 1);
    const SnrRecord& rec = res.points[0];
    const uint64_t scheduled = rec.trials + rec.discarded;
    CHECK(scheduled % spec.batch == 0);
    CHECK(scheduled < spec.max_trials / 2);  // 0 dB is noisy, stop comes fast
    CHECK(rec.total_errors() >= spec.target_bit_errors);

    // without a target the point runs to max_trials
    spec.target_bit_errors = 0;
    spec.max_trials = 200;
    spec.batch = 64;
    const SweepResult full = run_sweep(spec);
    CHECK(full.points[0].trials + full.points[0].discarded == 200);
}

TEST_CASE("diversity fit recovers an exact power law") {
    SweepResult r;
    r.spec = tiny_spec();
    // ber = 1e-2 * (P/10)^-3 at 10, 20, 30 dB over 1e10 bits per point
    r.points.push_back(rec_one(10.0, 100000000, 100, {100000000}));
    r.points.push_back(rec_one(20.0, 100000000, 100, {100000}));
    r.points.push_back(rec_one(30.0, 100000000, 100, {100}));
    CHECK(fit_diversity(r, 1e-9, 1e-1) == doctest::Approx(3.0).epsilon(1e-9));

    // out-of-window and error-starved points do not disturb the fit
    r.points.push_back(rec_one(5.0, 100000000, 100, {5000000000}));  // ber 0.5
    r.points.push_back(rec_one(40.0, 100000000, 100, {50}));         // < 100 errors
    CHECK(fit_diversity(r, 1e-9, 1e-1) == doctest::Approx(3.0).epsilon(1e-9));

    // narrowing the window below three points is an error, not a guess
    CHECK_THROWS_AS(fit_diversity(r, 1e-3, 1e-1), InsufficientData);
}

TEST_CASE("outage estimator recovers a synthetic cubic tail") {
    const NetworkConfig cfg;
    const GammaExtractor cubic = [](const NetworkConfig&, RandomStream& rng) {
        return std::cbrt(rng.uniform01());  // P(g < eps) = eps^3
    };
    const std::vector<double> eps = {0.1, 0.2, 0.4};
    const OutageResult out = estimate_outage(cfg, cubic, eps, 200000, 9);
    CHECK(out.trials == 200000);
    CHECK(out.used_points == 3);
    CHECK(out.slope == doctest::Approx(3.0).epsilon(0.07));
    CHECK(out.slope_stderr < 0.2);
    CHECK(out.slope_stderr >= 0.0);
    for (size_t e = 0; e < eps.size(); ++e)
        CHECK(out.p[e] == static_cast<double>(out.events[e]) / 200000.0);
    CHECK(out.events[0] < out.events[1]);
    CHECK(out.events[1] < out.events[2]);

    // worker partitioning must not change a single count
    const OutageResult par = estimate_outage(cfg, cubic, eps, 200000, 9, 4);
    CHECK(par.events == out.events);
    CHECK(par.slope == out.slope);

    // the grid is sorted internally
    const OutageResult shuffled =
        estimate_outage(cfg, cubic, {0.4, 0.1, 0.2}, 200000, 9);
    CHECK(shuffled.epsilon == out.epsilon);
    CHECK(shuffled.events == out.events);

    // a grid the sampler cannot reach is reported, not extrapolated
    CHECK_THROWS_AS(estimate_outage(cfg, cubic, {1e-4, 2e-4}, 2000, 9), InsufficientData);
}

TEST_CASE("receive-SNR draws are reproducible and positive") {
    NetworkConfig cfg;
    cfg.J = 2;
    cfg.Ja = 2;
    cfg.Ra = 2;
    cfg.M = 1;
    RandomStream a(42, 17), b(42, 17);
    const double g1 = draw_receive_snr(cfg, a);
    const double g2 = draw_receive_snr(cfg, b);
    CHECK(g1 == g2);
    CHECK(g1 > 0.0);

    double mean = 0.0;
    RandomStream rng(1, 0);
    const int n = 4000;
    for (int i = 0; i < n; ++i) mean += draw_gamma_g_only(cfg, rng);
    mean /= n;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.1));  // ||G||^2, two CN(0,1) taps
}

TEST_CASE("relay-chain SNR never beats its algebraic bound") {
    NetworkConfig cfg;
    cfg.J = 2;
    cfg.Ja = 2;
    cfg.Ra = 2;
    cfg.M = 1;
    CHECK(check_lemma2_bound(cfg, 2000, 42) == 0);
    CHECK(check_lemma2_bound(cfg, 2000, 42, true) == 0);
    cfg.Ra = 4;
    cfg.M = 2;
    CHECK(check_lemma2_bound(cfg, 2000, 43) == 0);
}

TEST_CASE("csv layout: per-source rows then the aggregate row") {
    SweepResult r;
    r.spec = tiny_spec();
    SnrRecord rec;
    rec.snr_db = 10.0;
    rec.trials = 2;
    rec.discarded = 1;
    rec.bits_per_source = 3;
    rec.bit_errors = {1, 2};
    r.points.push_back(rec);

    auto row = [](double snr, uint64_t trials, uint64_t disc, uint64_t bits, uint64_t errs,
                  const std::string& id) {
        double lo, hi;
        wilson_interval(errs, bits, lo, hi);
        const double ber = static_cast<double>(errs) / static_cast<double>(bits);
        std::ostringstream os;
        os << fmt(snr) << ',' << trials << ',' << disc << ',' << bits << ',' << errs << ','
           << fmt(ber) << ',' << fmt(lo) << ',' << fmt(hi) << ',' << id << '\n';
        return os.str();
    };
    std::string expected =
        "snr_db,trials,discarded,bits,bit_errors,ber,ber_ci_low,ber_ci_high,source_id\n";
    expected += row(10.0, 2, 1, 6, 1, "1");
    expected += row(10.0, 2, 1, 6, 2, "2");
    expected += row(10.0, 2, 1, 12, 3, "all");
    CHECK(to_csv(r) == expected);

    r.points.clear();
    CHECK(to_csv(r) ==
          "snr_db,trials,discarded,bits,bit_errors,ber,ber_ci_low,ber_ci_high,source_id\n");
}

TEST_CASE("json round trip is byte-identical and omits scheduling knobs") {
    SweepSpec spec = tiny_spec();
    spec.max_trials = 256;
    spec.workers = 3;
    const SweepResult res = run_sweep(spec);
    const std::string text = to_json(res);
    CHECK(text.find("workers") == std::string::npos);
    CHECK(text.back() == '\n');

    const SweepResult back = sweep_from_json(text);
    CHECK(to_json(back) == text);
    CHECK(to_csv(back) == to_csv(res));
    CHECK(back.config_hash == res.config_hash);
    CHECK(back.spec.seed == spec.seed);
    REQUIRE(back.points.size() == res.points.size());
    for (size_t i = 0; i < res.points.size(); ++i)
        CHECK(back.points[i].bit_errors == res.points[i].bit_errors);
}

TEST_CASE("emit writes files and reports failures with the path") {
    SweepResult r;
    r.spec = tiny_spec();
    r.config_hash = config_hash(r.spec);
    r.points.push_back(rec_one(10.0, 4, 2, {1}));

    const std::string path = "/tmp/marn_test_emit.csv";
    emit(r, "csv", path);
    std::ifstream f(path, std::ios::binary);
    std::stringstream body;
    body << f.rdbuf();
    CHECK(body.str() == to_csv(r));
    std::remove(path.c_str());

    CHECK_THROWS_AS(emit(r, "xml", path), ConfigError);
    try {
        emit(r, "csv", "/nonexistent_dir_zzz/out.csv");
        CHECK(false);
    } catch (const SimError& e) {
        CHECK(std::string(e.what()).find("/nonexistent_dir_zzz/out.csv") !=
              std::string::npos);
    }
}

TEST_CASE("plot extract prints the two requested aggregate columns") {
    SweepResult r;
    r.spec = tiny_spec();
    r.points.push_back(rec_one(10.0, 4, 2, {2}));  // 8 bits, 2 errors
    r.points.push_back(rec_one(20.0, 4, 2, {1}));
    CHECK(plot_columns(r, "snr_db,ber") == "snr_db,ber\n10,0.25\n20,0.125\n");
    CHECK(plot_columns(r, "bits,bit_errors") == "bits,bit_errors\n8,2\n8,1\n");
    CHECK_THROWS_AS(plot_columns(r, "snr_db"), ConfigError);
    CHECK_THROWS_AS(plot_columns(r, "snr_db,bogus"), ConfigError);
}
