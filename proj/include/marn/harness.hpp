#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "marn/channel.hpp"
#include "marn/schemes.hpp"

namespace marn {

struct SweepSpec {
    SchemeId scheme = SchemeId::ic_relay_tdma;
    NetworkConfig net;
    std::vector<double> snr_db;
    uint64_t max_trials = 1000000;
    uint64_t target_bit_errors = 200;  // aggregate early-stop target (0 = none)
    uint64_t seed = 42;
    int mod_order = 0;     // 0 = scheme default
    std::string design;    // "" = matched to Ra
    int workers = 1;
    uint64_t batch = 4096;  // scheduling quantum; results never depend on workers

    void validate() const;
};

struct SnrRecord {
    double snr_db = 0.0;
    uint64_t trials = 0;     // counted trials (excludes discarded)
    uint64_t discarded = 0;  // degenerate channel draws
    uint64_t bits_per_source = 0;
    std::vector<uint64_t> bit_errors;  // per source

    uint64_t total_bits() const;
    uint64_t total_errors() const;
    double ber() const;  // aggregate
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SnrRecord> points;
    std::string config_hash;  // FNV-1a of the canonical spec string
};

// 95% Wilson interval for k errors in n bits.
void wilson_interval(uint64_t k, uint64_t n, double& lo, double& hi);

std::string config_hash(const SweepSpec& spec);

// Monte Carlo BER sweep.  Per SNR point, trials run in fixed-size batches
// until max_trials or the cumulative aggregate error count reaches
// target_bit_errors at a batch boundary; batches are merged in index order,
// so the result is byte-identical for any worker count.
SweepResult run_sweep(const SweepSpec& spec);

// Least-squares diversity order: negated slope of log10(BER) against
// log10(P) over points whose aggregate BER lies inside [ber_lo, ber_hi] with
// at least 100 aggregate errors.  Requires >= 3 such points.
double fit_diversity(const SweepResult& result, double ber_lo, double ber_hi);

struct OutageResult {
    std::vector<double> epsilon;
    std::vector<uint64_t> events;
    std::vector<double> p;  // events / trials, monotone in epsilon
    uint64_t trials = 0;
    double slope = 0.0;         // log-log fit over points with >= 50 events
    double slope_stderr = 0.0;
    uint64_t used_points = 0;
};

// One draw of the quantity whose near-zero CDF slope is under test.
using GammaExtractor = std::function<double(const NetworkConfig&, RandomStream&)>;

// Normalized receive SNR of source 1 at P=1 (the diversity-defining
// variable): channel-only draw through the cancel/combine chain.
double draw_receive_snr(const NetworkConfig& cfg, RandomStream& rng);
// Second-hop factor alone.
double draw_gamma_g_only(const NetworkConfig& cfg, RandomStream& rng);

// Monte Carlo CDF of `extract` at the given epsilon grid.  Throws
// InsufficientData when the largest epsilon has fewer than 50 events or the
// fit has fewer than two usable points.
OutageResult estimate_outage(const NetworkConfig& cfg, const GammaExtractor& extract,
                             const std::vector<double>& epsilon, uint64_t trials,
                             uint64_t seed = 42, int workers = 1);

// Counts draws violating gamma <= min{sum_l gamma_l/(L c^2), L gamma_g}
// (up to a 1e-9 relative rounding allowance).  Expected 0.
// infinite_gamma_g replaces the second-hop factor by its no-noise limit.
uint64_t check_lemma2_bound(const NetworkConfig& cfg, uint64_t trials, uint64_t seed = 42,
                            bool infinite_gamma_g = false);

// CSV columns: snr_db,trials,discarded,bits,bit_errors,ber,ber_ci_low,
// ber_ci_high,source_id — one row per source ("1".."J") plus an "all" row
// per SNR point.  No timestamps anywhere.
std::string to_csv(const SweepResult& result);
std::string to_json(const SweepResult& result);
SweepResult sweep_from_json(const std::string& text);

// format: "csv" | "json".  I/O failures carry the path in the message.
void emit(const SweepResult& result, const std::string& format, const std::string& path);

// Two-column extract of the aggregate rows, e.g. plot_columns(r, "snr_db,ber").
std::string plot_columns(const SweepResult& result, const std::string& cols);

}  // namespace marn
