#include "marn/constellation.hpp"

#include <algorithm>
#include <cmath>

namespace marn {

namespace {
constexpr double kPi = 3.14159265358979323846;

int gray(int k) { return k ^ (k >> 1); }
}  // namespace

Constellation build_psk(int order, double rotation) {
    if (order != 2 && order != 4 && order != 8 && order != 16)
        throw ConfigError("build_psk: unsupported order " + std::to_string(order));
    Constellation c;
    c.bits_per_symbol = 0;
    for (int v = order; v > 1; v >>= 1) ++c.bits_per_symbol;
    c.rotation = rotation;
    c.points.resize(order);
    // Base BPSK sits on the real axis as (-1,+1); larger orders start at +1.
    // `rotation` turns the whole set clockwise so that e.g. BPSK rotated by
    // pi/2 has label 0 on +j.  Gray labels: geometric neighbours differ in
    // exactly one bit.
    const double base = (order == 2) ? kPi : 0.0;
    for (int k = 0; k < order; ++k) {
        const double ang = base + 2.0 * kPi * k / order - rotation;
        c.points[gray(k)] = {std::cos(ang), std::sin(ang)};
    }
    return c;
}

bool validate_bank(const ConstellationBank& bank) {
    const int m = static_cast<int>(bank.sets.size());
    if (m == 0) return false;
    // Enumerate coefficient vectors c in {-1,0,1}^m, skip all-zero; for each,
    // enumerate points of the supported sets and test |sum c_u s_u| > 1e-9.
    long long ncoef = 1;
    for (int u = 0; u < m; ++u) ncoef *= 3;
    for (long long ci = 0; ci < ncoef; ++ci) {
        int coef[32];
        long long t = ci;
        std::vector<int> support;
        for (int u = 0; u < m; ++u) {
            coef[u] = static_cast<int>(t % 3) - 1;  // -1, 0, +1
            t /= 3;
            if (coef[u] != 0) support.push_back(u);
        }
        if (support.empty()) continue;  // the all-zero vector sums to 0 trivially
        // mixed-radix walk over the supported sets' points
        std::vector<int> idx(support.size(), 0);
        while (true) {
            cplx sum{};
            for (size_t a = 0; a < support.size(); ++a) {
                const int u = support[a];
                sum += static_cast<double>(coef[u]) * bank.sets[u].points[idx[a]];
            }
            if (std::abs(sum) <= 1e-9) return false;
            size_t a = 0;
            for (; a < support.size(); ++a) {
                if (++idx[a] < bank.sets[support[a]].order()) break;
                idx[a] = 0;
            }
            if (a == support.size()) break;
        }
    }
    return true;
}

namespace {
void pair_distances(const Constellation& c, double& mind, double& maxd) {
    for (size_t i = 0; i < c.points.size(); ++i)
        for (size_t k = i + 1; k < c.points.size(); ++k) {
            const double d = std::abs(c.points[i] - c.points[k]);
            mind = std::min(mind, d);
            maxd = std::max(maxd, d);
        }
}
}  // namespace

ConstellationBank make_bank(int order, int m) {
    if (m < 1) throw ConfigError("make_bank: need at least one constellation");
    ConstellationBank bank;
    for (int u = 0; u < m; ++u)
        bank.sets.push_back(build_psk(order, u * kPi / (2.0 * m)));
    double mind = 1e300, maxd = 0.0;
    for (const auto& s : bank.sets) pair_distances(s, mind, maxd);
    bank.min_distance = mind;
    bank.max_distance = maxd;
    if (!validate_bank(bank))
        throw ConfigError("make_bank: default rotation schedule failed the "
                          "distinguishability condition");
    return bank;
}

std::vector<cplx> map_bits(const ConstellationBank& bank, const std::vector<int>& bits) {
    const int m = static_cast<int>(bank.sets.size());
    const int b = bank.bits_per_symbol();
    if (static_cast<int>(bits.size()) != 2 * m * b)
        throw ConfigError("map_bits: expected " + std::to_string(2 * m * b) + " bits, got " +
                          std::to_string(bits.size()));
    std::vector<cplx> s(2 * m);
    for (int pos = 0; pos < 2 * m; ++pos) {
        const auto& set = bank.sets[pos / 2];
        int label = 0;
        for (int i = 0; i < b; ++i) label = (label << 1) | (bits[pos * b + i] & 1);
        s[pos] = set.points[label];
    }
    return s;
}

std::vector<int> demap(const ConstellationBank& bank, const std::vector<cplx>& symbols) {
    const int m = static_cast<int>(bank.sets.size());
    const int b = bank.bits_per_symbol();
    if (static_cast<int>(symbols.size()) != 2 * m)
        throw ConfigError("demap: expected " + std::to_string(2 * m) + " symbols");
    std::vector<int> bits(2 * m * b);
    for (int pos = 0; pos < 2 * m; ++pos) {
        const auto& set = bank.sets[pos / 2];
        int best = 0;
        double bestd = 1e300;
        for (int label = 0; label < set.order(); ++label) {
            const double d = std::norm(symbols[pos] - set.points[label]);
            if (d < bestd) {
                bestd = d;
                best = label;
            }
        }
        for (int i = 0; i < b; ++i) bits[pos * b + i] = (best >> (b - 1 - i)) & 1;
    }
    return bits;
}

int parse_mod_order(const std::string& name) {
    std::string s;
    for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s == "bpsk" || s == "2psk") return 2;
    if (s == "qpsk" || s == "4psk") return 4;
    if (s == "8psk") return 8;
    if (s == "16psk") return 16;
    throw ConfigError("unknown modulation '" + name + "' (expected bpsk|qpsk|8psk|16psk)");
}

}  // namespace marn
