#pragma once

#include <string>
#include <vector>

#include "marn/numerics.hpp"

namespace marn {

// Unit-average-power PSK with Gray bit labels.  points[label] is the point
// whose bit pattern equals `label`; geometric neighbours differ in one bit.
struct Constellation {
    std::vector<cplx> points;
    int bits_per_symbol = 0;
    double rotation = 0.0;

    int order() const { return static_cast<int>(points.size()); }
};

Constellation build_psk(int order, double rotation);

// The per-subsystem constellations used in the first hop.  Sources draw
// symbol pair (2u-1, 2u) from sets[u].  min/max distance are taken over
// point pairs within each member set.
struct ConstellationBank {
    std::vector<Constellation> sets;
    double min_distance = 0.0;  // Delta
    double max_distance = 0.0;  // beta

    int bits_per_symbol() const { return sets.empty() ? 0 : sets[0].bits_per_symbol; }
};

// Bank of m constellations with the default rotation schedule: member u
// (0-based) rotated by u*pi/(2m).  Throws ConfigError if the result fails
// validate_bank.
ConstellationBank make_bank(int order, int m);

// Distinguishability condition: for every choice of one point per set and
// every coefficient vector c in {-1,0,1}^m with at least one nonzero entry,
// the combination sum_u c_u * s_u stays away from zero (|sum| > 1e-9).
// Exhaustive enumeration.
bool validate_bank(const ConstellationBank& bank);

// bits -> one symbol vector of length 2*m (positions 2u, 2u+1 from sets[u]);
// bit count must equal 2*m*bits_per_symbol.  demap inverts by nearest point.
std::vector<cplx> map_bits(const ConstellationBank& bank, const std::vector<int>& bits);
std::vector<int> demap(const ConstellationBank& bank, const std::vector<cplx>& symbols);

int parse_mod_order(const std::string& name);  // "bpsk"|"qpsk"|"8psk"|"16psk"

}  // namespace marn
