#include "marn/channel.hpp"

namespace marn {

void NetworkConfig::validate() const {
    if (J < 1 || Ja < 1 || Ra < 1 || M < 1)
        throw ConfigError("network: all of J, Ja, Ra, M must be >= 1");
    if (Ra < J)
        throw ConfigError("network: relay needs at least as many antennas as there are sources "
                          "(Ra >= J)");
    if (!(P > 0.0)) throw ConfigError("network: transmit power must be positive");
    if (Ja > (1 << 16)) throw ConfigError("network: absurd antenna count");
    if (flows) {
        if (flows->sources.empty()) throw ConfigError("flow profile: no destinations");
        std::vector<char> seen(static_cast<size_t>(J), 0);
        for (const auto& set : flows->sources) {
            if (set.empty()) throw ConfigError("flow profile: destination with empty source set");
            for (int s : set) {
                if (s < 0 || s >= J) throw ConfigError("flow profile: source index out of range");
                seen[static_cast<size_t>(s)] = 1;
            }
        }
        for (int j = 0; j < J; ++j)
            if (!seen[static_cast<size_t>(j)])
                throw ConfigError("flow profile: source " + std::to_string(j + 1) +
                                  " not wanted by any destination");
    }
}

ChannelRealization draw_channel(const NetworkConfig& cfg, RandomStream& rng) {
    ChannelRealization ch;
    for (int j = 0; j < cfg.J; ++j) {
        CMat f(cfg.pad(), cfg.Ra);
        for (int k = 0; k < cfg.Ja; ++k)
            for (int i = 0; i < cfg.Ra; ++i) f(k, i) = rng.cgaussian();
        ch.F.push_back(std::move(f));
    }
    for (int d = 0; d < cfg.destinations(); ++d) {
        CMat g(cfg.Ra, cfg.M);
        for (int i = 0; i < cfg.Ra; ++i)
            for (int m = 0; m < cfg.M; ++m) g(i, m) = rng.cgaussian();
        ch.G.push_back(std::move(g));
    }
    return ch;
}

CMat awgn(int len, RandomStream& rng) {
    CMat v(len, 1);
    for (int i = 0; i < len; ++i) v(i, 0) = rng.cgaussian();
    return v;
}

double gamma_g(const CMat& G) { return G.norm2(); }

}  // namespace marn
