#pragma once

#include <array>
#include <string>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/holland.hpp"

namespace stormrisk {

/// Forecast state at one timestep: parameter means plus standard errors in
/// the fixed parameter order (hPa, km, -, rad, rad, m/s, rad).
struct TrackStep {
    HollandParams params;
    std::array<double, kNumHollandParams> sigma{};
};

/// Parametric hurricane forecast. Environmental pressure and air density are
/// fixed per track and replicated into every step's parameters.
struct HurricaneTrack {
    std::string name;
    double pn_hpa = 1013.25;
    double rho = 1.15;
    std::vector<TrackStep> steps;

    int horizon() const { return static_cast<int>(steps.size()); }

    void validate() const {
        if (steps.empty()) throw DataError("track: no timesteps");
        for (const auto& s : steps) {
            s.params.validate();
            for (double sd : s.sigma) {
                if (!(sd >= 0)) throw DataError("track: negative standard error");
            }
        }
    }
};

}  // namespace stormrisk
