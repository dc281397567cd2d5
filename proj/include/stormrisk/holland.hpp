#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/geo.hpp"

namespace stormrisk {

inline constexpr double kOmegaEarth = 7.292e-5;  // rad/s
inline constexpr int kNumHollandParams = 7;

/// Parametric cyclone wind-field parameters. Pressures in hPa, Rmax in km,
/// center in radians, translation speed in m/s, heading clockwise from north.
struct HollandParams {
    double pc_hpa = 980.0;    // central pressure
    double rmax_km = 50.0;    // radius of maximum wind
    double b = 1.3;           // shape parameter
    double phi1 = 0.0;        // storm-center latitude
    double lambda1 = 0.0;     // storm-center longitude
    double s_mps = 0.0;       // translation speed
    double alpha = 0.0;       // heading, clockwise from north
    double pn_hpa = 1013.25;  // environmental pressure
    double rho = 1.15;        // air density, kg/m^3

    GeoPoint center() const { return GeoPoint{phi1, lambda1}; }

    void validate() const {
        if (!(pn_hpa > pc_hpa)) throw DataError("HollandParams: require Pn > Pc");
        if (!(rmax_km > 0)) throw DataError("HollandParams: require Rmax > 0");
        if (!(b > 0)) throw DataError("HollandParams: require B > 0");
        if (!(rho > 0)) throw DataError("HollandParams: require rho > 0");
    }
};

/// The seven uncertain forecast parameters, in fixed order.
enum class HollandParamIndex { Pc = 0, Rmax, B, Phi1, Lambda1, S, Alpha };

inline double get_param(const HollandParams& p, int k) {
    switch (k) {
        case 0: return p.pc_hpa;
        case 1: return p.rmax_km;
        case 2: return p.b;
        case 3: return p.phi1;
        case 4: return p.lambda1;
        case 5: return p.s_mps;
        case 6: return p.alpha;
    }
    throw InternalError("get_param: index out of range");
}

inline void set_param(HollandParams& p, int k, double v) {
    switch (k) {
        case 0: p.pc_hpa = v; return;
        case 1: p.rmax_km = v; return;
        case 2: p.b = v; return;
        case 3: p.phi1 = v; return;
        case 4: p.lambda1 = v; return;
        case 5: p.s_mps = v; return;
        case 6: p.alpha = v; return;
    }
    throw InternalError("set_param: index out of range");
}

inline const std::array<std::string, kNumHollandParams>& param_names() {
    static const std::array<std::string, kNumHollandParams> names = {
        "pc", "rmax", "b", "phi1", "lambda1", "s", "alpha"};
    return names;
}

inline double coriolis(double phi_local) {
    return 2.0 * kOmegaEarth * std::sin(phi_local);
}

/// Gradient wind speed (m/s) at range r_km from the center, with the
/// Coriolis parameter evaluated at the local latitude. Negative values of
/// the closed form cannot occur for a nonnegative pressure deficit; the
/// result is clamped at 0 to absorb rounding.
inline double gradient_wind_speed(const HollandParams& p, double r_km,
                                  double phi_local) {
    if (!(r_km > 0)) {
        throw std::domain_error("gradient_wind_speed: require r > 0");
    }
    const double dp_pa = (p.pn_hpa - p.pc_hpa) * 100.0;
    const double ratio = p.rmax_km / r_km;
    const double ratio_b = std::pow(ratio, p.b);
    const double pressure_term =
        p.b * dp_pa / p.rho * std::exp(-ratio_b) * ratio_b;
    const double rf2 = r_km * 1000.0 * coriolis(phi_local) / 2.0;
    const double v = std::sqrt(pressure_term + rf2 * rf2) - rf2;
    return v > 0.0 ? v : 0.0;
}

/// East/north surface wind components at `target`: gradient wind directed
/// tangentially (counterclockwise around the center) plus the storm
/// translation vector.
inline void wind_components(const HollandParams& p, const GeoPoint& target,
                            double& u_east, double& v_north) {
    const GeoPoint center = p.center();
    const double r_km = haversine_distance(center, target);
    if (r_km < 1e-9) {
        throw std::domain_error("total_wind_speed: target at storm center");
    }
    const double bearing = azimuth(center, target);
    const double vg = gradient_wind_speed(p, r_km, target.phi);
    // Tangential, counterclockwise: rotate the outward radial direction
    // (sin b, cos b) by +90 degrees in the east/north plane.
    const double ug = -vg * std::cos(bearing);
    const double vgn = vg * std::sin(bearing);
    u_east = ug + p.s_mps * std::sin(p.alpha);
    v_north = vgn + p.s_mps * std::cos(p.alpha);
}

/// Total surface wind speed (m/s) at `target`.
inline double total_wind_speed(const HollandParams& p, const GeoPoint& target) {
    double u = 0.0, v = 0.0;
    wind_components(p, target, u, v);
    return std::hypot(u, v);
}

/// Central finite-difference steps per parameter: relative 1e-4 with
/// per-parameter absolute floors (hPa, km, -, rad, rad, m/s, rad).
inline double fd_step(const HollandParams& p, int k) {
    static constexpr std::array<double, kNumHollandParams> floors = {
        0.01, 0.01, 1e-4, 1e-6, 1e-6, 1e-3, 1e-4};
    return std::max(1e-4 * std::abs(get_param(p, k)), floors[static_cast<std::size_t>(k)]);
}

/// dV_total/dtheta_k for all seven parameters by central finite differences.
/// Requires nonzero predicted wind at the target; callers exclude calm
/// locations upstream.
inline std::array<double, kNumHollandParams> param_sensitivities(
    const HollandParams& p, const GeoPoint& target) {
    if (!(total_wind_speed(p, target) > 0)) {
        throw std::domain_error(
            "param_sensitivities: zero wind at target, sensitivity undefined");
    }
    std::array<double, kNumHollandParams> grad{};
    for (int k = 0; k < kNumHollandParams; ++k) {
        const double h = fd_step(p, k);
        HollandParams lo = p, hi = p;
        set_param(lo, k, get_param(p, k) - h);
        set_param(hi, k, get_param(p, k) + h);
        grad[static_cast<std::size_t>(k)] =
            (total_wind_speed(hi, target) - total_wind_speed(lo, target)) /
            (2.0 * h);
    }
    return grad;
}

/// Relative mismatch between the true wind change under `delta` and its
/// first-order approximation. Throws when the linear predictor vanishes.
inline double linearity_deviation(const HollandParams& p, const GeoPoint& target,
                                  const std::array<double, kNumHollandParams>& delta) {
    const auto grad = param_sensitivities(p, target);
    double linear = 0.0;
    for (int k = 0; k < kNumHollandParams; ++k) {
        linear += delta[static_cast<std::size_t>(k)] * grad[static_cast<std::size_t>(k)];
    }
    if (linear == 0.0) {
        throw std::domain_error("linearity_deviation: zero linear predictor");
    }
    HollandParams shifted = p;
    for (int k = 0; k < kNumHollandParams; ++k) {
        set_param(shifted, k, get_param(p, k) + delta[static_cast<std::size_t>(k)]);
    }
    const double actual = total_wind_speed(shifted, target) - total_wind_speed(p, target);
    return std::abs((actual - linear) / linear);
}

/// Intense-hurricane reference parameterization (975 hPa / 50 km / B=1.3,
/// center 22.3N 96W, 5 m/s toward NNW). Environmental pressure and density
/// are chosen so the peak surface speed is about 50 m/s.
inline HollandParams harvey_like_params() {
    HollandParams p;
    p.pc_hpa = 975.0;
    p.rmax_km = 50.0;
    p.b = 1.3;
    p.phi1 = deg2rad(22.3);
    p.lambda1 = deg2rad(-96.0);
    p.s_mps = 5.0;
    p.alpha = deg2rad(-30.0);
    p.pn_hpa = 1020.0;
    p.rho = 1.0;
    return p;
}

/// Standard errors matching harvey_like_params, in native units
/// (hPa, km, -, rad, rad, m/s, rad).
inline std::array<double, kNumHollandParams> harvey_like_sigmas() {
    return {10.0, 5.0, 0.05, deg2rad(0.1), deg2rad(0.1), 0.5, deg2rad(5.0)};
}

/// One mesh cell of the linearity-deviation experiment.
struct LinDevCell {
    double east_km = 0.0;
    double north_km = 0.0;
    int param = 0;
    double deviation = 0.0;  // NaN when the linear predictor is degenerate
};

/// Evaluates the linearity-deviation index on a square mesh centered on the
/// storm, perturbing one parameter at a time by `sigma_scale` standard
/// errors. Cells where the linear predictor vanishes get NaN.
inline std::vector<LinDevCell> linearity_deviation_mesh(
    const HollandParams& p, const std::array<double, kNumHollandParams>& sigma,
    double half_extent_km = 250.0, double step_km = 10.0,
    double sigma_scale = 1.0) {
    std::vector<LinDevCell> cells;
    const GeoPoint center = p.center();
    const int n = static_cast<int>(std::round(2.0 * half_extent_km / step_km)) + 1;
    cells.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * kNumHollandParams);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const double x = -half_extent_km + ix * step_km;
            const double y = -half_extent_km + iy * step_km;
            const GeoPoint loc = offset_km(center, x, y);
            for (int k = 0; k < kNumHollandParams; ++k) {
                LinDevCell cell;
                cell.east_km = x;
                cell.north_km = y;
                cell.param = k;
                std::array<double, kNumHollandParams> delta{};
                delta[static_cast<std::size_t>(k)] =
                    sigma_scale * sigma[static_cast<std::size_t>(k)];
                try {
                    cell.deviation = linearity_deviation(p, loc, delta);
                } catch (const std::domain_error&) {
                    cell.deviation = std::nan("");
                }
                cells.push_back(cell);
            }
        }
    }
    return cells;
}

}  // namespace stormrisk
