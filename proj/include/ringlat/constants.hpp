#pragma once

namespace ringlat {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double k_boltzmann = 1.380649e-23;     // J/K
inline constexpr double speed_of_light = 2.99792458e8;  // m/s

// 85Rb, D2 line
namespace rb85 {
inline constexpr double mass = 1.4099934e-25;    // kg
inline constexpr double lambda_d2 = 780.241e-9;  // m
}  // namespace rb85

}  // namespace ringlat
