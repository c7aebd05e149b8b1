#pragma once

#include <array>
#include <string>

#include "windgrid/errors.hpp"

namespace windgrid {

enum class Season { winter = 0, spring = 1, summer = 2, fall = 3 };

inline constexpr std::array<Season, 4> all_seasons{Season::winter, Season::spring,
                                                   Season::summer, Season::fall};

// Meteorological grouping: winter Dec-Feb, spring Mar-May, summer Jun-Aug,
// fall Sep-Nov. December is attributed to the winter of its own calendar
// year so every training year carries a complete 90-day winter.
inline Season season_of_month(int month) {
    switch (month) {
        case 12: case 1: case 2: return Season::winter;
        case 3: case 4: case 5: return Season::spring;
        case 6: case 7: case 8: return Season::summer;
        case 9: case 10: case 11: return Season::fall;
        default: throw Error::input("month out of range: " + std::to_string(month));
    }
}

inline const char* season_name(Season s) {
    switch (s) {
        case Season::winter: return "winter";
        case Season::spring: return "spring";
        case Season::summer: return "summer";
        case Season::fall: return "fall";
    }
    return "?";
}

inline Season season_from_name(const std::string& name) {
    for (Season s : all_seasons)
        if (name == season_name(s)) return s;
    throw Error::input("unknown season: " + name);
}

}  // namespace windgrid
