#pragma once

#include <cstddef>
#include <utility>

namespace hyreach::test {

// (locations, transitions) for n = 1..8, rows lsync1, lsync2, shd1, shd2.
inline constexpr std::pair<std::size_t, std::size_t> kCompositionSizes[4][8] = {
    {{2, 3}, {3, 6}, {7, 33}, {15, 164}, {31, 755}, {63, 3310}, {127, 14077}, {255, 58728}},
    {{2, 3}, {3, 6}, {4, 15}, {5, 36}, {6, 85}, {7, 198}, {8, 455}, {9, 1032}},
    {{3, 6}, {7, 18}, {15, 54}, {31, 162}, {63, 486}, {127, 1458}, {255, 4374}, {511, 13122}},
    {{2, 5}, {4, 13}, {8, 35}, {16, 97}, {32, 275}, {64, 793}, {128, 2315}, {256, 6817}},
};

}  // namespace hyreach::test
