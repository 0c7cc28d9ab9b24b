#pragma once

#include <vector>

#include "canopy/pipeline.hpp"

namespace canopy::published {

// Published SVM confusion counts (rows predicted, columns actual) with the
// percentages printed beside them.
inline const ConfusionMatrix kSvmConfusion{{2288, 57, 149, 16, 1, 8, 130}, {26, 617, 16, 9, 0, 5, 12},
                                            {36, 18, 1026, 0, 1, 0, 66},    {1, 2, 1, 218, 0, 1, 2},
                                            {3, 3, 0, 5, 2280, 6, 7},       {0, 0, 0, 0, 0, 1893, 0},
                                            {119, 45, 121, 38, 4, 61, 2705}};
inline const double kSvmPrecision[7] = {86.4, 90.1, 89.5, 96.9, 99.0, 100.0, 87.5};
inline const double kSvmRecall[7] = {92.5, 83.2, 78.1, 76.2, 99.7, 95.9, 92.6};

inline const double kCoverPercent[7] = {38.37, 4.26, 2.42, 0.29, 7.21, 5.64, 41.81};
inline const double kCoverHectares[7] = {35.96, 3.99, 2.26, 0.27, 6.75, 5.29, 39.18};
inline constexpr double kCoverTotalHa = 93.70;

}  // namespace canopy::published
