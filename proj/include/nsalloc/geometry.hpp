// SPDX-License-Identifier: Apache-2.0
//
// Saturation geometry: position bounds with their midpoint center, the
// border an element is heading for, the weighted distance of each element
// to its border (w > 1 means out of bounds), and extraction of the
// saturated/free index partition with its correction direction.

#pragma once

#include <vector>

#include "nsalloc/linalg.hpp"

namespace nsalloc {

struct Bounds {
    Vector u_min;
    Vector u_max;
};

// Throws std::invalid_argument naming the first offending element unless
// u_min and u_max have equal length and u_min < u_max strictly everywhere.
// A nonnegative expected_size additionally pins the length.
void validate_bounds(const Bounds& bounds, int expected_size = -1);

struct WeightedDistance {
    Vector w;       // nonnegative; w_l <= 1 iff element l is within bounds
    Vector border;  // limit on the side element l currently leans toward
    Vector center;  // interval midpoints
};

// Saturated/free partition of {0..m-1}. Indices are 0-based internally;
// human-facing output converts to 1-based.
struct SaturationState {
    std::vector<int> saturated;  // S, ascending
    std::vector<int> free_set;   // F, ascending (complement of S)
    Vector delta_bar;            // per S entry: sign(border - center), +-1
    int pivot = -1;              // reference element t, member of S
};

// Interval midpoints (u_max + u_min)/2.
Vector center(const Bounds& bounds);

// Per element: u_max when u >= center (inclusive), else u_min.
Vector border(const Vector& u, const Bounds& bounds);

// w_l = (u_l - center_l) / (border_l - center_l); always >= 0 because
// numerator and denominator share sign by the border choice.
WeightedDistance weighted_distance(const Vector& u, const Bounds& bounds);

// S = elements within relative tie_tol of the largest w; F = complement;
// pivot = smallest member of S. Solver loops keep their own pivot sticky
// across iterations instead of re-deriving it here (see the walk modules).
SaturationState saturated_set(const WeightedDistance& wd, double tie_tol = 1e-9);

// Movement of each saturated element per unit of the scalar step length:
// (border_i - center_i)/|border_t - center_t|, i over S in order. The pivot
// entry is exactly delta_bar's +-1; the others are scaled by half-width so
// all saturated w stay equal as the step grows and every saturated element
// lands exactly on its border together.
Vector saturated_step(const SaturationState& sat, const WeightedDistance& wd);

}  // namespace nsalloc
