#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace tsawf {

/// Dynamic time warping with squared local cost, returned as the square root
/// of the cheapest warping path cost.
///
/// `window` is the Sakoe-Chiba half-width: cell (i, j) is reachable only when
/// |i - j| <= max(window, ||a| - |b||). Widening to the length difference keeps
/// the end cell reachable for unequal lengths. nullopt means unconstrained.
double dtw(std::span<const double> a, std::span<const double> b, std::optional<std::size_t> window = std::nullopt);

/// Same as dtw() after subtracting each sequence's first value.
double dtw_rebased(std::span<const double> a, std::span<const double> b,
                   std::optional<std::size_t> window = std::nullopt);

}  // namespace tsawf
