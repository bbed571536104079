#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tsawf {

/// Gaussian breakpoints splitting N(0,1) into `alphabet` equiprobable bins
/// (alphabet - 1 ascending values). Cached per alphabet size.
const std::vector<double>& sax_breakpoints(std::size_t alphabet);

/// Symbolic aggregate approximation: z-normalize, average over `word_length`
/// near-equal segments (segment j covers [floor(j*n/w), floor((j+1)*n/w))),
/// then map each mean to the letter of its breakpoint bin, 'a' lowest.
/// A word longer than the series is clamped to the series length. A constant
/// series becomes the letter at index alphabet/2 repeated.
/// Requires word_length >= 1 and 2 <= alphabet <= 26.
std::string sax_encode(std::span<const double> a, std::size_t word_length, std::size_t alphabet);

/// Default word length for a series of length m: m/8, at least 4, at most m.
std::size_t default_sax_word_length(std::size_t m);

}  // namespace tsawf
