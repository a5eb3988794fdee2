#pragma once

// Minimax-optimal angle sets for K = 3 column selections, and the uniform
// placements they are compared against.
//
//   even n        : 2 pi (i-1) / n            (variant b, distinct positions)
//                   2 pi (i-1) / n  mod pi    (variant a, coincident pairs)
//   n in {3, 5}   : pi (i-1) / n
//   odd n >= 7    : 2 pi (i-1) / (n+1) mod pi
//
// Uniform spacing over the half circle is not optimal for odd n >= 7.

#include <optional>
#include <string>
#include <string_view>

#include "mincond/core.hpp"

namespace mincond {

enum class Scheme {
  TheoremEvenA,
  TheoremEvenB,
  TheoremSmallOdd,
  TheoremLargeOdd,
  BaselineSemicircle,
  BaselineCircle,
  OptimalAuto,
};

std::string_view to_string(Scheme scheme);
/// Accepts the enum spellings ("theorem_even_a", ...) and "optimal".
std::optional<Scheme> parse_scheme(std::string_view name);

/// Human-readable constraint on n for a scheme, used in error messages.
std::string_view applicability(Scheme scheme);
bool applies(Scheme scheme, int n);

struct DesignSpec {
  int n = 3;
  Scheme scheme = Scheme::OptimalAuto;
};

enum class EvenVariant { A, B };

AngleSet design_even(int n, EvenVariant variant);
AngleSet design_small_odd(int n);
AngleSet design_large_odd(int n);
AngleSet baseline_semicircle(int n);
AngleSet baseline_circle(int n);
/// Even n -> variant b, n in {3, 5} -> small odd, odd n >= 7 -> large odd.
AngleSet design_optimal(int n);

/// Throws std::invalid_argument when the scheme does not apply to n.
AngleSet make_design(const DesignSpec& spec);

}  // namespace mincond
