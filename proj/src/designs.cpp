#include "mincond/designs.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace mincond {

namespace {

constexpr std::array<std::pair<Scheme, std::string_view>, 7> kSchemeNames{{
    {Scheme::TheoremEvenA, "theorem_even_a"},
    {Scheme::TheoremEvenB, "theorem_even_b"},
    {Scheme::TheoremSmallOdd, "theorem_small_odd"},
    {Scheme::TheoremLargeOdd, "theorem_large_odd"},
    {Scheme::BaselineSemicircle, "baseline_semicircle"},
    {Scheme::BaselineCircle, "baseline_circle"},
    {Scheme::OptimalAuto, "optimal_auto"},
}};

void require(bool ok, Scheme scheme, int n) {
  if (!ok) {
    throw std::invalid_argument(std::string(to_string(scheme)) + " does not apply to n = " +
                                std::to_string(n) + ": requires " +
                                std::string(applicability(scheme)));
  }
}

// Angles pi * ((step * (i-1)) mod den) / den, reduced in integer arithmetic
// so coincident classes compare equal exactly. With keep_unreduced_raw the
// raw angle is pi * step * (i-1) / den before reduction.
AngleSet lattice(int n, int step, int den, bool keep_unreduced_raw) {
  std::vector<double> normalized(n), raw(n);
  for (int i = 0; i < n; ++i) {
    const long long num = static_cast<long long>(step) * i;
    normalized[i] = kPi * static_cast<double>(num % den) / den;
    raw[i] = keep_unreduced_raw ? kPi * static_cast<double>(num) / den : normalized[i];
  }
  return AngleSet::from_parts(std::move(normalized), std::move(raw));
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  for (const auto& [s, name] : kSchemeNames) {
    if (s == scheme) return name;
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "optimal") return Scheme::OptimalAuto;
  for (const auto& [s, n] : kSchemeNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

std::string_view applicability(Scheme scheme) {
  switch (scheme) {
    case Scheme::TheoremEvenA:
    case Scheme::TheoremEvenB:
      return "even n >= 4";
    case Scheme::TheoremSmallOdd:
      return "n in {3, 5}";
    case Scheme::TheoremLargeOdd:
      return "odd n >= 7";
    case Scheme::BaselineSemicircle:
    case Scheme::BaselineCircle:
    case Scheme::OptimalAuto:
      return "n >= 3";
  }
  return "";
}

bool applies(Scheme scheme, int n) {
  switch (scheme) {
    case Scheme::TheoremEvenA:
    case Scheme::TheoremEvenB:
      return n >= 4 && n % 2 == 0;
    case Scheme::TheoremSmallOdd:
      return n == 3 || n == 5;
    case Scheme::TheoremLargeOdd:
      return n >= 7 && n % 2 == 1;
    case Scheme::BaselineSemicircle:
    case Scheme::BaselineCircle:
    case Scheme::OptimalAuto:
      return n >= 3;
  }
  return false;
}

AngleSet design_even(int n, EvenVariant variant) {
  const Scheme scheme = variant == EvenVariant::A ? Scheme::TheoremEvenA : Scheme::TheoremEvenB;
  require(applies(scheme, n), scheme, n);
  // 2 pi (i-1) / n = pi * 2(i-1) / n
  return lattice(n, 2, n, variant == EvenVariant::B);
}

AngleSet design_small_odd(int n) {
  require(applies(Scheme::TheoremSmallOdd, n), Scheme::TheoremSmallOdd, n);
  return lattice(n, 1, n, false);
}

AngleSet design_large_odd(int n) {
  require(applies(Scheme::TheoremLargeOdd, n), Scheme::TheoremLargeOdd, n);
  return lattice(n, 2, n + 1, false);
}

AngleSet baseline_semicircle(int n) {
  require(applies(Scheme::BaselineSemicircle, n), Scheme::BaselineSemicircle, n);
  return lattice(n, 1, n, false);
}

AngleSet baseline_circle(int n) {
  require(applies(Scheme::BaselineCircle, n), Scheme::BaselineCircle, n);
  return lattice(n, 2, n, true);
}

AngleSet design_optimal(int n) {
  require(applies(Scheme::OptimalAuto, n), Scheme::OptimalAuto, n);
  if (n % 2 == 0) return design_even(n, EvenVariant::B);
  if (n <= 5) return design_small_odd(n);
  return design_large_odd(n);
}

AngleSet make_design(const DesignSpec& spec) {
  switch (spec.scheme) {
    case Scheme::TheoremEvenA:
      return design_even(spec.n, EvenVariant::A);
    case Scheme::TheoremEvenB:
      return design_even(spec.n, EvenVariant::B);
    case Scheme::TheoremSmallOdd:
      return design_small_odd(spec.n);
    case Scheme::TheoremLargeOdd:
      return design_large_odd(spec.n);
    case Scheme::BaselineSemicircle:
      return baseline_semicircle(spec.n);
    case Scheme::BaselineCircle:
      return baseline_circle(spec.n);
    case Scheme::OptimalAuto:
      return design_optimal(spec.n);
  }
  throw std::invalid_argument("make_design: unknown scheme");
}

}  // namespace mincond
