#pragma once

// Power semirings P(S) of finite semigroups.

#include "cep/classify.hpp"

namespace cep {

constexpr std::size_t kDefaultPowerCap = 8;

/// Non-empty subsets of S under union and setwise product. Element i+1 is the
/// subset with bitmask i+1; names look like `{e1,e3}`.
FiniteSemiring build_power(const FiniteSemigroup& sg, std::size_t cap = kDefaultPowerCap);

/// Bitmask of a P(S) element and back.
inline std::uint64_t subset_mask(Elem x) { return std::uint64_t{x} + 1; }
inline Elem subset_elem(std::uint64_t mask) { return static_cast<Elem>(mask - 1); }

struct PowerVerdict {
  bool local_group = false;
  bool solvable = false;
  Verdict direct = Verdict::PComplete;  // from S
  std::optional<Verdict> via_power;     // classify(P(S)), when under the cap
  /// Both routes agree on P-completeness. Where S gives DET, P(S) may
  /// classify as NL, which lies inside DET.
  bool agree = true;
  std::string note;
};

PowerVerdict power_verdict(const FiniteSemigroup& sg, std::size_t cap = kDefaultPowerCap);

/// All semigroups on {0..n-1} up to isomorphism, n <= 5.
std::vector<FiniteSemigroup> all_semigroups(std::size_t n);

}  // namespace cep
