#pragma once

// Symbolic layer over the Bell/GHZ bases: classification of GHZ-family
// states, the operator-tuple -> GHZ-label transformation table and its
// n-party generalization, exact entanglement-swapping outcome distributions,
// and the verifier's deduction rule for recovering the applied operators
// from published Bell outcomes.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghzauth/statevec.hpp"

namespace ghzauth {

inline constexpr int kMaxGhzQubits = 8;

// A GHZ-family basis state (|s> + sign |s~>)/sqrt(2), where s~ is the
// bitwise complement of s. Each ray has two natural names (s and s~); the
// canonical representative fixes the leading qubit of flip_pattern to 0,
// absorbing the global phase a complement flip may introduce. For n=3 the
// eight canonical labels are the conventional Psi_1..Psi_8 basis; see
// psi_index().
struct GhzLabel {
  int n_qubits = 0;
  std::uint32_t flip_pattern = 0;  // basis index of the canonical ket |s>
  Sign sign = Sign::Plus;

  friend bool operator==(const GhzLabel&, const GhzLabel&) = default;

  std::string name() const {
    std::string bits;
    for (int q = 0; q < n_qubits; ++q) {
      bits += ((flip_pattern >> (n_qubits - 1 - q)) & 1u) ? '1' : '0';
    }
    return "(" + bits + (sign == Sign::Plus ? ",+)" : ",-)");
  }
};

inline GhzLabel canonical_ghz_label(int n_qubits, std::uint32_t pattern, Sign sign) {
  if (n_qubits < 2 || n_qubits > kMaxGhzQubits)
    throw std::invalid_argument("GHZ label size must be between 2 and 8 qubits");
  const std::uint32_t full = (1u << n_qubits) - 1u;
  if (pattern > full) throw std::invalid_argument("flip pattern out of range");
  if (pattern >> (n_qubits - 1)) pattern = ~pattern & full;
  return GhzLabel{n_qubits, pattern, sign};
}

// Dense state for a label: (|s> + sign |s~>)/sqrt(2).
inline StateVector ghz_state(const GhzLabel& label) {
  const GhzLabel c = canonical_ghz_label(label.n_qubits, label.flip_pattern, label.sign);
  const std::size_t dim = std::size_t{1} << c.n_qubits;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<Amplitude> amps(dim, Amplitude{0.0, 0.0});
  amps[c.flip_pattern] = Amplitude{inv_sqrt2, 0.0};
  amps[~std::size_t{c.flip_pattern} & (dim - 1)] =
      Amplitude{c.sign == Sign::Plus ? inv_sqrt2 : -inv_sqrt2, 0.0};
  return StateVector::from_amplitudes(c.n_qubits, std::move(amps));
}

// Returns the GHZ-family label whose basis vector has squared overlap
// > 1 - 1e-9 with the state, ignoring global phase; nullopt otherwise.
inline std::optional<GhzLabel> classify_ghz(const StateVector& state) {
  const int n = state.n_qubits();
  if (n < 2 || n > kMaxGhzQubits)
    throw std::invalid_argument("GHZ classification handles 2 to 8 qubits");
  const std::size_t dim = state.dim();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t s = 0; s < dim / 2; ++s) {
    const std::size_t sbar = ~s & (dim - 1);
    const Amplitude plus = (state.amp(s) + state.amp(sbar)) * inv_sqrt2;
    const Amplitude minus = (state.amp(s) - state.amp(sbar)) * inv_sqrt2;
    if (std::norm(plus) > 1.0 - kProbTolerance)
      return GhzLabel{n, static_cast<std::uint32_t>(s), Sign::Plus};
    if (std::norm(minus) > 1.0 - kProbTolerance)
      return GhzLabel{n, static_cast<std::uint32_t>(s), Sign::Minus};
  }
  return std::nullopt;
}

// Label of (op_0 x ... x op_{n-1}) applied to (|0..0> + |1..1>)/sqrt(2), up
// to global phase. Computed by delegating to the state-vector layer (apply
// the operators, classify the result) rather than by a hand-derived sign
// rule, so the n=3 transformation table and its generalizations share one
// source of truth.
inline GhzLabel transform_label(std::span<const PauliChoice> ops, int n) {
  if (static_cast<int>(ops.size()) != n)
    throw std::invalid_argument("operator tuple length must equal the register size");
  StateVector state = prepare_ghz(n);
  for (int q = 0; q < n; ++q) state = apply_pauli(state, q, ops[q]);
  const std::optional<GhzLabel> label = classify_ghz(state);
  if (!label) throw std::logic_error("transformed GHZ state failed to classify");
  return *label;
}

// Conventional numbering of the eight 3-qubit GHZ basis states:
//   Psi1 = (|000>+|111>)/sqrt2   Psi2 = (|000>-|111>)/sqrt2
//   Psi3 = (|100>+|011>)/sqrt2   Psi4 = (|100>-|011>)/sqrt2
//   Psi5 = (|010>+|101>)/sqrt2   Psi6 = (|010>-|101>)/sqrt2
//   Psi7 = (|110>+|001>)/sqrt2   Psi8 = (|110>-|001>)/sqrt2
// Canonicalization maps patterns 100 -> 011 and 110 -> 001, so e.g. Psi7 is
// the canonical label (001,+).
inline int psi_index(const GhzLabel& label) {
  if (label.n_qubits != 3) throw std::invalid_argument("Psi numbering is for 3-qubit labels");
  static constexpr int index_by_pattern[4] = {1, 7, 5, 3};  // patterns 000,001,010,011
  const GhzLabel c = canonical_ghz_label(3, label.flip_pattern, label.sign);
  return index_by_pattern[c.flip_pattern] + (c.sign == Sign::Minus ? 1 : 0);
}

inline GhzLabel label_from_psi_index(int k) {
  if (k < 1 || k > 8) throw std::invalid_argument("Psi index must be in 1..8");
  static constexpr std::uint32_t pattern_by_row[4] = {0b000, 0b011, 0b010, 0b001};
  const std::uint32_t pattern = pattern_by_row[(k - 1) / 2];
  const Sign sign = (k % 2 == 1) ? Sign::Plus : Sign::Minus;
  return GhzLabel{3, pattern, sign};
}

inline std::string psi_name(const GhzLabel& label) {
  return "Psi" + std::to_string(psi_index(label));
}

// Joint distribution over Bell-outcome tuples for pairwise measurements
// across two same-size GHZ-family states. probs keys hold one Bell index
// per pair, ordered pair 0 first.
struct SwapDistribution {
  int n_pairs = 0;
  std::map<std::vector<std::uint8_t>, double> probs;

  double prob(std::span<const BellOutcome> tuple) const {
    std::vector<std::uint8_t> key;
    key.reserve(tuple.size());
    for (const BellOutcome& b : tuple) key.push_back(static_cast<std::uint8_t>(b.index()));
    const auto it = probs.find(key);
    return it == probs.end() ? 0.0 : it->second;
  }
};

// Exact outcome distribution of measuring position i of state P against
// position i of state Q in the Bell basis, for every i. Computed on the
// 2n-qubit product state, no sampling.
inline SwapDistribution swap_distribution(const GhzLabel& label_p, const GhzLabel& label_q) {
  if (label_p.n_qubits != label_q.n_qubits)
    throw std::invalid_argument("swapped states must have the same size");
  const int n = label_p.n_qubits;
  const StateVector joint = tensor(ghz_state(label_p), ghz_state(label_q));
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n);
  for (int i = 0; i < n; ++i) pairs.emplace_back(i, n + i);
  return SwapDistribution{n, bell_tuple_distribution(joint, pairs)};
}

struct DeduceResult {
  std::vector<int> user_bits;
  bool consistent = false;
};

// Recovers the applied operator bits from a published Bell-outcome tuple
// (position 0 is the verifier's own pair) plus the verifier's private
// operation.
//
// For operators with bit pattern b applied to a GHZ state that is then
// swapped against an untouched one, the support of the outcome distribution
// is exactly: kind pattern (psi=1, phi=0) equal to b or to its bitwise
// complement, with the number of '-' outcome signs congruent mod 2 to the
// number of i sigma_y operations. Both kind patterns occur with equal
// weight, so kinds alone determine b only up to complement; the verifier's
// own bit picks the branch. The sign parity carries no key information and
// serves as the consistency check: a tuple that fails it cannot arise from
// any honest operator pattern with the verifier's bit, signaling channel
// corruption or forged results.
inline DeduceResult deduce_ops(std::span<const BellOutcome> outcomes, PauliChoice trent_op) {
  const std::size_t n = outcomes.size();
  if (n < 2) throw std::invalid_argument("deduction needs at least two Bell outcomes");

  std::vector<int> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = outcomes[i].kind == BellKind::Psi ? 1 : 0;
  if (bits[0] != classical_bit(trent_op)) {
    for (int& b : bits) b ^= 1;
  }

  int weight = 0;
  int minus_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    weight += bits[i];
    minus_count += outcomes[i].sign == Sign::Minus ? 1 : 0;
  }

  DeduceResult result;
  result.user_bits.assign(bits.begin() + 1, bits.end());
  result.consistent = ((weight + minus_count) % 2) == 0;
  return result;
}

}  // namespace ghzauth
