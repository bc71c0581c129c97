#pragma once

// Exact dense pure-state simulation of small qubit registers (<= 16 qubits):
// preparation, single-qubit operators, projective measurement in the Z, X and
// Bell bases, and exact probability queries.
//
// Index convention is big-endian: qubit 0 is the most significant bit of the
// amplitude index, so for a 3-qubit register |011> lives at index 3.
// Measured qubits stay in the register, collapsed to the outcome eigenstate;
// callers track which qubits are spent.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ghzauth/rng.hpp"

namespace ghzauth {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 16;
inline constexpr double kProbTolerance = 1e-9;
inline constexpr double kBranchEpsilon = 1e-12;

enum class MeasBasis { Z, X };

inline std::string basis_name(MeasBasis b) { return b == MeasBasis::Z ? "Z" : "X"; }

// The two operators parties apply to their qubits, with the agreed one-bit
// classical encoding. i sigma_y acts as the matrix [[0,1],[-1,0]]:
// |0> -> -|1>, |1> -> |0>.
enum class PauliChoice { Identity, ISigmaY };

inline int classical_bit(PauliChoice op) { return op == PauliChoice::ISigmaY ? 1 : 0; }
inline PauliChoice pauli_from_bit(int bit) {
  return bit ? PauliChoice::ISigmaY : PauliChoice::Identity;
}
inline std::string pauli_name(PauliChoice op) {
  return op == PauliChoice::ISigmaY ? "i_sigma_y" : "I";
}

enum class BellKind : std::uint8_t { Phi = 0, Psi = 1 };
enum class Sign : std::uint8_t { Plus = 0, Minus = 1 };

// One of the four Bell states
//   phi+/- = (|00> +/- |11>)/sqrt(2),   psi+/- = (|01> +/- |10>)/sqrt(2).
// index() orders them phi+, phi-, psi+, psi-.
struct BellOutcome {
  BellKind kind = BellKind::Phi;
  Sign sign = Sign::Plus;

  int index() const { return (static_cast<int>(kind) << 1) | static_cast<int>(sign); }

  static BellOutcome from_index(int i) {
    if (i < 0 || i > 3) throw std::invalid_argument("Bell outcome index out of range");
    return BellOutcome{static_cast<BellKind>(i >> 1), static_cast<Sign>(i & 1)};
  }

  std::string name() const {
    static const char* names[4] = {"phi+", "phi-", "psi+", "psi-"};
    return names[index()];
  }

  static BellOutcome from_name(const std::string& s) {
    for (int i = 0; i < 4; ++i) {
      if (from_index(i).name() == s) return from_index(i);
    }
    throw std::invalid_argument("unknown Bell outcome name: " + s);
  }

  friend bool operator==(const BellOutcome&, const BellOutcome&) = default;
};

class StateVector {
 public:
  StateVector() = default;

  static StateVector basis_state(int n_qubits, std::size_t index) {
    check_register_size(n_qubits);
    std::vector<Amplitude> amps(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    if (index >= amps.size()) throw std::invalid_argument("basis state index out of range");
    amps[index] = Amplitude{1.0, 0.0};
    return StateVector(n_qubits, std::move(amps));
  }

  // Validating constructor: length 2^n, finite entries, unit norm within 1e-9.
  static StateVector from_amplitudes(int n_qubits, std::vector<Amplitude> amps) {
    check_register_size(n_qubits);
    if (amps.size() != (std::size_t{1} << n_qubits))
      throw std::invalid_argument("amplitude vector length must be 2^n_qubits");
    double norm = 0.0;
    for (const Amplitude& a : amps) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw std::invalid_argument("amplitudes must be finite");
      norm += std::norm(a);
    }
    if (std::abs(norm - 1.0) > kProbTolerance)
      throw std::invalid_argument("state vector is not normalized");
    return StateVector(n_qubits, std::move(amps));
  }

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const Amplitude& amp(std::size_t i) const { return amps_[i]; }
  std::span<const Amplitude> amps() const { return amps_; }

  double norm_sq() const {
    double s = 0.0;
    for (const Amplitude& a : amps_) s += std::norm(a);
    return s;
  }

  // Value of qubit q within a basis index (qubit 0 = most significant bit).
  int bit(std::size_t index, int q) const {
    return static_cast<int>((index >> (n_qubits_ - 1 - q)) & 1u);
  }

  std::size_t qubit_mask(int q) const {
    return std::size_t{1} << (n_qubits_ - 1 - q);
  }

  void check_qubit(int q) const {
    if (q < 0 || q >= n_qubits_) throw std::invalid_argument("qubit index out of range");
  }

 private:
  StateVector(int n_qubits, std::vector<Amplitude> amps)
      : n_qubits_(n_qubits), amps_(std::move(amps)) {}

  static void check_register_size(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
      throw std::invalid_argument("register size must be between 1 and 16 qubits");
  }

  friend StateVector prepare_ghz(int n);
  friend StateVector tensor(const StateVector& a, const StateVector& b);
  friend StateVector apply_pauli(const StateVector& state, int q, PauliChoice op);
  friend StateVector apply_hadamard(const StateVector& state, int q);
  friend StateVector apply_cnot(const StateVector& state, int control, int target);
  friend std::pair<int, StateVector> measure_qubit(const StateVector& state, int q,
                                                   MeasBasis basis, Rng& rng);
  friend std::pair<BellOutcome, StateVector> measure_bell(const StateVector& state, int q1,
                                                          int q2, Rng& rng);

  int n_qubits_ = 0;
  std::vector<Amplitude> amps_;
};

// (|0...0> + |1...1>)/sqrt(2) on n qubits, 2 <= n <= 16.
inline StateVector prepare_ghz(int n) {
  if (n < 2 || n > kMaxQubits)
    throw std::invalid_argument("GHZ register size must be between 2 and 16 qubits");
  std::vector<Amplitude> amps(std::size_t{1} << n, Amplitude{0.0, 0.0});
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  amps.front() = Amplitude{inv_sqrt2, 0.0};
  amps.back() = Amplitude{inv_sqrt2, 0.0};
  return StateVector(n, std::move(amps));
}

// Product state; qubits of `a` precede qubits of `b` in the new register.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
  const int n = a.n_qubits() + b.n_qubits();
  if (n > kMaxQubits) throw std::invalid_argument("tensor product exceeds the 16-qubit cap");
  std::vector<Amplitude> amps(std::size_t{1} << n);
  const std::size_t bd = b.dim();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < bd; ++j) {
      amps[(i << b.n_qubits()) | j] = a.amp(i) * b.amp(j);
    }
  }
  return StateVector(n, std::move(amps));
}

inline StateVector apply_pauli(const StateVector& state, int q, PauliChoice op) {
  state.check_qubit(q);
  StateVector out = state;
  if (op == PauliChoice::Identity) return out;
  const std::size_t mask = state.qubit_mask(q);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if ((i & mask) == 0) {
      const std::size_t j = i | mask;
      const Amplitude a0 = state.amp(i);
      const Amplitude a1 = state.amp(j);
      out.amps_[i] = a1;
      out.amps_[j] = -a0;
    }
  }
  return out;
}

inline StateVector apply_hadamard(const StateVector& state, int q) {
  state.check_qubit(q);
  StateVector out = state;
  const std::size_t mask = state.qubit_mask(q);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if ((i & mask) == 0) {
      const std::size_t j = i | mask;
      const Amplitude a0 = state.amp(i);
      const Amplitude a1 = state.amp(j);
      out.amps_[i] = (a0 + a1) * inv_sqrt2;
      out.amps_[j] = (a0 - a1) * inv_sqrt2;
    }
  }
  return out;
}

inline StateVector apply_cnot(const StateVector& state, int control, int target) {
  state.check_qubit(control);
  state.check_qubit(target);
  if (control == target) throw std::invalid_argument("CNOT control and target must differ");
  StateVector out = state;
  const std::size_t cm = state.qubit_mask(control);
  const std::size_t tm = state.qubit_mask(target);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if ((i & cm) && !(i & tm)) std::swap(out.amps_[i], out.amps_[i | tm]);
  }
  return out;
}

// Projective measurement of one qubit. Z outcomes are 0/1; X outcomes are
// 0 for |+> and 1 for |->. Returns the sampled outcome and the renormalized
// collapsed register.
inline std::pair<int, StateVector> measure_qubit(const StateVector& state, int q,
                                                 MeasBasis basis, Rng& rng) {
  state.check_qubit(q);
  const std::size_t mask = state.qubit_mask(q);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::array<double, 2> prob{0.0, 0.0};
  if (basis == MeasBasis::Z) {
    for (std::size_t i = 0; i < state.dim(); ++i) {
      prob[(i & mask) ? 1 : 0] += std::norm(state.amp(i));
    }
  } else {
    for (std::size_t i = 0; i < state.dim(); ++i) {
      if ((i & mask) == 0) {
        const Amplitude a0 = state.amp(i);
        const Amplitude a1 = state.amp(i | mask);
        prob[0] += std::norm((a0 + a1) * inv_sqrt2);
        prob[1] += std::norm((a0 - a1) * inv_sqrt2);
      }
    }
  }

  const int outcome = rng.uniform01() < prob[0] ? 0 : 1;
  if (prob[outcome] < kBranchEpsilon)
    throw std::logic_error("measurement selected a zero-probability branch");
  const double scale = 1.0 / std::sqrt(prob[outcome]);

  StateVector out = state;
  if (basis == MeasBasis::Z) {
    for (std::size_t i = 0; i < state.dim(); ++i) {
      const bool hit = ((i & mask) != 0) == (outcome == 1);
      out.amps_[i] = hit ? state.amp(i) * scale : Amplitude{0.0, 0.0};
    }
  } else {
    const double sign = outcome == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
      if ((i & mask) == 0) {
        const std::size_t j = i | mask;
        // Projection onto |+-><+-|: both components become (a0 +- a1)/2.
        const Amplitude proj = (state.amp(i) + sign * state.amp(j)) * 0.5;
        out.amps_[i] = proj * scale;
        out.amps_[j] = sign * proj * scale;
      }
    }
  }
  return {outcome, std::move(out)};
}

// Exact Born probabilities of the four Bell outcomes on the (q1, q2) pair,
// in the order phi+, phi-, psi+, psi-. No collapse.
inline std::array<double, 4> bell_pair_distribution(const StateVector& state, int q1, int q2) {
  state.check_qubit(q1);
  state.check_qubit(q2);
  if (q1 == q2) throw std::invalid_argument("Bell pair qubits must be distinct");
  const std::size_t m1 = state.qubit_mask(q1);
  const std::size_t m2 = state.qubit_mask(q2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::array<double, 4> prob{0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if ((i & m1) == 0 && (i & m2) == 0) {
      const Amplitude a00 = state.amp(i);
      const Amplitude a01 = state.amp(i | m2);
      const Amplitude a10 = state.amp(i | m1);
      const Amplitude a11 = state.amp(i | m1 | m2);
      prob[0] += std::norm((a00 + a11) * inv_sqrt2);
      prob[1] += std::norm((a00 - a11) * inv_sqrt2);
      prob[2] += std::norm((a01 + a10) * inv_sqrt2);
      prob[3] += std::norm((a01 - a10) * inv_sqrt2);
    }
  }
  return prob;
}

// Projective measurement of the (q1, q2) pair in the Bell basis.
inline std::pair<BellOutcome, StateVector> measure_bell(const StateVector& state, int q1,
                                                        int q2, Rng& rng) {
  const std::array<double, 4> prob = bell_pair_distribution(state, q1, q2);

  const double u = rng.uniform01();
  int outcome = -1;
  double cumulative = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (prob[k] < kBranchEpsilon) continue;
    cumulative += prob[k];
    outcome = k;
    if (u < cumulative) break;
  }
  if (outcome < 0) throw std::logic_error("Bell measurement found no nonzero branch");

  const std::size_t m1 = state.qubit_mask(q1);
  const std::size_t m2 = state.qubit_mask(q2);
  const double scale = 1.0 / std::sqrt(prob[outcome]);
  const BellOutcome bell = BellOutcome::from_index(outcome);
  const double sign = bell.sign == Sign::Plus ? 1.0 : -1.0;

  StateVector out = state;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if ((i & m1) == 0 && (i & m2) == 0) {
      const std::size_t i01 = i | m2;
      const std::size_t i10 = i | m1;
      const std::size_t i11 = i | m1 | m2;
      if (bell.kind == BellKind::Phi) {
        const Amplitude proj = (state.amp(i) + sign * state.amp(i11)) * 0.5;
        out.amps_[i] = proj * scale;
        out.amps_[i11] = sign * proj * scale;
        out.amps_[i01] = Amplitude{0.0, 0.0};
        out.amps_[i10] = Amplitude{0.0, 0.0};
      } else {
        const Amplitude proj = (state.amp(i01) + sign * state.amp(i10)) * 0.5;
        out.amps_[i01] = proj * scale;
        out.amps_[i10] = sign * proj * scale;
        out.amps_[i] = Amplitude{0.0, 0.0};
        out.amps_[i11] = Amplitude{0.0, 0.0};
      }
    }
  }
  return {bell, std::move(out)};
}

// Exact marginal distribution of measuring the listed qubits in the given
// basis (the first listed qubit is the most significant outcome bit). All
// other qubits are left unmeasured and summed over. X outcomes count |-> as 1.
inline std::vector<double> outcome_distribution(const StateVector& state,
                                                std::span<const int> qubits, MeasBasis basis) {
  for (int q : qubits) state.check_qubit(q);
  StateVector rotated = state;
  if (basis == MeasBasis::X) {
    for (int q : qubits) rotated = apply_hadamard(rotated, q);
  }
  std::vector<double> dist(std::size_t{1} << qubits.size(), 0.0);
  for (std::size_t i = 0; i < rotated.dim(); ++i) {
    std::size_t pattern = 0;
    for (int q : qubits) pattern = (pattern << 1) | static_cast<std::size_t>(rotated.bit(i, q));
    dist[pattern] += std::norm(rotated.amp(i));
  }
  return dist;
}

inline Amplitude inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits())
    throw std::invalid_argument("inner product requires equal register sizes");
  Amplitude acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.amp(i)) * b.amp(i);
  return acc;
}

// Exact joint distribution of simultaneous Bell measurements on disjoint
// qubit pairs. Keys are Bell indices (phi+=0, phi-=1, psi+=2, psi-=3), one
// per pair. Works by contracting each nonzero amplitude against the Bell
// overlaps <phi+-|00>=1/sqrt2, <phi+-|11>=+-1/sqrt2, <psi+-|01>=1/sqrt2,
// <psi+-|10>=+-1/sqrt2, so the cost is (#nonzero amplitudes) * 2^(#pairs).
inline std::map<std::vector<std::uint8_t>, double> bell_tuple_distribution(
    const StateVector& state, std::span<const std::pair<int, int>> pairs) {
  std::vector<bool> seen(state.n_qubits(), false);
  for (const auto& [q1, q2] : pairs) {
    state.check_qubit(q1);
    state.check_qubit(q2);
    if (q1 == q2 || seen[q1] || seen[q2])
      throw std::invalid_argument("Bell measurement pairs must be disjoint");
    seen[q1] = seen[q2] = true;
  }

  const std::size_t n_pairs = pairs.size();
  const double overlap = std::pow(1.0 / std::sqrt(2.0), static_cast<double>(n_pairs));

  std::map<std::vector<std::uint8_t>, Amplitude> amp_by_tuple;
  std::vector<std::uint8_t> key(n_pairs);
  for (std::size_t z = 0; z < state.dim(); ++z) {
    if (std::norm(state.amp(z)) < 1e-24) continue;
    for (std::size_t signs = 0; signs < (std::size_t{1} << n_pairs); ++signs) {
      double coeff_sign = 1.0;
      for (std::size_t p = 0; p < n_pairs; ++p) {
        const int b1 = state.bit(z, pairs[p].first);
        const int b2 = state.bit(z, pairs[p].second);
        const int sign_bit = static_cast<int>((signs >> p) & 1u);
        key[p] = static_cast<std::uint8_t>(((b1 ^ b2) << 1) | sign_bit);
        if (sign_bit && b1) coeff_sign = -coeff_sign;
      }
      amp_by_tuple[key] += state.amp(z) * overlap * coeff_sign;
    }
  }

  std::map<std::vector<std::uint8_t>, double> dist;
  for (const auto& [tuple, amp] : amp_by_tuple) {
    const double p = std::norm(amp);
    if (p > kBranchEpsilon) dist.emplace(tuple, p);
  }
  return dist;
}

}  // namespace ghzauth
