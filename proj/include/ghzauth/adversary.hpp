#pragma once

// Channel attack models and their detection metrics. Attacks act on the
// qubits in flight from the verifier to the users, once per distributed GHZ
// state. Each transform is a pure function: attacks that involve adversary
// measurements (measure-resend) are purified into basis copies onto ancilla
// qubits, which leaves every party-visible statistic unchanged while keeping
// the sessions deterministic and replayable.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghzauth/statevec.hpp"

namespace ghzauth {

struct NoAttack {};

// Eve substitutes her own GHZ states: she intercepts the user-bound qubits
// and forwards qubits of a GHZ state she prepared herself, keeping the
// originals. Users end up correlated with Eve instead of the verifier.
struct ImpersonateTrent {};

// Baseline extension (not part of the core protocol family): Eve measures
// each user-bound qubit in a fixed basis and forwards the collapsed qubit.
struct MeasureResend {
  MeasBasis basis = MeasBasis::Z;
};

// General collective attack: a unitary couples the two in-flight user qubits
// to Eve's probe. With the probe states taken mutually orthonormal (the
// documented default geometry), the joint state over (T, A1, A2, probe) is
//
//   (1/sqrt2) [ |0>( a1|00>|e0> + b1|01>|e1> + g1|10>|e2> + d1|11>|e3> )
//             + |1>( d2|11>|e4> + g2|10>|e5> + b2|01>|e6> + a2|00>|e7> ) ]
//
// with each branch's coefficient vector normalized to 1. The probe is
// modeled as a 3-qubit ancilla register.
struct CollectiveCoeffs {
  // Order: alpha1, beta1, gamma1, delta1, delta2, gamma2, beta2, alpha2.
  std::array<Amplitude, 8> c{};

  double branch_norm_sq(int branch) const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += std::norm(c[4 * branch + i]);
    return s;
  }

  void validate() const {
    static const char* names[8] = {"alpha1", "beta1", "gamma1", "delta1",
                                   "delta2", "gamma2", "beta2", "alpha2"};
    for (int i = 0; i < 8; ++i) {
      if (!std::isfinite(c[i].real()) || !std::isfinite(c[i].imag()))
        throw std::invalid_argument(std::string("collective coefficient ") + names[i] +
                                    " is not finite");
    }
    if (std::abs(branch_norm_sq(0) - 1.0) > kProbTolerance)
      throw std::invalid_argument(
          "collective attack branch 1 (alpha1,beta1,gamma1,delta1) is not normalized");
    if (std::abs(branch_norm_sq(1) - 1.0) > kProbTolerance)
      throw std::invalid_argument(
          "collective attack branch 2 (delta2,gamma2,beta2,alpha2) is not normalized");
  }

  bool symmetric() const { return std::abs(std::abs(c[0]) - std::abs(c[4])) <= kProbTolerance; }
};

struct GeneralCollective {
  CollectiveCoeffs coeffs;
};

using AttackModel = std::variant<NoAttack, ImpersonateTrent, MeasureResend, GeneralCollective>;

inline std::string attack_name(const AttackModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, NoAttack>) return "none";
        else if constexpr (std::is_same_v<T, ImpersonateTrent>) return "impersonate_trent";
        else if constexpr (std::is_same_v<T, MeasureResend>) return "measure_resend";
        else return "general_collective";
      },
      model);
}

// One distributed GHZ state after the channel: the full joint register
// (including any adversary holdings) plus the positions of the qubits the
// protocol parties actually hold.
struct ChannelState {
  StateVector state;
  int trent_qubit = 0;
  std::vector<int> user_qubits;

  std::vector<int> party_qubits() const {
    std::vector<int> qs{trent_qubit};
    qs.insert(qs.end(), user_qubits.begin(), user_qubits.end());
    return qs;
  }
};

namespace detail {

inline StateVector collective_state(const CollectiveCoeffs& coeffs) {
  coeffs.validate();
  // Register layout: (T, A1, A2, p0, p1, p2); probe basis state i pairs with
  // coefficient c[i].
  static constexpr std::uint32_t party_bits[8] = {0b000, 0b001, 0b010, 0b011,
                                                  0b111, 0b110, 0b101, 0b100};
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<Amplitude> amps(64, Amplitude{0.0, 0.0});
  for (int i = 0; i < 8; ++i) {
    amps[(party_bits[i] << 3) | static_cast<std::uint32_t>(i)] = coeffs.c[i] * inv_sqrt2;
  }
  return StateVector::from_amplitudes(6, std::move(amps));
}

}  // namespace detail

// Applies the channel adversary to one freshly prepared (r+1)-qubit GHZ
// state. Returns the joint register with the party qubit positions.
inline ChannelState channel_transform(const AttackModel& model, int r) {
  if (r < 1 || r + 1 > kMaxQubits) throw std::invalid_argument("user count out of range");

  return std::visit(
      [&](const auto& m) -> ChannelState {
        using T = std::decay_t<decltype(m)>;
        ChannelState cs;
        if constexpr (std::is_same_v<T, NoAttack>) {
          cs.state = prepare_ghz(r + 1);
          cs.trent_qubit = 0;
          for (int j = 0; j < r; ++j) cs.user_qubits.push_back(1 + j);
        } else if constexpr (std::is_same_v<T, ImpersonateTrent>) {
          // Qubits 0..r: the verifier's original state (user qubits now held
          // by Eve). Qubits r+1..2r+1: Eve's own GHZ state, whose last r
          // qubits are forwarded to the users.
          if (2 * (r + 1) > kMaxQubits)
            throw std::invalid_argument("impersonation attack exceeds the register cap");
          cs.state = tensor(prepare_ghz(r + 1), prepare_ghz(r + 1));
          cs.trent_qubit = 0;
          for (int j = 0; j < r; ++j) cs.user_qubits.push_back(r + 2 + j);
        } else if constexpr (std::is_same_v<T, MeasureResend>) {
          // Eve's measurement of user qubit j is purified as a basis copy
          // onto ancilla qubit r+1+j.
          if (2 * r + 1 > kMaxQubits)
            throw std::invalid_argument("measure-resend attack exceeds the register cap");
          StateVector state = tensor(prepare_ghz(r + 1), StateVector::basis_state(r, 0));
          for (int j = 0; j < r; ++j) {
            const int q = 1 + j;
            const int ancilla = r + 1 + j;
            if (m.basis == MeasBasis::X) state = apply_hadamard(state, q);
            state = apply_cnot(state, q, ancilla);
            if (m.basis == MeasBasis::X) state = apply_hadamard(state, q);
          }
          cs.state = std::move(state);
          cs.trent_qubit = 0;
          for (int j = 0; j < r; ++j) cs.user_qubits.push_back(1 + j);
        } else {
          if (r != 2)
            throw std::invalid_argument("the collective attack model is defined for r = 2 users");
          cs.state = detail::collective_state(m.coeffs);
          cs.trent_qubit = 0;
          cs.user_qubits = {1, 2};
        }
        return cs;
      },
      model);
}

// Correlation rule of the sampled eavesdropping check, for outcomes ordered
// (verifier, user 1, ..., user r): in Z all outcomes must be equal; in X the
// total number of |-> outcomes must be even.
inline bool correlation_violated(MeasBasis basis, std::span<const int> outcomes) {
  if (basis == MeasBasis::Z) {
    for (const int o : outcomes) {
      if (o != outcomes[0]) return true;
    }
    return false;
  }
  const int minus = std::accumulate(outcomes.begin(), outcomes.end(), 0);
  return minus % 2 != 0;
}

// Exact per-sampled-state probability that the check's correlation rule is
// violated, by exhaustive branch enumeration on the joint state (no
// sampling). z_mix is the probability that a given sample uses the Z basis.
inline double detection_probability(const AttackModel& model, int r, double z_mix) {
  if (z_mix < 0.0 || z_mix > 1.0) throw std::invalid_argument("basis mix must be in [0, 1]");
  const ChannelState cs = channel_transform(model, r);
  const std::vector<int> parties = cs.party_qubits();

  const auto violation = [&](MeasBasis basis) {
    const std::vector<double> dist = outcome_distribution(cs.state, parties, basis);
    double p = 0.0;
    std::vector<int> bits(parties.size());
    for (std::size_t pattern = 0; pattern < dist.size(); ++pattern) {
      for (std::size_t i = 0; i < parties.size(); ++i) {
        bits[i] = static_cast<int>((pattern >> (parties.size() - 1 - i)) & 1u);
      }
      if (correlation_violated(basis, bits)) p += dist[pattern];
    }
    return p;
  };

  return z_mix * violation(MeasBasis::Z) + (1.0 - z_mix) * violation(MeasBasis::X);
}

// Error rate the collective attack induces on Z-basis check samples:
// 1 - |alpha1|^2. Requires the symmetric case |alpha1| = |delta2|, where the
// two branch rates coincide; use collective_error_rates otherwise.
inline double collective_error_rate(const CollectiveCoeffs& coeffs) {
  coeffs.validate();
  if (!coeffs.symmetric())
    throw std::invalid_argument(
        "collective_error_rate requires |alpha1| = |delta2|; use collective_error_rates");
  return 1.0 - std::norm(coeffs.c[0]);
}

// Per-branch error rates (1 - |alpha1|^2, 1 - |delta2|^2) for asymmetric
// coefficient choices.
inline std::pair<double, double> collective_error_rates(const CollectiveCoeffs& coeffs) {
  coeffs.validate();
  return {1.0 - std::norm(coeffs.c[0]), 1.0 - std::norm(coeffs.c[4])};
}

// --- JSON form -------------------------------------------------------------
//
// {"type": "none"}
// {"type": "impersonate_trent"}
// {"type": "measure_resend", "basis": "Z"|"X"}
// {"type": "general_collective", "coeffs": [[re, im] x 8]}
//   coefficient order: alpha1, beta1, gamma1, delta1, delta2, gamma2, beta2, alpha2

inline nlohmann::json attack_to_json(const AttackModel& model) {
  nlohmann::json j;
  j["type"] = attack_name(model);
  if (const auto* mr = std::get_if<MeasureResend>(&model)) {
    j["basis"] = basis_name(mr->basis);
  } else if (const auto* gc = std::get_if<GeneralCollective>(&model)) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const Amplitude& a : gc->coeffs.c) coeffs.push_back({a.real(), a.imag()});
    j["coeffs"] = coeffs;
  }
  return j;
}

inline AttackModel attack_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "none") return NoAttack{};
  if (type == "impersonate_trent") return ImpersonateTrent{};
  if (type == "measure_resend") {
    const std::string basis = j.at("basis").get<std::string>();
    if (basis != "Z" && basis != "X")
      throw std::invalid_argument("measure_resend basis must be \"Z\" or \"X\"");
    return MeasureResend{basis == "Z" ? MeasBasis::Z : MeasBasis::X};
  }
  if (type == "general_collective") {
    const nlohmann::json& coeffs = j.at("coeffs");
    if (!coeffs.is_array() || coeffs.size() != 8)
      throw std::invalid_argument("general_collective requires eight [re, im] coefficients");
    GeneralCollective gc;
    for (int i = 0; i < 8; ++i) {
      const nlohmann::json& pair = coeffs[i];
      if (!pair.is_array() || pair.size() != 2)
        throw std::invalid_argument("collective coefficients must be [re, im] pairs");
      gc.coeffs.c[i] = Amplitude{pair[0].get<double>(), pair[1].get<double>()};
    }
    gc.coeffs.validate();
    return gc;
  }
  throw std::invalid_argument("unknown attack type: " + type);
}

}  // namespace ghzauth
