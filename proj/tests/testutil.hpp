#pragma once

// Shared helpers for the unit and acceptance suites.

#include <cmath>
#include <complex>
#include <vector>

#include "ghzauth/adversary.hpp"
#include "ghzauth/rng.hpp"
#include "ghzauth/statevec.hpp"

namespace testutil {

// Random collective-attack coefficients with per-branch unit norm and
// |alpha1| = |delta2|, keeping the induced error rate inside [0.05, 0.95] so
// three-sigma bands around it stay informative.
inline ghzauth::CollectiveCoeffs random_symmetric_coeffs(ghzauth::Rng& rng) {
  const auto random_amp = [&rng]() {
    return ghzauth::Amplitude{rng.uniform01() - 0.5, rng.uniform01() - 0.5};
  };

  ghzauth::CollectiveCoeffs coeffs;
  const double alpha_sq = 0.05 + 0.9 * rng.uniform01();

  for (int branch = 0; branch < 2; ++branch) {
    ghzauth::Amplitude rest[3] = {random_amp(), random_amp(), random_amp()};
    double rest_norm = 0.0;
    for (const auto& a : rest) rest_norm += std::norm(a);
    const double rest_scale = std::sqrt((1.0 - alpha_sq) / rest_norm);

    ghzauth::Amplitude lead = random_amp();
    lead *= std::sqrt(alpha_sq) / std::abs(lead);

    coeffs.c[4 * branch] = lead;
    for (int i = 0; i < 3; ++i) coeffs.c[4 * branch + 1 + i] = rest[i] * rest_scale;
  }
  coeffs.validate();
  return coeffs;
}

// Empirical fraction of Z-basis check samples that violate the correlation
// rule under the given attack: per sample, route one GHZ state through the
// channel and Z-measure the verifier's and users' qubits.
inline double empirical_z_mismatch(const ghzauth::AttackModel& model, int r, int samples,
                                   ghzauth::Rng& rng) {
  using namespace ghzauth;
  const ChannelState prototype = channel_transform(model, r);
  int mismatches = 0;
  std::vector<int> outcomes(r + 1);
  for (int s = 0; s < samples; ++s) {
    StateVector state = prototype.state;
    auto [trent, after] = measure_qubit(state, prototype.trent_qubit, MeasBasis::Z, rng);
    outcomes[0] = trent;
    state = std::move(after);
    for (int j = 0; j < r; ++j) {
      auto [user, next] = measure_qubit(state, prototype.user_qubits[j], MeasBasis::Z, rng);
      outcomes[j + 1] = user;
      state = std::move(next);
    }
    if (correlation_violated(MeasBasis::Z, outcomes)) ++mismatches;
  }
  return static_cast<double>(mismatches) / samples;
}

inline double three_sigma(double p, int samples) {
  return 3.0 * std::sqrt(p * (1.0 - p) / samples);
}

}  // namespace testutil
