#pragma once

// Test-only brute-force reference implementations. Everything here works on
// dense vectors via naive Kronecker products, full-matrix operators and
// explicit inner products, independent of the library's sparse/pairwise
// code paths, so the two can check each other.

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "ghzauth/statevec.hpp"

namespace oracle {

using cvec = std::vector<std::complex<double>>;
using cmat = std::vector<cvec>;  // row-major dense matrix

inline cvec kron(const cvec& a, const cvec& b) {
  cvec out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
  return out;
}

inline cmat kron(const cmat& a, const cmat& b) {
  const std::size_t ar = a.size(), ac = a[0].size(), br = b.size(), bc = b[0].size();
  cmat out(ar * br, cvec(ac * bc));
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t j = 0; j < ac; ++j)
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
  return out;
}

inline cvec matvec(const cmat& m, const cvec& v) {
  cvec out(m.size(), {0.0, 0.0});
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

inline cmat identity2() { return {{{1, 0}, {0, 0}}, {{0, 0}, {1, 0}}}; }
inline cmat isigma_y2() { return {{{0, 0}, {1, 0}}, {{-1, 0}, {0, 0}}}; }

// Full 2^n x 2^n operator applying `u` on qubit q (big-endian ordering).
inline cmat embed_1q(const cmat& u, int n, int q) {
  cmat out = {{{1, 0}}};
  for (int i = 0; i < n; ++i) out = kron(out, i == q ? u : identity2());
  return out;
}

inline std::complex<double> dot(const cvec& a, const cvec& b) {
  std::complex<double> s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline cvec bell_vec(int index) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (index) {
    case 0: return {{s, 0}, {0, 0}, {0, 0}, {s, 0}};
    case 1: return {{s, 0}, {0, 0}, {0, 0}, {-s, 0}};
    case 2: return {{0, 0}, {s, 0}, {s, 0}, {0, 0}};
    default: return {{0, 0}, {s, 0}, {-s, 0}, {0, 0}};
  }
}

inline cvec ghz_vec(int n, std::uint32_t pattern, bool minus) {
  cvec v(std::size_t{1} << n, {0.0, 0.0});
  const double s = 1.0 / std::sqrt(2.0);
  v[pattern] = {s, 0};
  v[~std::size_t{pattern} & (v.size() - 1)] = {minus ? -s : s, 0};
  return v;
}

// Reorders qubits: bit of old position i moves to new position perm[i].
inline cvec permute_qubits(const cvec& v, int n, const std::vector<int>& perm) {
  cvec out(v.size(), {0.0, 0.0});
  for (std::size_t z = 0; z < v.size(); ++z) {
    std::size_t nz = 0;
    for (int i = 0; i < n; ++i) {
      const std::size_t bit = (z >> (n - 1 - i)) & 1u;
      nz |= bit << (n - 1 - perm[i]);
    }
    out[nz] = v[z];
  }
  return out;
}

inline cvec to_cvec(const ghzauth::StateVector& s) {
  return cvec(s.amps().begin(), s.amps().end());
}

// Joint Bell-measurement distribution over pairs (i, n+i) of a 2n-qubit
// state, by building every Bell-tuple basis vector with Kronecker products
// and taking |<tuple|state>|^2.
inline std::map<std::vector<std::uint8_t>, double> bell_tuple_distribution(const cvec& state,
                                                                           int n_pairs) {
  const int n_qubits = 2 * n_pairs;
  // Tuple vectors come out in pair-major qubit order (P0,Q0,P1,Q1,...);
  // move them to the state's layout (P0..P(n-1), Q0..Q(n-1)).
  std::vector<int> perm(n_qubits);
  for (int i = 0; i < n_pairs; ++i) {
    perm[2 * i] = i;
    perm[2 * i + 1] = n_pairs + i;
  }

  std::map<std::vector<std::uint8_t>, double> dist;
  const std::size_t n_tuples = std::size_t{1} << (2 * n_pairs);
  for (std::size_t t = 0; t < n_tuples; ++t) {
    std::vector<std::uint8_t> key(n_pairs);
    cvec tuple_vec = {{1.0, 0.0}};
    for (int p = 0; p < n_pairs; ++p) {
      const int idx = static_cast<int>((t >> (2 * (n_pairs - 1 - p))) & 3u);
      key[p] = static_cast<std::uint8_t>(idx);
      tuple_vec = kron(tuple_vec, bell_vec(idx));
    }
    tuple_vec = permute_qubits(tuple_vec, n_qubits, perm);
    const double prob = std::norm(dot(tuple_vec, state));
    if (prob > 1e-12) dist.emplace(std::move(key), prob);
  }
  return dist;
}

}  // namespace oracle
