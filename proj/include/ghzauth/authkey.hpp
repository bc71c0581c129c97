#pragma once

// Authentication-key derivation: AK = h(ID, C) with h instantiated as
// truncated SHA-256 over the big-endian serialization of (identity number,
// counter), so keys are bit-exact across implementations. Conformance
// vectors live in data/authkey_vectors.json.

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghzauth {

inline constexpr int kDigestBits = 256;

inline std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 32> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != digest.size()) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  return digest;
}

// Bit strings are stored one bit per byte (values 0/1) and serialize
// MSB-first: bit 0 occupies the most significant bit of the first byte, and
// a final partial byte is zero-padded in its low bits.
inline std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
  }
  return bytes;
}

inline std::string bits_to_hex(std::span<const std::uint8_t> bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (const std::uint8_t byte : pack_bits(bits)) {
    out += digits[byte >> 4];
    out += digits[byte & 0xf];
  }
  return out;
}

inline std::vector<std::uint8_t> bits_from_hex(const std::string& hex) {
  std::vector<std::uint8_t> bits;
  bits.reserve(hex.size() * 4);
  for (const char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::invalid_argument("invalid hex digit in bit string");
    for (int b = 3; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
  }
  return bits;
}

// Secret identity number shared between the verifier and one user; a bit
// string of configurable length l (default 64).
struct IdentityNumber {
  std::vector<std::uint8_t> bits;

  static IdentityNumber from_hex(const std::string& hex) {
    return IdentityNumber{bits_from_hex(hex)};
  }

  static IdentityNumber from_value(std::uint64_t value, int length_bits = 64) {
    if (length_bits < 1 || length_bits > 64)
      throw std::invalid_argument("identity value form supports 1..64 bits");
    std::vector<std::uint8_t> bits(length_bits);
    for (int i = 0; i < length_bits; ++i) {
      bits[i] = static_cast<std::uint8_t>((value >> (length_bits - 1 - i)) & 1u);
    }
    return IdentityNumber{std::move(bits)};
  }

  int length() const { return static_cast<int>(bits.size()); }
  std::string to_hex() const { return bits_to_hex(bits); }
};

// Call counter on the user's hash function, encoded as an m-bit big-endian
// integer (default m = 64).
struct Counter {
  std::uint64_t value = 0;
  int width_bits = 64;

  Counter() = default;
  Counter(std::uint64_t v, int m = 64) : value(v), width_bits(m) {
    if (m < 1 || m > 64) throw std::invalid_argument("counter width must be 1..64 bits");
    if (m < 64 && v >> m) throw std::invalid_argument("counter value exceeds its width");
  }

  std::vector<std::uint8_t> to_bytes() const {
    const int n_bytes = (width_bits + 7) / 8;
    std::vector<std::uint8_t> bytes(n_bytes);
    for (int i = 0; i < n_bytes; ++i) {
      bytes[n_bytes - 1 - i] = static_cast<std::uint8_t>((value >> (8 * i)) & 0xffu);
    }
    return bytes;
  }
};

struct AuthKey {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  std::string to_hex() const { return bits_to_hex(bits); }
};

// First n bits of SHA-256(id_bytes || counter_bytes). Bit 0 of the key is
// the most significant bit of the first digest byte. n is capped at one
// digest block; use extend_key for longer keys.
inline AuthKey derive_key(const IdentityNumber& id, const Counter& counter, int n) {
  if (n < 0 || n > kDigestBits)
    throw std::invalid_argument("key length must be between 0 and 256 bits");
  std::vector<std::uint8_t> message = pack_bits(id.bits);
  const std::vector<std::uint8_t> counter_bytes = counter.to_bytes();
  message.insert(message.end(), counter_bytes.begin(), counter_bytes.end());
  const std::array<std::uint8_t, 32> digest = sha256(message);

  AuthKey key;
  key.bits.reserve(n);
  for (int i = 0; i < n; ++i) {
    key.bits.push_back(static_cast<std::uint8_t>((digest[i / 8] >> (7 - i % 8)) & 1u));
  }
  return key;
}

// Key stretching: concatenates full digest blocks for counters start,
// start+1, ... and truncates to `needed` bits. Throws when the counter
// space cannot supply enough blocks.
inline AuthKey extend_key(const IdentityNumber& id, const Counter& start, std::size_t needed) {
  if (needed == 0) throw std::invalid_argument("extend_key needs at least one bit");
  const std::uint64_t blocks = (needed + kDigestBits - 1) / kDigestBits;

  if (start.width_bits < 64) {
    const std::uint64_t limit = std::uint64_t{1} << start.width_bits;
    if (start.value + blocks >= limit) throw std::overflow_error("counter space exhausted");
  } else if (start.value > ~std::uint64_t{0} - blocks) {
    throw std::overflow_error("counter space exhausted");
  }

  AuthKey key;
  key.bits.reserve(needed);
  for (std::uint64_t j = 0; j < blocks; ++j) {
    const AuthKey block = derive_key(id, Counter(start.value + j, start.width_bits), kDigestBits);
    key.bits.insert(key.bits.end(), block.bits.begin(), block.bits.end());
  }
  key.bits.resize(needed);
  return key;
}

// Number of counter values extend_key consumes for a given request.
inline std::uint64_t blocks_for(std::size_t needed) {
  return (needed + kDigestBits - 1) / kDigestBits;
}

}  // namespace ghzauth
