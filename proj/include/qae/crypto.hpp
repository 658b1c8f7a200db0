#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qae/error.hpp"
#include "qae/types.hpp"

// Ed25519 (RFC 8032) credentials. Signatures are deterministic, so the same
// credential signed by the same key always yields the same 64 bytes.
namespace qae::crypto {

using PublicKey = std::array<std::uint8_t, 32>;
using Seed = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;

struct KeyPair {
  PublicKey pk{};
  Seed seed{};  // sk is expanded from the seed on demand

  static constexpr const char* scheme = "Ed25519";
};

struct SignedCredential {
  Credential credential;
  Signature signature{};
  PublicKey signer_pk{};

  bool operator==(const SignedCredential&) const = default;
};

/// Random keypair when `seed` is empty. Throws Errc::bad_seed if the seed is
/// not 32 bytes.
KeyPair keygen(std::optional<std::span<const std::uint8_t>> seed = std::nullopt);

/// 4-byte big-endian pair count, then "name=value" segments sorted bytewise
/// and joined by 0x1F. Names or values containing 0x1F or 0x3D are rejected.
std::vector<std::uint8_t> canonical_encode(const Credential& c);

SignedCredential sign_credential(const KeyPair& key, const Credential& c);

bool verify_credential(const PublicKey& pk, const SignedCredential& sc);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

template <std::size_t N>
std::array<std::uint8_t, N> base64_decode_fixed(std::string_view text) {
  auto raw = base64_decode(text);
  if (raw.size() != N) {
    throw Error(Errc::corrupt_file, "expected " + std::to_string(N) +
                                        " decoded bytes, got " +
                                        std::to_string(raw.size()));
  }
  std::array<std::uint8_t, N> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

}  // namespace qae::crypto
