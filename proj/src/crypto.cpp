#include "qae/crypto.hpp"

#include <mutex>

#include <sodium.h>

namespace qae::crypto {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error(Errc::invalid_configuration, "libsodium init failed");
  });
}

struct Expanded {
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
  ~Expanded() { sodium_memzero(sk.data(), sk.size()); }
};

bool reserved(std::string_view s) {
  return s.find('\x1f') != std::string_view::npos || s.find('=') != std::string_view::npos;
}

}  // namespace

KeyPair keygen(std::optional<std::span<const std::uint8_t>> seed) {
  ensure_sodium();
  KeyPair kp;
  if (seed) {
    if (seed->size() != kp.seed.size()) {
      throw Error(Errc::bad_seed, "seed must be 32 bytes, got " + std::to_string(seed->size()));
    }
    std::copy(seed->begin(), seed->end(), kp.seed.begin());
  } else {
    randombytes_buf(kp.seed.data(), kp.seed.size());
  }
  Expanded e;
  crypto_sign_seed_keypair(kp.pk.data(), e.sk.data(), kp.seed.data());
  return kp;
}

std::vector<std::uint8_t> canonical_encode(const Credential& c) {
  const auto n = static_cast<std::uint32_t>(c.size());
  std::vector<std::uint8_t> out{static_cast<std::uint8_t>(n >> 24),
                                static_cast<std::uint8_t>(n >> 16),
                                static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n)};
  // Credential keeps pairs sorted by (attr, value) with std::string ordering,
  // which is bytewise.
  bool first = true;
  for (const auto& p : c.pairs()) {
    if (reserved(p.attr) || reserved(p.value)) {
      throw Error(Errc::encoding_error, "reserved byte in " + p.attr);
    }
    if (!first) out.push_back(0x1f);
    first = false;
    out.insert(out.end(), p.attr.begin(), p.attr.end());
    out.push_back(0x3d);
    out.insert(out.end(), p.value.begin(), p.value.end());
  }
  return out;
}

SignedCredential sign_credential(const KeyPair& key, const Credential& c) {
  ensure_sodium();
  const auto msg = canonical_encode(c);
  Expanded e;
  PublicKey pk{};
  crypto_sign_seed_keypair(pk.data(), e.sk.data(), key.seed.data());
  SignedCredential sc{c, {}, pk};
  crypto_sign_detached(sc.signature.data(), nullptr, msg.data(), msg.size(), e.sk.data());
  return sc;
}

bool verify_credential(const PublicKey& pk, const SignedCredential& sc) {
  ensure_sodium();
  std::vector<std::uint8_t> msg;
  try {
    msg = canonical_encode(sc.credential);
  } catch (const Error&) {
    return false;
  }
  return crypto_sign_verify_detached(sc.signature.data(), msg.data(), msg.size(), pk.data()) == 0;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  ensure_sodium();
  std::string out(sodium_base64_encoded_len(bytes.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(),
                    sodium_base64_VARIANT_ORIGINAL);
  out.resize(std::char_traits<char>::length(out.c_str()));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  ensure_sodium();
  std::vector<std::uint8_t> out(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, nullptr,
                        sodium_base64_VARIANT_ORIGINAL) != 0) {
    throw Error(Errc::corrupt_file, "invalid base64");
  }
  out.resize(len);
  return out;
}

}  // namespace qae::crypto
