#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "leapforge/bytes.hpp"

namespace leapforge {

using Block16 = std::array<std::uint8_t, 16>;

enum class KeyRole : std::uint8_t {
  Initial,
  Master,
  Individual,
  Pairwise,
  Cluster,
  Global,
  ChainElement,
};

std::string_view to_string(KeyRole role);

/// 128-bit symmetric key. The role is fixed at construction.
class SymKey {
 public:
  SymKey(const Block16& bytes, KeyRole role) : bytes_(bytes), role_(role) {}

  /// Throws std::invalid_argument unless `bytes` is exactly 16 bytes long.
  static SymKey from_bytes(ByteView bytes, KeyRole role);

  const Block16& bytes() const { return bytes_; }
  ByteView view() const { return bytes_; }
  KeyRole role() const { return role_; }

  friend bool operator==(const SymKey&, const SymKey&) = default;

 private:
  Block16 bytes_;
  KeyRole role_;
};

struct MacTag {
  std::array<std::uint8_t, 8> bytes{};
  friend auto operator<=>(const MacTag&, const MacTag&) = default;
};

struct Nonce {
  std::array<std::uint8_t, 8> bytes{};
  friend auto operator<=>(const Nonce&, const Nonce&) = default;
};

/// 16-byte ciphertext followed by an 8-byte tag.
using WrappedBlock = std::array<std::uint8_t, 24>;

class CryptoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by unwrap when the tag does not verify: wrong key, tampered blob or
/// mismatched context.
class AuthenticationFailure : public CryptoError {
 public:
  AuthenticationFailure() : CryptoError("authentication failure") {}
};

/// A key was passed where a different role is required.
class RoleMismatch : public std::logic_error {
 public:
  RoleMismatch(std::string_view where, KeyRole expected, KeyRole actual);
};

void require_role(const SymKey& key, KeyRole expected, std::string_view where);

/// AES-128 single-block primitives.
Block16 aes_encrypt_block(const Block16& key, const Block16& block);
Block16 aes_decrypt_block(const Block16& key, const Block16& block);

/// AES-CMAC over an arbitrary-length message (RFC 4493), full 16-byte output.
Block16 aes_cmac(const Block16& key, ByteView message);

inline constexpr std::size_t kPrfMaxInput = 64;

/// Keyed PRF: AES-CMAC of `data` under `key`. Accepts 1..64 bytes of input.
/// The output carries `out_role`.
SymKey prf(const SymKey& key, ByteView data, KeyRole out_role);

/// First 8 bytes of AES-CMAC over `message`.
MacTag mac(const SymKey& key, ByteView message);
bool verify_mac(const SymKey& key, ByteView message, const MacTag& tag);

inline constexpr std::size_t kWrapMaxContext = kPrfMaxInput - 1;

// Encrypt-then-MAC of a single block:
//   ct  = AES_kek(payload) XOR prf(kek, context || 0x01)
//   tag = mac(kek, ct || context)
// The context binds the blob to its sender/receiver or audit round.
WrappedBlock wrap_block(const SymKey& kek, const Block16& payload, ByteView context);
Block16 unwrap_block(const SymKey& kek, const WrappedBlock& blob, ByteView context);

WrappedBlock wrap_key(const SymKey& kek, const SymKey& payload, ByteView context);
SymKey unwrap_key(const SymKey& kek, const WrappedBlock& blob, ByteView context, KeyRole role);

// ---------------------------------------------------------------------------
// One-way hash chain for base-station broadcast authentication.
//
// H(x) = AES-CMAC under the all-zero key. element(length) is the seed and
// element(i) = H(element(i + 1)); element(0) is the commitment preloaded to
// nodes. Round r reveals element(r), which verifies because H^r(element(r))
// equals the commitment.

inline constexpr std::uint32_t kMaxChainLength = 4096;

Block16 chain_hash(const Block16& value);

/// True iff H^index(candidate) == commitment. Indices outside
/// [1, kMaxChainLength] never verify.
bool chain_verify(const Block16& candidate, const Block16& commitment, std::uint32_t index);

class ChainExhausted : public std::runtime_error {
 public:
  ChainExhausted() : std::runtime_error("hash chain exhausted") {}
};

class HashChain {
 public:
  struct Reveal {
    std::uint32_t index;
    Block16 element;
  };

  /// Throws std::invalid_argument when length is 0 or above kMaxChainLength.
  static HashChain build(const Block16& seed, std::uint32_t length);

  const Block16& seed() const { return elements_.back(); }
  const Block16& commitment() const { return elements_.front(); }
  std::uint32_t length() const { return static_cast<std::uint32_t>(elements_.size() - 1); }
  std::uint32_t next_reveal_index() const { return next_reveal_; }
  bool exhausted() const { return next_reveal_ > length(); }

  /// element(0) is the commitment, element(length) the seed.
  const Block16& element(std::uint32_t index) const;

  /// Reveals the next element in strictly increasing index order.
  Reveal reveal();

 private:
  explicit HashChain(std::vector<Block16> elements) : elements_(std::move(elements)) {}

  std::vector<Block16> elements_;
  std::uint32_t next_reveal_ = 1;
};

}  // namespace leapforge
