#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "leapforge/crypto.hpp"
#include "leapforge/keying.hpp"

namespace leapforge::testing {

/// AES-CMAC through OpenSSL's own EVP_MAC implementation. Shares nothing
/// with the library's CMAC code beyond the AES block cipher.
Block16 openssl_cmac(const Block16& key, ByteView message);

// Frozen reference values (computed with an independent CMAC implementation).
inline constexpr const char* kRfcKey = "2b7e151628aed2a6abf7158809cf4f3c";
inline constexpr const char* kRfcMessage =
    "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
    "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710";
inline constexpr const char* kRfcTag0 = "bb1d6929e95937287fa37d129b756746";
inline constexpr const char* kRfcTag16 = "070a16b46b4d4144f79bdd9dd04a287c";
inline constexpr const char* kRfcTag40 = "dfa66747de9ae63030ca32611497c827";
inline constexpr const char* kRfcTag64 = "51f0bebf7e3b9d92fc49741779363cfe";
inline constexpr const char* kPrfRfcKeyId1 = "211a9792c8485ef94af554694afcf301";
inline constexpr const char* kPrfRfcKeyId2 = "548e37df88373bbd9380aa7fc9a6e837";
inline constexpr const char* kInitialKeySeq = "000102030405060708090a0b0c0d0e0f";
inline constexpr const char* kMaster9 = "7c28c55574ffbf918d796e50f6fe884f";
inline constexpr const char* kMaster7 = "3ad55cda82584f6350609ef98bfde3f5";
inline constexpr const char* kPair7And9 = "696d08b0d3c56959999ffd6a30aed0a2";
inline constexpr const char* kChainSeed = "101112131415161718191a1b1c1d1e1f";
inline constexpr const char* kChainCommit8 = "be2f2c5c2617f901452fd3bb52743ac5";
inline constexpr const char* kChainHashOfSeed = "0874bfe90d43cec8d4d95709bd32268f";

/// The pairwise key of {u, v} computed straight from the initial key.
Block16 reference_pair_key(const Block16& initial_key, NodeId u, NodeId v);

struct LocalizationResult {
  std::size_t keys_in_dump = 0;
  std::size_t derived = 0;
  /// Pairs not involving the captured node whose key was reachable.
  std::vector<std::pair<NodeId, NodeId>> leaked_pairs;
  bool initial_key_reachable = false;
};

/// Brute-force derivation closure: starting from every key in the dump,
/// applies the PRF to every node id (0..n) up to `depth` times and checks
/// whether any pairwise key of a pair not containing `captured` appears.
LocalizationResult localization_oracle(ByteView dump, NodeId captured, const Block16& initial_key,
                                       std::size_t n, int depth = 3);

}  // namespace leapforge::testing
