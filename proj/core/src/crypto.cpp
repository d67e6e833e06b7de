#include "leapforge/crypto.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <string>

namespace leapforge {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

// AES-128-ECB without padding, one block at a time.
class AesBlockCipher {
 public:
  AesBlockCipher(const Block16& key, bool encrypt) : ctx_(EVP_CIPHER_CTX_new()) {
    if (!ctx_ ||
        EVP_CipherInit_ex(ctx_.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr,
                          encrypt ? 1 : 0) != 1) {
      throw CryptoError("AES context initialisation failed");
    }
    EVP_CIPHER_CTX_set_padding(ctx_.get(), 0);
  }

  Block16 process(const Block16& in) {
    Block16 out{};
    int len = 0;
    if (EVP_CipherUpdate(ctx_.get(), out.data(), &len, in.data(), static_cast<int>(in.size())) !=
            1 ||
        len != static_cast<int>(out.size())) {
      throw CryptoError("AES block operation failed");
    }
    return out;
  }

 private:
  CipherCtx ctx_;
};

Block16 xor_blocks(const Block16& a, const Block16& b) {
  Block16 out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] ^ b[i];
  return out;
}

// Doubling in GF(2^128) with the CMAC reduction constant R_128 = 0x87.
Block16 gf_double(const Block16& in) {
  Block16 out{};
  std::uint8_t carry = 0;
  for (std::size_t i = in.size(); i-- > 0;) {
    out[i] = static_cast<std::uint8_t>((in[i] << 1) | carry);
    carry = in[i] >> 7;
  }
  if (in[0] & 0x80) out[15] ^= 0x87;
  return out;
}

}  // namespace

std::string_view to_string(KeyRole role) {
  switch (role) {
    case KeyRole::Initial: return "initial";
    case KeyRole::Master: return "master";
    case KeyRole::Individual: return "individual";
    case KeyRole::Pairwise: return "pairwise";
    case KeyRole::Cluster: return "cluster";
    case KeyRole::Global: return "global";
    case KeyRole::ChainElement: return "chain-element";
  }
  return "unknown";
}

SymKey SymKey::from_bytes(ByteView bytes, KeyRole role) {
  if (bytes.size() != 16) throw std::invalid_argument("symmetric keys are exactly 16 bytes");
  Block16 block{};
  std::copy(bytes.begin(), bytes.end(), block.begin());
  return SymKey(block, role);
}

RoleMismatch::RoleMismatch(std::string_view where, KeyRole expected, KeyRole actual)
    : std::logic_error(std::string(where) + ": expected " + std::string(to_string(expected)) +
                       " key, got " + std::string(to_string(actual))) {}

void require_role(const SymKey& key, KeyRole expected, std::string_view where) {
  if (key.role() != expected) throw RoleMismatch(where, expected, key.role());
}

Block16 aes_encrypt_block(const Block16& key, const Block16& block) {
  return AesBlockCipher(key, true).process(block);
}

Block16 aes_decrypt_block(const Block16& key, const Block16& block) {
  return AesBlockCipher(key, false).process(block);
}

Block16 aes_cmac(const Block16& key, ByteView message) {
  AesBlockCipher aes(key, true);
  const Block16 l = aes.process(Block16{});
  const Block16 k1 = gf_double(l);
  const Block16 k2 = gf_double(k1);

  const std::size_t n_blocks = message.empty() ? 1 : (message.size() + 15) / 16;
  const bool last_complete = !message.empty() && message.size() % 16 == 0;

  Block16 x{};
  for (std::size_t b = 0; b + 1 < n_blocks; ++b) {
    Block16 m{};
    std::copy_n(message.begin() + static_cast<std::ptrdiff_t>(b * 16), 16, m.begin());
    x = aes.process(xor_blocks(x, m));
  }

  Block16 last{};
  const std::size_t tail_start = (n_blocks - 1) * 16;
  const std::size_t tail_len = message.size() - tail_start;
  std::copy_n(message.begin() + static_cast<std::ptrdiff_t>(tail_start), tail_len, last.begin());
  if (last_complete) {
    last = xor_blocks(last, k1);
  } else {
    last[tail_len] = 0x80;
    last = xor_blocks(last, k2);
  }
  return aes.process(xor_blocks(x, last));
}

SymKey prf(const SymKey& key, ByteView data, KeyRole out_role) {
  if (data.empty()) throw std::invalid_argument("prf: input must not be empty");
  if (data.size() > kPrfMaxInput) throw std::invalid_argument("prf: input longer than 64 bytes");
  return SymKey(aes_cmac(key.bytes(), data), out_role);
}

MacTag mac(const SymKey& key, ByteView message) {
  const Block16 full = aes_cmac(key.bytes(), message);
  MacTag tag;
  std::copy_n(full.begin(), tag.bytes.size(), tag.bytes.begin());
  return tag;
}

bool verify_mac(const SymKey& key, ByteView message, const MacTag& tag) {
  return mac(key, message) == tag;
}

namespace {

Block16 wrap_pad(const SymKey& kek, ByteView context) {
  if (context.size() > kWrapMaxContext) throw std::invalid_argument("wrap: context too long");
  Bytes input(context.begin(), context.end());
  input.push_back(0x01);
  return aes_cmac(kek.bytes(), input);
}

MacTag wrap_tag(const SymKey& kek, const Block16& ciphertext, ByteView context) {
  Bytes input(ciphertext.begin(), ciphertext.end());
  append(input, context);
  return mac(kek, input);
}

}  // namespace

WrappedBlock wrap_block(const SymKey& kek, const Block16& payload, ByteView context) {
  const Block16 ct = xor_blocks(aes_encrypt_block(kek.bytes(), payload), wrap_pad(kek, context));
  const MacTag tag = wrap_tag(kek, ct, context);
  WrappedBlock blob{};
  std::copy(ct.begin(), ct.end(), blob.begin());
  std::copy(tag.bytes.begin(), tag.bytes.end(), blob.begin() + 16);
  return blob;
}

Block16 unwrap_block(const SymKey& kek, const WrappedBlock& blob, ByteView context) {
  Block16 ct{};
  std::copy_n(blob.begin(), 16, ct.begin());
  MacTag tag;
  std::copy_n(blob.begin() + 16, 8, tag.bytes.begin());
  if (wrap_tag(kek, ct, context) != tag) throw AuthenticationFailure();
  return aes_decrypt_block(kek.bytes(), xor_blocks(ct, wrap_pad(kek, context)));
}

WrappedBlock wrap_key(const SymKey& kek, const SymKey& payload, ByteView context) {
  return wrap_block(kek, payload.bytes(), context);
}

SymKey unwrap_key(const SymKey& kek, const WrappedBlock& blob, ByteView context, KeyRole role) {
  return SymKey(unwrap_block(kek, blob, context), role);
}

Block16 chain_hash(const Block16& value) { return aes_cmac(Block16{}, value); }

bool chain_verify(const Block16& candidate, const Block16& commitment, std::uint32_t index) {
  if (index < 1 || index > kMaxChainLength) return false;
  Block16 value = candidate;
  for (std::uint32_t i = 0; i < index; ++i) value = chain_hash(value);
  return value == commitment;
}

HashChain HashChain::build(const Block16& seed, std::uint32_t length) {
  if (length < 1) throw std::invalid_argument("hash chain length must be >= 1");
  if (length > kMaxChainLength) throw std::invalid_argument("hash chain too long");
  // Filled from the seed end: elements[length] = seed.
  std::vector<Block16> elements(length + 1);
  elements[length] = seed;
  for (std::uint32_t i = length; i-- > 0;) elements[i] = chain_hash(elements[i + 1]);
  return HashChain(std::move(elements));
}

const Block16& HashChain::element(std::uint32_t index) const {
  if (index > length()) throw std::out_of_range("hash chain index out of range");
  return elements_[index];
}

HashChain::Reveal HashChain::reveal() {
  if (exhausted()) throw ChainExhausted();
  const std::uint32_t index = next_reveal_++;
  return Reveal{index, elements_[index]};
}

}  // namespace leapforge
