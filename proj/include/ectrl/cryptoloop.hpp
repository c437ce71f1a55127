#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "ectrl/plantsim.hpp"

namespace ectrl {

// Multiplicative group mod a safe prime p = 2q + 1; g generates the full
// group of order p - 1 (verified at generation: g^2 != 1 and g^q != 1).
struct GroupParams {
  mpz_class p;
  mpz_class g;
  int key_bits = 0;
};

struct PublicKey {
  GroupParams group;
  mpz_class h;  // g^s mod p
  std::uint64_t epoch = 0;
};

struct SecretKey {
  mpz_class s;
  std::uint64_t epoch = 0;
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

struct Ciphertext {
  mpz_class c1;
  mpz_class c2;
  std::uint64_t epoch = 0;
};

// Re-keys epoch-t ciphertexts to epoch t+1: delta = s_{t+1} - s_t mod (p-1)
// plus the new public key for re-randomization.
struct UpdateToken {
  mpz_class delta;
  mpz_class new_h;
  std::uint64_t epoch = 0;
};

using CiphertextMatrix = std::vector<std::vector<Ciphertext>>;

// All randomized algorithms (key generation, encryption, key rotation,
// ciphertext re-randomization) draw from one seeded Mersenne-Twister stream,
// so every protocol run is reproducible from its seed. Not hardened against
// side channels; this is a desk-scale correctness vehicle.
class ElGamalEngine {
 public:
  explicit ElGamalEngine(std::uint64_t seed);

  // Fresh group (safe prime of exactly key_length_bits bits, full-group
  // generator) and key pair at epoch 0. key_length_bits >= 16.
  KeyPair keygen(int key_length_bits);

  // (g^r, m h^r) with fresh uniform r; m must lie in [1, p-1].
  Ciphertext enc(const PublicKey& pk, const mpz_class& m);

  // Rotates to a fresh uniform secret; returns the epoch-(t+1) pair and the
  // token that moves epoch-t ciphertexts forward.
  std::pair<KeyPair, UpdateToken> key_update(const KeyPair& pair);

  // (c1 g^r', c2 c1^delta h_new^r'): re-keyed and re-randomized.
  Ciphertext ct_update(const GroupParams& group, const Ciphertext& ct,
                       const UpdateToken& token);

  // Deterministic Miller-Rabin wrapper used by keygen; exposed for tests.
  bool is_probable_prime(const mpz_class& n, int rounds);

 private:
  mpz_class uniform_in(const mpz_class& lo, const mpz_class& hi);
  gmp_randclass rng_;
};

mpz_class dec(const GroupParams& group, const SecretKey& sk,
              const Ciphertext& ct);

// Componentwise ciphertext product; decrypts to m1 * m2 mod p.
Ciphertext eval(const GroupParams& group, const Ciphertext& a,
                const Ciphertext& b);

// Fixed-point encoder m = round(x / delta_scale), negatives stored as
// p - |m|. Throws InvalidPlaintext when x rounds to zero (the multiplicative
// group has no zero) and EncodingOverflow when |m| >= sqrt(p)/2, the bound
// that keeps single products decodable.
mpz_class ecd(double x, double delta_scale, const GroupParams& group);

// Inverse of ecd; pass delta_scale for fresh encodings and delta_scale^2 for
// product-level plaintexts.
double dcd(const mpz_class& m, double effective_scale,
           const GroupParams& group);

// Entry (i,j) = eval(ct_f[i][j], ct_x[j]); the encrypted u = F x evaluation.
CiphertextMatrix encrypted_controller(const GroupParams& group,
                                      const CiphertextMatrix& ct_f,
                                      const std::vector<Ciphertext>& ct_x);

// Decrypts every entry, decodes at product scale, and row-sums: u ~= F x.
RealVector dec_sum(const GroupParams& group, const SecretKey& sk,
                   const CiphertextMatrix& ct_u, double delta_scale);

struct EncryptedLoopResult {
  std::vector<RealVector> encrypted_states;
  std::vector<RealVector> plaintext_states;
  double max_deviation = 0.0;  // max over t of ||x_enc - x_plain||_inf
  std::uint64_t epochs_rotated = 0;
};

// Runs the encrypted closed loop side by side with its plaintext twin on the
// same noise sequence: each step encrypts the state, evaluates the encrypted
// controller, decrypts-and-sums the input, advances the plant, then rotates
// the key and updates the gain ciphertexts to the new epoch.
EncryptedLoopResult run_encrypted_loop(const PlantModel& plant,
                                       const FeedbackGain& gain, int horizon,
                                       int key_length_bits, double delta_scale,
                                       std::uint64_t seed);

}  // namespace ectrl
