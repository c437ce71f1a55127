#include "ectrl/cryptoloop.hpp"

#include <cmath>
#include <string>

#include "ectrl/rng.hpp"

namespace ectrl {

namespace {

const std::vector<unsigned long>& small_primes() {
  static const std::vector<unsigned long> primes = [] {
    std::vector<unsigned long> out;
    std::vector<bool> sieve(2000, true);
    for (unsigned long i = 2; i < sieve.size(); ++i) {
      if (!sieve[i]) continue;
      out.push_back(i);
      for (unsigned long j = i * i; j < sieve.size(); j += i) sieve[j] = false;
    }
    return out;
  }();
  return primes;
}

bool passes_trial_division(const mpz_class& n) {
  for (unsigned long prime : small_primes()) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), prime)) return n == prime;
  }
  return true;
}

mpz_class powm(const mpz_class& base, const mpz_class& exp,
               const mpz_class& mod) {
  mpz_class out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(),
           mod.get_mpz_t());
  return out;
}

void check_epoch(std::uint64_t a, std::uint64_t b, const char* where) {
  if (a != b) {
    throw EpochMismatch(std::string(where) + ": epochs " + std::to_string(a) +
                        " and " + std::to_string(b) + " do not match");
  }
}

}  // namespace

ElGamalEngine::ElGamalEngine(std::uint64_t seed) : rng_(gmp_randinit_mt) {
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(seed), 0, 0, &seed);
  rng_.seed(z);
}

mpz_class ElGamalEngine::uniform_in(const mpz_class& lo, const mpz_class& hi) {
  return lo + rng_.get_z_range(mpz_class(hi - lo + 1));
}

bool ElGamalEngine::is_probable_prime(const mpz_class& n, int rounds) {
  if (n < 2) return false;
  if (!passes_trial_division(n)) return false;
  if (n < 4) return true;

  mpz_class d = n - 1;
  unsigned long r = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), r);
  for (int round = 0; round < rounds; ++round) {
    const mpz_class a = uniform_in(2, n - 2);
    mpz_class x = powm(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (unsigned long i = 0; i + 1 < r; ++i) {
      x = x * x % n;
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

KeyPair ElGamalEngine::keygen(int key_length_bits) {
  if (key_length_bits < 16) {
    throw Error("keygen: key length below the 16-bit desk-scale floor");
  }
  constexpr int kMillerRabinRounds = 64;
  constexpr long kMaxCandidates = 4000000;

  // Safe prime p = 2q + 1 with q of key_length_bits - 1 bits, so p has
  // exactly key_length_bits bits and the group order factors as 2q.
  mpz_class p, q;
  bool found = false;
  for (long attempt = 0; attempt < kMaxCandidates; ++attempt) {
    q = rng_.get_z_bits(key_length_bits - 1);
    mpz_setbit(q.get_mpz_t(), key_length_bits - 2);
    mpz_setbit(q.get_mpz_t(), 0);
    p = 2 * q + 1;
    if (!passes_trial_division(q) || !passes_trial_division(p)) continue;
    if (!is_probable_prime(q, kMillerRabinRounds)) continue;
    if (!is_probable_prime(p, kMillerRabinRounds)) continue;
    found = true;
    break;
  }
  if (!found) {
    throw PrimeSearchFailure("keygen: safe-prime search exhausted its budget");
  }

  // A uniform element generates the full group with probability ~1/2;
  // rejecting on g^2 = 1 or g^q = 1 certifies order p - 1 exactly.
  mpz_class g;
  for (;;) {
    g = uniform_in(2, p - 2);
    if (powm(g, 2, p) == 1) continue;
    if (powm(g, q, p) == 1) continue;
    break;
  }

  KeyPair pair;
  pair.pk.group = GroupParams{p, g, key_length_bits};
  pair.sk.s = uniform_in(1, p - 2);
  pair.sk.epoch = 0;
  pair.pk.h = powm(g, pair.sk.s, p);
  pair.pk.epoch = 0;
  return pair;
}

Ciphertext ElGamalEngine::enc(const PublicKey& pk, const mpz_class& m) {
  const mpz_class& p = pk.group.p;
  if (m < 1 || m > p - 1) {
    throw InvalidPlaintext("enc: plaintext must lie in [1, p-1]");
  }
  const mpz_class r = uniform_in(1, p - 2);
  Ciphertext ct;
  ct.c1 = powm(pk.group.g, r, p);
  ct.c2 = m * powm(pk.h, r, p) % p;
  ct.epoch = pk.epoch;
  return ct;
}

std::pair<KeyPair, UpdateToken> ElGamalEngine::key_update(
    const KeyPair& pair) {
  const mpz_class& p = pair.pk.group.p;
  const mpz_class s_next = uniform_in(1, p - 2);

  UpdateToken token;
  mpz_class delta = s_next - pair.sk.s;
  mpz_class order = p - 1;
  mpz_mod(token.delta.get_mpz_t(), delta.get_mpz_t(), order.get_mpz_t());
  token.new_h = powm(pair.pk.group.g, s_next, p);
  token.epoch = pair.pk.epoch;

  KeyPair next;
  next.pk.group = pair.pk.group;
  next.pk.h = token.new_h;
  next.pk.epoch = pair.pk.epoch + 1;
  next.sk.s = s_next;
  next.sk.epoch = pair.sk.epoch + 1;
  return {next, token};
}

Ciphertext ElGamalEngine::ct_update(const GroupParams& group,
                                    const Ciphertext& ct,
                                    const UpdateToken& token) {
  check_epoch(ct.epoch, token.epoch, "ct_update");
  const mpz_class& p = group.p;
  const mpz_class r = uniform_in(1, p - 2);
  Ciphertext out;
  out.c1 = ct.c1 * powm(group.g, r, p) % p;
  out.c2 = ct.c2 * powm(ct.c1, token.delta, p) % p * powm(token.new_h, r, p) %
           p;
  out.epoch = ct.epoch + 1;
  return out;
}

mpz_class dec(const GroupParams& group, const SecretKey& sk,
              const Ciphertext& ct) {
  check_epoch(ct.epoch, sk.epoch, "dec");
  const mpz_class shared = powm(ct.c1, sk.s, group.p);
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), shared.get_mpz_t(),
                 group.p.get_mpz_t()) == 0) {
    throw InvalidPlaintext("dec: ciphertext component not invertible");
  }
  return ct.c2 * inv % group.p;
}

Ciphertext eval(const GroupParams& group, const Ciphertext& a,
                const Ciphertext& b) {
  check_epoch(a.epoch, b.epoch, "eval");
  Ciphertext out;
  out.c1 = a.c1 * b.c1 % group.p;
  out.c2 = a.c2 * b.c2 % group.p;
  out.epoch = a.epoch;
  return out;
}

mpz_class ecd(double x, double delta_scale, const GroupParams& group) {
  if (!std::isfinite(x) || !(delta_scale > 0.0)) {
    throw Error("ecd: x must be finite and delta_scale positive");
  }
  const double scaled = std::round(x / delta_scale);
  if (std::abs(scaled) >= 9007199254740992.0) {  // 2^53: exactness limit
    throw EncodingOverflow("ecd: |x / delta| too large for exact rounding");
  }
  if (scaled == 0.0) {
    throw InvalidPlaintext(
        "ecd: x rounds to zero, which has no multiplicative encoding");
  }
  const mpz_class magnitude(std::abs(scaled));
  mpz_class bound;  // sqrt(p)/2, the product-decodability box
  mpz_sqrt(bound.get_mpz_t(), group.p.get_mpz_t());
  bound /= 2;
  if (magnitude >= bound) {
    throw EncodingOverflow("ecd: |round(x/delta)| >= sqrt(p)/2");
  }
  return scaled > 0.0 ? magnitude : mpz_class(group.p - magnitude);
}

double dcd(const mpz_class& m, double effective_scale,
           const GroupParams& group) {
  const mpz_class half = group.p / 2;
  if (m > half) {
    return -mpz_class(group.p - m).get_d() * effective_scale;
  }
  return m.get_d() * effective_scale;
}

CiphertextMatrix encrypted_controller(const GroupParams& group,
                                      const CiphertextMatrix& ct_f,
                                      const std::vector<Ciphertext>& ct_x) {
  CiphertextMatrix out(ct_f.size());
  for (std::size_t i = 0; i < ct_f.size(); ++i) {
    if (ct_f[i].size() != ct_x.size()) {
      throw DimensionMismatch(
          "encrypted_controller: gain row width must match state length");
    }
    out[i].reserve(ct_x.size());
    for (std::size_t j = 0; j < ct_x.size(); ++j) {
      out[i].push_back(eval(group, ct_f[i][j], ct_x[j]));
    }
  }
  return out;
}

RealVector dec_sum(const GroupParams& group, const SecretKey& sk,
                   const CiphertextMatrix& ct_u, double delta_scale) {
  RealVector u(ct_u.size());
  const double product_scale = delta_scale * delta_scale;
  for (std::size_t i = 0; i < ct_u.size(); ++i) {
    double acc = 0.0;
    for (const Ciphertext& ct : ct_u[i]) {
      acc += dcd(dec(group, sk, ct), product_scale, group);
    }
    u(static_cast<Eigen::Index>(i)) = acc;
  }
  return u;
}

namespace {

// Zero is unencodable; the loop substitutes the smallest representable
// magnitude with the sign of x (sign of exact zero is taken positive). The
// extra error stays inside the per-entry quantization budget.
mpz_class ecd_or_min(double x, double delta_scale, const GroupParams& group) {
  const double scaled = std::round(x / delta_scale);
  if (scaled == 0.0) {
    return ecd(x < 0.0 ? -delta_scale : delta_scale, delta_scale, group);
  }
  return ecd(x, delta_scale, group);
}

}  // namespace

EncryptedLoopResult run_encrypted_loop(const PlantModel& plant,
                                       const FeedbackGain& gain, int horizon,
                                       int key_length_bits, double delta_scale,
                                       std::uint64_t seed) {
  if (horizon < 0) {
    throw Error("run_encrypted_loop: horizon must be >= 0");
  }
  ElGamalEngine engine(mix_seed(seed, 0xE16A3A1, 0));

  EncryptedLoopResult result;
  if (horizon == 0) {
    engine.keygen(key_length_bits);  // still validates the key request
    const Trajectory stub = simulate(plant, gain, 1, seed);
    result.encrypted_states.push_back(stub.states[0]);
    result.plaintext_states.push_back(stub.states[0]);
    return result;
  }

  const Trajectory plain = simulate(plant, gain, horizon, seed);
  KeyPair keys = engine.keygen(key_length_bits);
  const GroupParams group = keys.pk.group;
  const int n = plant.n();
  const int m = plant.m();

  auto encrypt_gain = [&](const KeyPair& kp) {
    CiphertextMatrix ct(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        ct[i].push_back(
            engine.enc(kp.pk, ecd_or_min(gain.f(i, j), delta_scale, group)));
      }
    }
    return ct;
  };
  CiphertextMatrix ct_f = encrypt_gain(keys);

  result.plaintext_states = plain.states;
  result.encrypted_states.push_back(plain.states[0]);
  double max_dev = 0.0;
  for (int t = 0; t < horizon; ++t) {
    const RealVector& x = result.encrypted_states.back();
    std::vector<Ciphertext> ct_x;
    ct_x.reserve(n);
    for (int j = 0; j < n; ++j) {
      try {
        ct_x.push_back(engine.enc(keys.pk, ecd_or_min(x(j), delta_scale, group)));
      } catch (const EncodingOverflow&) {
        throw EncodingOverflow(
            "run_encrypted_loop: state left the representable box at step " +
            std::to_string(t));
      }
    }
    const CiphertextMatrix ct_u = encrypted_controller(group, ct_f, ct_x);
    const RealVector u = dec_sum(group, keys.sk, ct_u, delta_scale);
    result.encrypted_states.push_back(plant.a_p * x + plant.b_p * u +
                                      plain.noises[t]);

    auto [next_keys, token] = engine.key_update(keys);
    for (auto& row : ct_f) {
      for (auto& ct : row) ct = engine.ct_update(group, ct, token);
    }
    keys = next_keys;
    ++result.epochs_rotated;

    const double dev =
        (result.encrypted_states.back() - plain.states[t + 1])
            .cwiseAbs()
            .maxCoeff();
    if (dev > max_dev) max_dev = dev;
  }
  result.max_deviation = max_dev;
  return result;
}

}  // namespace ectrl
