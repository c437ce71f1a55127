#pragma once

#include <cstdint>

#include "ectrl/h2syn.hpp"
#include "ectrl/plantsim.hpp"

namespace ectrl {

// Defender inputs: acceptable estimation error, defense period in seconds,
// and the assumed attacker compute in FLOPS.
struct SecuritySpec {
  double gamma_c = 0.0;
  double tau_c = 0.0;
  double upsilon = 0.0;

  void validate() const;
};

// Output of the six-step design procedure.
struct SecurityReport {
  FeedbackGain f_star;
  double gramian_trace = 0.0;
  long long n_star = 0;
  int lambda_star = 0;
  int lambda_star_static = 0;  // non-updatable scheme: lambda(tau_c, upsilon, 1)
  long long k_star = 0;
  long long k_star_static = 0;
  bool secure = false;
};

struct SecureVerdict {
  bool secure = false;
  long long witness_n = 0;  // sample size defeating the scheme when unsecure
};

// Sample identifying complexity gamma(N, F) = n / ((N-1) tr(Psi(F))), the
// lower bound on the attacker's expected estimation error from N samples.
double sic(long long n_samples, const PlantModel& plant,
           const FeedbackGain& gain);

// Sample deciphering time tau(N, lambda) = 2^lambda N / upsilon seconds.
// Evaluated with ldexp so large lambda saturates to +inf instead of wrapping.
double sdt(long long n_samples, int lambda, double upsilon);

// Minimum N with gamma(N) < gamma_c: floor(n / (gamma_c tr)) + 2, with the
// floor re-verified against the strict/non-strict threshold pair.
long long min_sample_size(double gamma_c, double gramian_trace, int n);

// Minimum lambda with tau(N, lambda) > tau_c: floor(log2(upsilon tau_c / N))
// + 1, same post-hoc threshold verification.
int opt_security_param(double tau_c, double upsilon, long long n_samples);

// Definition-8 verdict. gamma is strictly decreasing and tau strictly
// increasing in N, so checking the single crossover sample size suffices.
SecureVerdict is_secure(const SecuritySpec& spec, int lambda,
                        const PlantModel& plant, const FeedbackGain& gain);

// Noiseless variant: n+1 deciphered samples identify A exactly, so the
// system is secure iff tau(n+1, lambda) > tau_c.
bool noiseless_secure(int n, int lambda, const SecuritySpec& spec);

// Smallest key length whose GNFS break cost reaches 2^lambda:
//   ln Omega(k) = (64/9)^(1/3) (k ln 2)^(1/3) (ln(k ln 2))^(2/3) >= lambda ln 2.
long long opt_key_length(int lambda);

// ln Omega(k) itself; exposed for threshold tests.
double gnfs_log_cost(long long k);

// Steps 3-6 of the design procedure: synthesize F*, compute Psi*, N*,
// lambda*, the static lambda*_0, and both key lengths.
SecurityReport design_pipeline(const PlantModel& plant,
                               const SecuritySpec& spec);

}  // namespace ectrl
