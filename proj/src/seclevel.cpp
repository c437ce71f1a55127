#include "ectrl/seclevel.hpp"

#include <cmath>

namespace ectrl {

namespace {

// gamma(N) from a precomputed Gramian trace; gamma(1) = +inf by convention
// (zero shifted pairs). Used for the threshold verification loops.
double sic_from_trace(long long n_samples, double trace, int n) {
  return static_cast<double>(n) /
         (static_cast<double>(n_samples - 1) * trace);
}

}  // namespace

void SecuritySpec::validate() const {
  if (!(gamma_c > 0.0) || !(tau_c > 0.0) || !(upsilon > 0.0)) {
    throw Error("SecuritySpec: gamma_c, tau_c, upsilon must be positive");
  }
}

double sic(long long n_samples, const PlantModel& plant,
           const FeedbackGain& gain) {
  if (n_samples < 2) {
    throw InvalidSampleSize("sic: sample size must be >= 2");
  }
  return sic_from_trace(n_samples, gramian_trace(plant, gain), plant.n());
}

double sdt(long long n_samples, int lambda, double upsilon) {
  if (n_samples < 1 || lambda < 1) {
    throw Error("sdt: need N >= 1 and lambda >= 1");
  }
  return std::ldexp(static_cast<double>(n_samples), lambda) / upsilon;
}

long long min_sample_size(double gamma_c, double gramian_trace, int n) {
  if (!(gamma_c > 0.0) || !(gramian_trace > 0.0) || n < 1) {
    throw Error("min_sample_size: inputs must be positive");
  }
  const double ratio = static_cast<double>(n) / (gamma_c * gramian_trace);
  if (ratio + 2.0 >= 9.0e18) {
    throw CountOverflow("min_sample_size: N* exceeds the count range");
  }
  long long n_star = static_cast<long long>(std::floor(ratio)) + 2;
  if (n_star < 2) n_star = 2;
  // Guard the floor against round-off: enforce gamma(N*) < gamma_c <=
  // gamma(N*-1) exactly as evaluated in double precision.
  while (!(sic_from_trace(n_star, gramian_trace, n) < gamma_c)) ++n_star;
  while (n_star > 2 &&
         sic_from_trace(n_star - 1, gramian_trace, n) < gamma_c) {
    --n_star;
  }
  return n_star;
}

int opt_security_param(double tau_c, double upsilon, long long n_samples) {
  if (!(tau_c > 0.0) || !(upsilon > 0.0) || n_samples < 1) {
    throw Error("opt_security_param: inputs must be positive");
  }
  // log2(upsilon tau_c / N) via logs; the direct product overflows for
  // extreme specs (upsilon tau_c alone reaches ~1e26 in the tests).
  const double log2_ratio =
      (std::log(upsilon) + std::log(tau_c) -
       std::log(static_cast<double>(n_samples))) /
      std::log(2.0);
  if (!(log2_ratio > 0.0)) {
    throw NonPositiveLog(
        "opt_security_param: upsilon * tau_c / N <= 1, no lambda >= 1 needed");
  }
  int lambda = static_cast<int>(std::floor(log2_ratio)) + 1;
  if (lambda < 1) lambda = 1;
  // Post-hoc verification of tau(N, lambda) > tau_c >= tau(N, lambda - 1).
  while (!(sdt(n_samples, lambda, upsilon) > tau_c)) ++lambda;
  while (lambda > 1 && sdt(n_samples, lambda - 1, upsilon) > tau_c) --lambda;
  return lambda;
}

SecureVerdict is_secure(const SecuritySpec& spec, int lambda,
                        const PlantModel& plant, const FeedbackGain& gain) {
  spec.validate();
  const double trace = gramian_trace(plant, gain);
  const long long crossover = min_sample_size(spec.gamma_c, trace, plant.n());
  if (sdt(crossover, lambda, spec.upsilon) > spec.tau_c) {
    return SecureVerdict{true, 0};
  }
  return SecureVerdict{false, crossover};
}

bool noiseless_secure(int n, int lambda, const SecuritySpec& spec) {
  if (n < 1) {
    throw Error("noiseless_secure: n must be >= 1");
  }
  spec.validate();
  return sdt(n + 1, lambda, spec.upsilon) > spec.tau_c;
}

double gnfs_log_cost(long long k) {
  const double ln2k = static_cast<double>(k) * std::log(2.0);
  return std::cbrt(64.0 / 9.0) * std::cbrt(ln2k) *
         std::pow(std::log(ln2k), 2.0 / 3.0);
}

long long opt_key_length(int lambda) {
  if (lambda < 2) {
    throw Error("opt_key_length: lambda must be >= 2");
  }
  const double target = static_cast<double>(lambda) * std::log(2.0);
  // Omega is increasing in k, so bracket then bisect for the smallest k
  // with ln Omega(k) >= lambda ln 2.
  long long lo = 2;
  long long hi = 2;
  while (gnfs_log_cost(hi) < target) {
    if (hi > (1LL << 61)) {
      throw NonConvergence("opt_key_length: no key length reaches 2^lambda");
    }
    hi *= 2;
  }
  while (lo < hi) {
    const long long mid = lo + (hi - lo) / 2;
    if (gnfs_log_cost(mid) >= target) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

SecurityReport design_pipeline(const PlantModel& plant,
                               const SecuritySpec& spec) {
  plant.validate();
  spec.validate();
  const SdpSolution sol = solve_h2_sdp(plant);
  const SynthesisResult synth = extract_gain(plant, sol);

  SecurityReport report;
  report.f_star = synth.gain;
  report.gramian_trace = synth.gramian_trace;
  report.n_star =
      min_sample_size(spec.gamma_c, synth.gramian_trace, plant.n());
  report.lambda_star =
      opt_security_param(spec.tau_c, spec.upsilon, report.n_star);
  report.lambda_star_static = opt_security_param(spec.tau_c, spec.upsilon, 1);
  report.k_star = opt_key_length(report.lambda_star);
  report.k_star_static = opt_key_length(report.lambda_star_static);
  report.secure =
      sdt(report.n_star, report.lambda_star, spec.upsilon) > spec.tau_c;
  return report;
}

}  // namespace ectrl
