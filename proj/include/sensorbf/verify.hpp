#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sensorbf {

struct VerifyCheck {
  std::string name;
  double tol = 0.0;
  int evaluated = 0;
  int failures = 0;
  /// Largest measured error (or violation) over all evaluations.
  double worst = 0.0;

  bool passed() const { return failures == 0; }
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  bool passed() const;
};

/// Runs the invariant suite on `instances` random scenarios (K, L, M, N_i <= 4,
/// channel SNR in [-5, 15] dB): surrogate tightness, closed-form identities,
/// gradient against central differences, joint-QCQP objective against
/// Tr{W E(G)}, TRS certificates, scalar closed form against the generic
/// path, SOCP cone membership and outer-loop monotonicity of both algorithms.
VerifyReport run_verify_suite(int instances, std::uint64_t seed);

void print_verify_report(std::ostream& os, const VerifyReport& r);

}  // namespace sensorbf
