#pragma once

#include <cstddef>
#include <vector>

#include "adaptcb/core.hpp"

namespace adaptcb {

/// argmin_p <p, L> - (2/eta) sum sqrt(p_i): p_i = (eta (L_i - lambda))^-2.
/// The normalizer lambda is returned through `lambda_out` when non-null.
Vector tsallis_solve(const Vector& losses, double eta, double* lambda_out = nullptr);

/// eta = sqrt(1 / (2T)).
double tsallis_default_rate(std::size_t horizon);

struct MasterDraw {
  std::size_t arm = 0;
  double prob = 1.0;  // q_{t, arm}
  double rho = 1.0;   // rho_{t, arm}
};

struct BiasEvent {
  bool triggered = false;
  std::size_t arm = 0;
  double bias = 0.0;        // b_t
  double estimate = 0.0;    // ell_hat_{t, arm}
};

/// (alpha, R)-hedged FTRL with the Tsallis potential over M arms. With
/// R = 0 this is plain Tsallis-INF.
class HedgedTsallisInf {
 public:
  HedgedTsallisInf(std::size_t arms, double eta, double alpha, double hedge);

  std::size_t arms() const { return static_cast<std::size_t>(loss_hat_.size()); }
  double eta() const { return eta_; }
  double alpha() const { return alpha_; }
  double hedge() const { return hedge_; }

  /// Draws A_t from the current play distribution and refreshes rho.
  MasterDraw sample(RngStream& rng);
  /// Feeds the shifted loss of the arm returned by the last sample().
  BiasEvent update(double shifted_loss);

  /// Distribution for the next sample() call.
  const Vector& play_distribution() const { return play_; }
  const Vector& loss_estimates() const { return loss_hat_; }
  const Vector& ledger() const { return ledger_; }
  const Vector& initial_ledger() const { return ledger0_; }
  /// max over past and upcoming play distributions of 1/p.
  Vector rho_including_next() const;
  const Vector& rho() const { return rho_; }
  /// Arms that have triggered at least one bias event.
  const std::vector<bool>& biased() const { return biased_; }

 private:
  Vector effective_losses() const { return loss_hat_ - (ledger_ - ledger0_); }

  double eta_;
  double alpha_;
  double hedge_;
  Vector loss_hat_;
  Vector ledger_;
  Vector ledger0_;
  Vector rho_;
  Vector play_;
  std::vector<bool> biased_;
  std::optional<MasterDraw> pending_;
};

}  // namespace adaptcb
