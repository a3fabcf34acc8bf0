#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mcquad/types.hpp"

namespace mcquad {

enum class ChainKind {
  iid_uniform,        // independent Uniform(Q) draws
  mh_uniform_target,  // Metropolis-Hastings, box proposal, Uniform(Q) target
  doeblin_mixture,    // lambda0 * Uniform(Q) + (1 - lambda0) * reflected walk
  mh_smooth_target,   // Metropolis-Hastings, box proposal, truncated normal target
};

ChainKind parse_chain_kind(std::string_view s);
const char* to_string(ChainKind k);

struct ChainConfig {
  ChainKind kind = ChainKind::mh_uniform_target;
  Domain domain = Domain::unit(1);
  double epsilon = 0.2;              // MH proposal half-width
  double lambda0 = 0.5;              // mixture weight of the regeneration measure
  double residual_halfwidth = 0.25;  // reflected-walk half-width of the mixture
  // Small set A of the mixture chain; Q when unset.
  std::optional<Domain> small_set;
  double target_mean = 0.5;          // per-coordinate, mh_smooth_target
  double target_sd = 0.25;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 1;

  std::size_t dim() const noexcept { return domain.dim(); }
  const Domain& atom_set() const { return small_set ? *small_set : domain; }
  // Throws InvalidArgument on out-of-range parameters.
  void validate() const;
};

struct ChainTrace {
  Design states;
  // mh kinds: 1 when the proposal leading to state i was accepted.
  std::vector<std::uint8_t> accepted;
  // doeblin_mixture: split bit Y_i (1 means X_{i+1} is drawn from psi).
  std::vector<std::uint8_t> split_bits;
  double acceptance_rate = 0.0;
};

// Metropolis-Hastings acceptance of proposal y from state x given the
// uniform u: y must lie in Q, then the usual target-ratio test applies.
bool mh_accept(const ChainConfig& config, std::span<const double> x, std::span<const double> y,
               double u);

// Trajectory of n states after burn_in steps from the domain centre.
// Identical seeds give bit-identical trajectories.
ChainTrace generate(const ChainConfig& config, std::size_t n);

// The stationary density pi(x); 0 outside Q.
double stationary_density(const ChainConfig& config, std::span<const double> x);

// Reflect y into [lo, hi] (mirror at both ends, any distance).
double reflect_into(double y, double lo, double hi);

// For the one-dimensional mixture chain: the exact transition matrix between
// `bins` equal-width bins of Q, P[i][j] = mean over x in bin i of P(x, bin j).
std::vector<std::vector<double>> mixture_bin_transitions(const ChainConfig& config,
                                                         std::size_t bins);

}  // namespace mcquad
