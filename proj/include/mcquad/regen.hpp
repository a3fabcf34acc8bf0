#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "mcquad/chains.hpp"
#include "mcquad/types.hpp"

namespace mcquad::regen {

// Half-open index range [begin, end) of the state sequence.
struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const noexcept { return end - begin; }
};

// Split chain Z_i = (X_i, Y_i). Times theta(k) are the indices i with
// Z_i in the atom A x {1}; block k covers theta(k)+1 .. theta(k+1).
struct SplitTrace {
  ChainConfig config;
  Design states;
  std::vector<std::uint8_t> bits;
  std::vector<std::size_t> regeneration_times;

  // l_n = number of visits to the atom.
  std::size_t visits() const noexcept { return regeneration_times.size(); }
  // The l_n - 1 complete blocks between consecutive visits.
  std::vector<Block> blocks() const;
};

// Simulates the split mixture chain. Throws UnsupportedChain unless the
// chain kind carries an explicit minorization (doeblin_mixture).
SplitTrace split_simulate(const ChainConfig& config, std::size_t n);

enum class TestFunction { one, lower_half, identity };
TestFunction parse_test_function(std::string_view s);
const char* to_string(TestFunction g);
double apply(TestFunction g, std::span<const double> x);

// pi(g) by quadrature against the known stationary density.
double stationary_expectation(const ChainConfig& config, TestFunction g);

struct KacReport {
  double lhs = 0.0;          // mean block sum of g
  double rhs = 0.0;          // alpha0_hat * pi(g)
  double rel_err = 0.0;
  double alpha0_hat = 0.0;   // mean block length
  std::size_t blocks = 0;
};

// Throws InsufficientBlocks with fewer than `min_blocks` complete blocks.
KacReport kac_check(const SplitTrace& trace, TestFunction g, std::size_t min_blocks = 100);

struct MomentReport {
  double p = 1.0;
  double theta_moment = 0.0;  // mean block length^p
  double xi_hat = 0.0;        // pooled A-return times, mean tau^p
  double bound = 0.0;         // lambda0^-1 e^(l/p) / (e^(l/p) - 1) * xi_hat^(1/p)
  bool bound_holds = false;   // theta_moment^(1/p) <= bound
};

// Requires p in [1, 6].
MomentReport return_time_moments(const SplitTrace& trace, double p);

struct IndependenceReport {
  double sum_correlation = 0.0;     // lag-1, block sums of the first coordinate
  double length_correlation = 0.0;  // lag-1, block lengths (0 if lengths are constant)
  double band = 0.0;                // 3 / sqrt(#blocks)
  std::size_t blocks = 0;
  bool independent = false;
};

IndependenceReport block_independence_check(const Design& states,
                                            const std::vector<Block>& blocks,
                                            std::size_t min_blocks = 1000);
IndependenceReport block_independence_check(const SplitTrace& trace,
                                            std::size_t min_blocks = 1000);

// Consecutive chunks of `length` states, ignoring the split structure.
std::vector<Block> fixed_length_blocks(std::size_t n, std::size_t length);

// Every m0-th state starting at `offset`: the sub-chain that satisfies a
// one-step minorization when the original needs m0 steps.
Design subsample(const Design& states, std::size_t m0, std::size_t offset = 0);

// States X_{theta(k)+1} drawn right after each regeneration.
Design post_regeneration_states(const SplitTrace& trace);

// counts[i][j] = #{t : X_t in bin i, X_{t+1} in bin j} for the first
// coordinate on equal-width bins of [lo, hi].
std::vector<std::vector<std::size_t>> bin_transition_counts(const Design& states, double lo,
                                                            double hi, std::size_t bins);

}  // namespace mcquad::regen
