#pragma once

#include <cstddef>
#include <vector>

#include "d2dlf/channel.hpp"
#include "d2dlf/codebook.hpp"
#include "d2dlf/metrics.hpp"

namespace d2dlf {
namespace noisy {

// Binary-symmetric-channel feedback error model: each feedback bit flips
// independently with the link's crossover probability.
struct FeedbackNoise {
  double q_c = 0.0;
  double q_d = 0.0;

  void validate() const;
};

// Bits needed to label regions 0..count-1.
unsigned bits_for(std::size_t count);

// Population count of a XOR b; both must fit in `bits`.
unsigned hamming(unsigned a, unsigned b, unsigned bits);

// Full 2^bits x 2^bits BSC index-transition matrix,
// rho[i][j] = q^d(i,j) * (1-q)^(bits - d(i,j)). Symmetric, rows sum to 1.
std::vector<std::vector<double>> transition_matrix(double q, unsigned bits);

// Transition over region labels 0..count-1. Labels ride the BSC over
// bits_for(count) bits; received raw labels >= count are clamped to
// count-1, so columns still sum to 1. Equals transition_matrix when count
// is a power of two. rho[received][sent].
std::vector<std::vector<double>> index_transition(double q, std::size_t count);

double avg_power_c_noisy(const Codebook& cb, const ChannelStats& stats,
                         const FeedbackNoise& noise);
double avg_power_d_noisy(const Codebook& cb, const ChannelStats& stats,
                         const FeedbackNoise& noise);
double avg_secrecy_rate_c_noisy(const Codebook& cb, const ChannelStats& stats,
                                const FeedbackNoise& noise);
double avg_rate_d_noisy(const Codebook& cb, const ChannelStats& stats,
                        const FeedbackNoise& noise);
double outage_codebook_noisy(const Codebook& cb, const ChannelStats& stats,
                             const FeedbackNoise& noise);

metrics::MetricsReport evaluate(const Codebook& cb, const ChannelStats& stats,
                                const FeedbackNoise& noise);

}  // namespace noisy
}  // namespace d2dlf
