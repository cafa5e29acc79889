#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace repeatcap::sim {

// Splittable counter-style generator; every public entry point takes an
// explicit 64-bit seed and derives independent streams from it.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform double in (0,1).
    double next_unit();
    /// Independent stream for (seed, a, b); used for per-trial substreams.
    static SplitMix64 derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  private:
    std::uint64_t state_;
};

// The repetition rule D of the repeat channel.
struct RepetitionRule {
    enum class Kind { Bernoulli, Poisson };
    Kind kind;
    double param;  // retention p, or Poisson mean lambda

    double deletion_prob() const;  // d = Pr[D = 0]
    double mean() const;           // E[D]
    long sample(SplitMix64& rng) const;              // draw from D
    long sample_conditional(SplitMix64& rng) const;  // draw from D | D > 0

    static RepetitionRule bernoulli(double p);
    static RepetitionRule poisson(double lambda);
};

// Run-length encoding of a bit sequence; every entry is >= 1.
struct RunLengthSequence {
    std::vector<long> runs;
    int first_bit = 0;

    static RunLengthSequence from_bits(const std::vector<std::uint8_t>& bits);
    std::vector<std::uint8_t> to_bits() const;
};

/// Passes `input` through the D-repeat channel.  The first-ever bit is not
/// deleted: its repetition count is drawn from D | D > 0, all others from D.
std::vector<std::uint8_t> simulate_repeat_channel(const RepetitionRule& rule,
                                                  const std::vector<std::uint8_t>& input,
                                                  std::uint64_t seed);

// One pre-processor pass: the Z-sequence together with the geometric draws
// and the count of even-run bits deleted by the terminating round, so the
// exact length accounting n = sum Z_i + sum_{i<M}(G_i - 1) + E_M is testable.
struct PreprocessorTrace {
    std::vector<long> z;
    std::vector<long> g;
    long terminal_even_deletions = 0;
};

PreprocessorTrace simulate_preprocessor(const RepetitionRule& rule,
                                        const std::vector<std::uint8_t>& input,
                                        std::uint64_t seed, bool misspecified_g = false);

/// One run-processor output: a draw from (D | D > 0) + D^{(z-1)-fold}.
long simulate_runprocessor(const RepetitionRule& rule, long z, std::uint64_t seed);

struct EquivalenceOptions {
    int k_runs = 3;                    // compare the first k output run lengths
    int clip = 30;                     // clip run lengths here; one overflow bucket
    bool misspecified_preprocessor = false;  // negative control: G with mean 1
};

struct PositionStat {
    double tv;
    double threshold;  // 3 sqrt(S / trials)
    int support;
    double chi2;
    int dof;
    double p_value;
    bool pass;
};

struct EquivalenceReport {
    bool pass;
    int trials;
    bool insufficient_samples;  // trials below 1e4
    std::vector<PositionStat> positions;
    double joint_tv;
    int joint_support;
};

/// Samples the direct channel and the pre-processor/run-processor cascade
/// `trials` times each and compares the first k output run lengths.
EquivalenceReport equivalence_test(const RepetitionRule& rule,
                                   const std::vector<std::uint8_t>& input, int trials,
                                   std::uint64_t seed, const EquivalenceOptions& opts = {});

/// Parses a string of '0'/'1' characters.
std::vector<std::uint8_t> parse_bits(const std::string& s);

}  // namespace repeatcap::sim
