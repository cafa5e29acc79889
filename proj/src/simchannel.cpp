#include "repeatcap/simchannel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace repeatcap::sim {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

SplitMix64 SplitMix64::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    SplitMix64 mixer(seed);
    std::uint64_t s = mixer.next();
    SplitMix64 mixer2(s ^ (a * 0xD1B54A32D192ED03ULL) ^ (b * 0x8CB92BA72F3D8DD7ULL));
    return SplitMix64(mixer2.next());
}

namespace {

// Geometric on {1,2,...} with success probability p (mean 1/p), inverse CDF.
long geometric_ge1(SplitMix64& rng, double p) {
    if (p >= 1.0) return 1;
    const double u = rng.next_unit();
    return 1 + static_cast<long>(std::floor(std::log(u) / std::log1p(-p)));
}

long poisson_draw(SplitMix64& rng, double lambda) {
    long total = 0;
    // Poisson is additive; peel off chunks so Knuth's product stays in range.
    while (lambda > 30.0) {
        const double chunk = 30.0;
        double limit = std::exp(-chunk);
        long k = 0;
        double prod = rng.next_unit();
        while (prod > limit) {
            ++k;
            prod *= rng.next_unit();
        }
        total += k;
        lambda -= chunk;
    }
    const double limit = std::exp(-lambda);
    long k = -1;
    double prod = 1.0;
    do {
        ++k;
        prod *= rng.next_unit();
    } while (prod > limit);
    return total + k;
}

}  // namespace

RepetitionRule RepetitionRule::bernoulli(double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::domain_error("RepetitionRule: Bernoulli requires p in (0,1]");
    return {Kind::Bernoulli, p};
}

RepetitionRule RepetitionRule::poisson(double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("RepetitionRule: Poisson requires lambda > 0");
    return {Kind::Poisson, lambda};
}

double RepetitionRule::deletion_prob() const {
    return kind == Kind::Bernoulli ? 1.0 - param : std::exp(-param);
}

double RepetitionRule::mean() const { return param; }

long RepetitionRule::sample(SplitMix64& rng) const {
    if (kind == Kind::Bernoulli) return rng.next_unit() < param ? 1 : 0;
    return poisson_draw(rng, param);
}

long RepetitionRule::sample_conditional(SplitMix64& rng) const {
    if (kind == Kind::Bernoulli) return 1;  // D | D > 0 is the point mass at 1
    long k;
    do {
        k = poisson_draw(rng, param);
    } while (k == 0);
    return k;
}

RunLengthSequence RunLengthSequence::from_bits(const std::vector<std::uint8_t>& bits) {
    RunLengthSequence r;
    if (bits.empty()) return r;
    r.first_bit = bits.front();
    long len = 1;
    for (std::size_t i = 1; i < bits.size(); ++i) {
        if (bits[i] == bits[i - 1]) {
            ++len;
        } else {
            r.runs.push_back(len);
            len = 1;
        }
    }
    r.runs.push_back(len);
    return r;
}

std::vector<std::uint8_t> RunLengthSequence::to_bits() const {
    std::vector<std::uint8_t> bits;
    int bit = first_bit;
    for (long run : runs) {
        bits.insert(bits.end(), run, static_cast<std::uint8_t>(bit));
        bit ^= 1;
    }
    return bits;
}

std::vector<std::uint8_t> parse_bits(const std::string& s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c == '0')
            bits.push_back(0);
        else if (c == '1')
            bits.push_back(1);
        else
            throw std::invalid_argument("parse_bits: expected only '0' and '1'");
    }
    return bits;
}

std::vector<std::uint8_t> simulate_repeat_channel(const RepetitionRule& rule,
                                                  const std::vector<std::uint8_t>& input,
                                                  std::uint64_t seed) {
    if (input.empty()) throw std::invalid_argument("simulate_repeat_channel: empty input");
    SplitMix64 rng = SplitMix64::derive(seed, 0x1, 0);
    std::vector<std::uint8_t> out;
    out.reserve(input.size() * 2);
    for (std::size_t i = 0; i < input.size(); ++i) {
        const long copies = (i == 0) ? rule.sample_conditional(rng) : rule.sample(rng);
        out.insert(out.end(), copies, input[i]);
    }
    return out;
}

PreprocessorTrace simulate_preprocessor(const RepetitionRule& rule,
                                        const std::vector<std::uint8_t>& input,
                                        std::uint64_t seed, bool misspecified_g) {
    if (input.empty()) throw std::invalid_argument("simulate_preprocessor: empty input");
    if (input.front() != 0)
        throw std::invalid_argument("simulate_preprocessor: input must start with 0");
    SplitMix64 rng = SplitMix64::derive(seed, 0x2, 0);
    const double p = 1.0 - rule.deletion_prob();
    std::vector<long> runs = RunLengthSequence::from_bits(input).runs;
    PreprocessorTrace trace;
    while (true) {
        long n_even = 0;
        for (std::size_t i = 1; i < runs.size(); i += 2) n_even += runs[i];
        const long n_total = std::accumulate(runs.begin(), runs.end(), 0L);
        const long g = misspecified_g ? 1 : geometric_ge1(rng, p);
        trace.g.push_back(g);
        if (g > n_even) {
            trace.z.push_back(n_total - n_even);
            trace.terminal_even_deletions = n_even;
            break;
        }
        // Locate the g-th bit among the even runs.
        long cum = 0;
        std::size_t i = 1;
        for (;; i += 2) {
            if (cum + runs[i] >= g) break;
            cum += runs[i];
        }
        const long offset = g - cum;  // 1-based position of the survivor in run i
        long z = 0;
        for (std::size_t j = 0; j < i; j += 2) z += runs[j];
        trace.z.push_back(z);
        std::vector<long> next;
        next.reserve(runs.size() - i + 1);
        next.push_back(runs[i] - offset + 1);  // survivor heads the next round
        next.insert(next.end(), runs.begin() + i + 1, runs.end());
        runs = std::move(next);
    }
    return trace;
}

namespace {

long runprocessor_draw(const RepetitionRule& rule, long z, SplitMix64& rng) {
    long y = rule.sample_conditional(rng);
    for (long i = 1; i < z; ++i) y += rule.sample(rng);
    return y;
}

// Regularized upper incomplete gamma Q(a, x); chi-square survival function is
// Q(dof/2, x/2).  Series below a+1, continued fraction above.
double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < 500; ++n) {
            term *= x / (a + n);
            sum += term;
            if (term < 1e-16 * sum) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int n = 1; n < 500; ++n) {
        const double an = -n * (n - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - lg);
}

}  // namespace

long simulate_runprocessor(const RepetitionRule& rule, long z, std::uint64_t seed) {
    if (z < 1) throw std::domain_error("simulate_runprocessor: requires z >= 1");
    SplitMix64 rng = SplitMix64::derive(seed, 0x3, 0);
    return runprocessor_draw(rule, z, rng);
}

EquivalenceReport equivalence_test(const RepetitionRule& rule,
                                   const std::vector<std::uint8_t>& input, int trials,
                                   std::uint64_t seed, const EquivalenceOptions& opts) {
    if (trials < 1) throw std::invalid_argument("equivalence_test: requires trials >= 1");
    const int k = opts.k_runs;
    const int bins = opts.clip + 2;  // 0 = absent, 1..clip, clip+1 = overflow
    auto bin_of = [&](const std::vector<long>& runs, int j) {
        if (j >= static_cast<int>(runs.size())) return 0;
        return static_cast<int>(std::min<long>(runs[j], opts.clip + 1));
    };

    std::vector<std::vector<long>> direct_hist(k, std::vector<long>(bins, 0));
    std::vector<std::vector<long>> composed_hist(k, std::vector<long>(bins, 0));
    std::map<std::vector<int>, std::pair<long, long>> joint;

    for (int t = 0; t < trials; ++t) {
        const auto out = simulate_repeat_channel(
            rule, input, SplitMix64::derive(seed, 0x10, t).next());
        const auto direct_runs = RunLengthSequence::from_bits(out).runs;

        const auto trace = simulate_preprocessor(
            rule, input, SplitMix64::derive(seed, 0x20, t).next(), opts.misspecified_preprocessor);
        SplitMix64 rng = SplitMix64::derive(seed, 0x30, t);
        std::vector<long> composed_runs;
        composed_runs.reserve(trace.z.size());
        for (long z : trace.z) composed_runs.push_back(runprocessor_draw(rule, z, rng));

        std::vector<int> dkey(k), ckey(k);
        for (int j = 0; j < k; ++j) {
            dkey[j] = bin_of(direct_runs, j);
            ckey[j] = bin_of(composed_runs, j);
            direct_hist[j][dkey[j]]++;
            composed_hist[j][ckey[j]]++;
        }
        joint[dkey].first++;
        joint[ckey].second++;
    }

    EquivalenceReport rep;
    rep.trials = trials;
    rep.insufficient_samples = trials < 10000;
    rep.pass = true;
    const double n = trials;
    for (int j = 0; j < k; ++j) {
        PositionStat st{};
        int support = 0;
        double tv = 0.0, chi2 = 0.0;
        int cells = 0;
        // Merge sparse cells (pooled count < 5) into one bucket for chi-square.
        long rest_a = 0, rest_b = 0;
        for (int b = 0; b < bins; ++b) {
            const long a_cnt = direct_hist[j][b], b_cnt = composed_hist[j][b];
            if (a_cnt + b_cnt == 0) continue;
            ++support;
            tv += std::abs(a_cnt - b_cnt) / (2.0 * n);
            if (a_cnt + b_cnt >= 5) {
                const double ea = 0.5 * (a_cnt + b_cnt), eb = ea;
                chi2 += (a_cnt - ea) * (a_cnt - ea) / ea + (b_cnt - eb) * (b_cnt - eb) / eb;
                ++cells;
            } else {
                rest_a += a_cnt;
                rest_b += b_cnt;
            }
        }
        if (rest_a + rest_b > 0) {
            const double ea = 0.5 * (rest_a + rest_b), eb = ea;
            chi2 += (rest_a - ea) * (rest_a - ea) / ea + (rest_b - eb) * (rest_b - eb) / eb;
            ++cells;
        }
        st.tv = tv;
        st.support = support;
        st.threshold = 3.0 * std::sqrt(static_cast<double>(support) / n);
        st.chi2 = chi2;
        st.dof = std::max(cells - 1, 1);
        st.p_value = gamma_q(0.5 * st.dof, 0.5 * chi2);
        st.pass = tv <= st.threshold;
        rep.pass = rep.pass && st.pass;
        rep.positions.push_back(st);
    }
    double jtv = 0.0;
    for (const auto& [key, cnt] : joint) jtv += std::abs(cnt.first - cnt.second) / (2.0 * n);
    rep.joint_tv = jtv;
    rep.joint_support = static_cast<int>(joint.size());
    return rep;
}

}  // namespace repeatcap::sim
