#pragma once

#include "mdlrnn/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace mdlrnn {

using Symbol = std::string;
using TokenSeq = std::vector<Symbol>;

// Deterministic random source. All draws go through next_u64 so streams are
// reproducible across platforms; standard distributions are avoided on purpose.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n), rejection-sampled.
    std::uint64_t uniform(std::uint64_t n);

    // Uniform over [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    double uniform_real();  // [0, 1)

    // True with probability p (exact to within 2^-64, deterministically).
    bool bernoulli(const Rational& p);

    // Index into a cumulative choice over exact probabilities (must sum to 1).
    std::size_t pick(const std::vector<Rational>& probs);

    std::string state_string() const;
    void set_state(const std::string& state);

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Language definitions
// ---------------------------------------------------------------------------

struct PcfgRule {
    Symbol lhs;
    TokenSeq rhs;  // empty = epsilon
    Rational prob;
};

struct Pcfg {
    std::vector<Symbol> nonterminals;
    std::vector<Symbol> terminals;  // the alphabet, in fixed order
    Symbol start;
    std::vector<PcfgRule> rules;

    bool is_nonterminal(const Symbol& s) const;
    // Checks: per-lhs probabilities sum to exactly 1, start is a nonterminal,
    // all rhs symbols known, every nonterminal derives some finite string.
    void validate() const;
};

enum class ParametricKind { anbn, anbncn };

// a^n b^n (and a^n b^n c^n, which is not context-free) with n geometric:
// P(n) = p * (1-p)^(n-1), n >= 1.
struct ParametricLanguage {
    ParametricKind kind;
    Rational p;
};

struct LanguageSpec {
    std::string name;
    std::optional<Pcfg> pcfg;
    std::optional<ParametricLanguage> parametric;
    std::optional<int> max_sample_len;  // rejection bound on sampled strings
    Symbol eos = "<eos>";

    const std::vector<Symbol>& alphabet() const;
    void validate() const;
};

// ---------------------------------------------------------------------------
// Corpora
// ---------------------------------------------------------------------------

enum class CorpusRole { train, test };

struct CorpusEntry {
    TokenSeq tokens;
    Rational weight;
    Rational true_prob;
};

struct Corpus {
    CorpusRole role = CorpusRole::train;
    std::vector<CorpusEntry> sequences;

    Rational total_weight() const;
};

struct TestSetLimit {
    // Parametric tasks enumerate n in [n_lo, n_hi]; PCFG tasks enumerate all
    // members of rendered length <= max_len.
    std::optional<std::pair<int, int>> n_range;
    std::optional<int> max_len;
    bool include_empty = true;
    std::size_t member_cap = 10'000'000;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// One string from the language distribution. Derivations that exceed the
// expansion-step guard are aborted and resampled; after 10^6 aborted
// attempts throws "sampling stalled".
TokenSeq sample_string(const LanguageSpec& spec, Rng& rng);

// `count` strings with weight 1 each, true_prob recorded per string.
Corpus sample_corpus(const LanguageSpec& spec, int count, std::uint64_t seed);

// Exact probability of the grammar generating `s`; 0 for non-members.
Rational string_probability(const LanguageSpec& spec, const TokenSeq& s);

// Every member within the limit, weighted by its true probability.
Corpus enumerate_test_set(const LanguageSpec& spec, const TestSetLimit& limit);

// Sum over sequences of weight * (-log2 true_prob), in bits.
double optimal_score_bits(const Corpus& corpus);

// Largest n among parametric-language members of a corpus (n_max of training
// set, used to bound the exhaustive test range).
int max_parametric_n(const LanguageSpec& spec, const Corpus& corpus);

// ---------------------------------------------------------------------------
// Exact next-symbol conditionals
// ---------------------------------------------------------------------------

// Tracks the posterior over derivation states while consuming a prefix and
// exposes the true conditional distribution over alphabet + eos. For PCFGs
// this advances a weighted set of sentential forms (kept expanded so every
// form is empty or starts with a terminal); parametric languages use the
// geometric closed form.
class GrammarPredictor {
public:
    explicit GrammarPredictor(const LanguageSpec& spec);
    ~GrammarPredictor();
    GrammarPredictor(GrammarPredictor&&) noexcept;
    GrammarPredictor& operator=(GrammarPredictor&&) noexcept;
    GrammarPredictor(const GrammarPredictor&) = delete;
    GrammarPredictor& operator=(const GrammarPredictor&) = delete;

    // Probabilities in alphabet order, with eos last. Sums to 1 while the
    // prefix is viable.
    std::vector<Rational> next_distribution() const;

    // Returns false (and goes dead) if the symbol is impossible here.
    bool consume(const Symbol& symbol);

    bool dead() const;
    void reset();

    // Unnormalized probability that the string ends exactly here, i.e. the
    // probability of the consumed prefix as a complete string.
    Rational completion_mass() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

// One rule per line: "LHS -> RHS... : p/q". The first rule's lhs is the start
// symbol; symbols that never appear as an lhs are terminals. Empty rhs (or
// the placeholder "eps") is epsilon. '#' starts a comment.
Pcfg parse_grammar_text(const std::string& text);
Pcfg load_grammar_file(const std::string& path);
std::string grammar_to_text(const Pcfg& g);

// One sequence per line: space-separated tokens, tab, weight, tab, true_prob
// with exact rational rendering. A "# role: train|test" header records the role.
std::string corpus_to_text(const Corpus& corpus);
Corpus parse_corpus_text(const std::string& text);
void save_corpus_file(const Corpus& corpus, const std::string& path);
Corpus load_corpus_file(const std::string& path);

}  // namespace mdlrnn
