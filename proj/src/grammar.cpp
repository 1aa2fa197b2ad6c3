#include "mdlrnn/grammar.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mdlrnn {

namespace {

constexpr std::int64_t kInfLen = std::int64_t{1} << 50;
constexpr std::uint64_t kMaxSampleAttempts = 1'000'000;
constexpr std::uint64_t kEnumGuard = 200'000'000;

}  // namespace

// ---------------------------------------------------------------------------
// Rng
// ---------------------------------------------------------------------------

std::uint64_t Rng::uniform(std::uint64_t n) {
    if (n == 0) {
        throw std::runtime_error("Rng::uniform: empty range");
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    std::uint64_t v = next_u64();
    while (v >= limit) {
        v = next_u64();
    }
    return v % n;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) {
        throw std::runtime_error("Rng::uniform_int: bad range");
    }
    return lo + static_cast<std::int64_t>(uniform(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool Rng::bernoulli(const Rational& p) {
    if (p <= 0) {
        return false;
    }
    if (p >= 1) {
        return true;
    }
    const std::uint64_t u = next_u64();
    // u / 2^64 < num/den  <=>  u * den < num * 2^64
    const BigInt lhs = BigInt(u) * boost::multiprecision::denominator(p);
    const BigInt rhs = boost::multiprecision::numerator(p) << 64;
    return lhs < rhs;
}

std::size_t Rng::pick(const std::vector<Rational>& probs) {
    const std::uint64_t u = next_u64();
    Rational cumulative = 0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        cumulative += probs[i];
        const BigInt lhs = BigInt(u) * boost::multiprecision::denominator(cumulative);
        const BigInt rhs = boost::multiprecision::numerator(cumulative) << 64;
        if (lhs < rhs) {
            return i;
        }
    }
    return probs.size() - 1;
}

std::string Rng::state_string() const {
    std::ostringstream out;
    out << engine_;
    return out.str();
}

void Rng::set_state(const std::string& state) {
    std::istringstream in(state);
    in >> engine_;
    if (in.fail()) {
        throw std::runtime_error("Rng::set_state: malformed state");
    }
}

// ---------------------------------------------------------------------------
// Interned PCFG index
// ---------------------------------------------------------------------------

namespace {

struct IndexedRule {
    std::vector<std::int32_t> rhs;
    Rational prob;
};

struct PcfgIndex {
    std::int32_t terminal_count = 0;
    std::int32_t start_id = 0;
    std::vector<Symbol> symbols;                    // id -> symbol
    std::map<Symbol, std::int32_t> ids;             // symbol -> id
    std::vector<std::vector<IndexedRule>> rules;    // (id - terminal_count) -> rules
    std::vector<std::int64_t> min_len;              // per id, kInfLen if none

    bool is_terminal(std::int32_t id) const { return id < terminal_count; }

    static PcfgIndex build(const Pcfg& g) {
        PcfgIndex idx;
        for (const auto& t : g.terminals) {
            idx.ids.emplace(t, static_cast<std::int32_t>(idx.symbols.size()));
            idx.symbols.push_back(t);
        }
        idx.terminal_count = static_cast<std::int32_t>(idx.symbols.size());
        for (const auto& nt : g.nonterminals) {
            idx.ids.emplace(nt, static_cast<std::int32_t>(idx.symbols.size()));
            idx.symbols.push_back(nt);
        }
        const auto it = idx.ids.find(g.start);
        if (it == idx.ids.end()) {
            throw std::runtime_error("grammar: unknown start symbol '" + g.start + "'");
        }
        idx.start_id = it->second;
        idx.rules.resize(g.nonterminals.size());
        for (const auto& rule : g.rules) {
            const auto lhs_it = idx.ids.find(rule.lhs);
            if (lhs_it == idx.ids.end() || lhs_it->second < idx.terminal_count) {
                throw std::runtime_error("grammar: rule lhs '" + rule.lhs + "' is not a nonterminal");
            }
            IndexedRule ir;
            ir.prob = rule.prob;
            for (const auto& sym : rule.rhs) {
                const auto sym_it = idx.ids.find(sym);
                if (sym_it == idx.ids.end()) {
                    throw std::runtime_error("grammar: unknown symbol '" + sym + "' in rule rhs");
                }
                ir.rhs.push_back(sym_it->second);
            }
            idx.rules[lhs_it->second - idx.terminal_count].push_back(std::move(ir));
        }

        // Minimal derivable terminal length per symbol (fixpoint).
        idx.min_len.assign(idx.symbols.size(), kInfLen);
        for (std::int32_t t = 0; t < idx.terminal_count; ++t) {
            idx.min_len[t] = 1;
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t nt = 0; nt < idx.rules.size(); ++nt) {
                const std::int32_t id = idx.terminal_count + static_cast<std::int32_t>(nt);
                for (const auto& rule : idx.rules[nt]) {
                    std::int64_t total = 0;
                    for (const std::int32_t sym : rule.rhs) {
                        total = std::min(total + idx.min_len[sym], kInfLen);
                    }
                    if (total < idx.min_len[id]) {
                        idx.min_len[id] = total;
                        changed = true;
                    }
                }
            }
        }
        return idx;
    }

    std::int64_t form_min_len(const std::vector<std::int32_t>& form) const {
        std::int64_t total = 0;
        for (const std::int32_t sym : form) {
            total = std::min(total + min_len[sym], kInfLen);
        }
        return total;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Pcfg / LanguageSpec / Corpus
// ---------------------------------------------------------------------------

bool Pcfg::is_nonterminal(const Symbol& s) const {
    return std::find(nonterminals.begin(), nonterminals.end(), s) != nonterminals.end();
}

void Pcfg::validate() const {
    if (!is_nonterminal(start)) {
        throw std::runtime_error("grammar: start symbol '" + start + "' is not a nonterminal");
    }
    for (const auto& t : terminals) {
        if (is_nonterminal(t)) {
            throw std::runtime_error("grammar: symbol '" + t + "' is both terminal and nonterminal");
        }
    }
    for (const auto& nt : nonterminals) {
        Rational sum = 0;
        bool any = false;
        for (const auto& rule : rules) {
            if (rule.lhs == nt) {
                if (rule.prob <= 0 || rule.prob > 1) {
                    throw std::runtime_error("grammar: rule probability out of (0,1] for '" + nt + "'");
                }
                sum += rule.prob;
                any = true;
            }
        }
        if (!any) {
            throw std::runtime_error("grammar: nonterminal '" + nt + "' has no rules");
        }
        if (sum != 1) {
            throw std::runtime_error("grammar: probabilities for '" + nt + "' sum to " + rational_to_string(sum) + ", expected 1");
        }
    }
    const PcfgIndex idx = PcfgIndex::build(*this);
    for (std::size_t nt = 0; nt < nonterminals.size(); ++nt) {
        if (idx.min_len[idx.terminal_count + static_cast<std::int32_t>(nt)] >= kInfLen) {
            throw std::runtime_error("grammar: nonterminal '" + nonterminals[nt] + "' is unproductive");
        }
    }
}

const std::vector<Symbol>& LanguageSpec::alphabet() const {
    static const std::vector<Symbol> kAb = {"a", "b"};
    static const std::vector<Symbol> kAbc = {"a", "b", "c"};
    if (pcfg) {
        return pcfg->terminals;
    }
    if (parametric) {
        return parametric->kind == ParametricKind::anbn ? kAb : kAbc;
    }
    throw std::runtime_error("language spec: neither pcfg nor parametric");
}

void LanguageSpec::validate() const {
    if (static_cast<bool>(pcfg) == static_cast<bool>(parametric)) {
        throw std::runtime_error("language spec '" + name + "': exactly one of pcfg/parametric required");
    }
    if (pcfg) {
        pcfg->validate();
    }
    if (parametric && (parametric->p <= 0 || parametric->p >= 1)) {
        throw std::runtime_error("language spec '" + name + "': parameter p must be in (0,1)");
    }
    for (const auto& t : alphabet()) {
        if (t == eos) {
            throw std::runtime_error("language spec '" + name + "': eos symbol collides with alphabet");
        }
    }
    if (max_sample_len && *max_sample_len <= 0) {
        throw std::runtime_error("language spec '" + name + "': max_sample_len must be positive");
    }
}

Rational Corpus::total_weight() const {
    Rational sum = 0;
    for (const auto& entry : sequences) {
        sum += entry.weight;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace {

// Single leftmost stochastic derivation; nullopt when aborted by a guard.
std::optional<TokenSeq> derive_once(const PcfgIndex& idx, Rng& rng, std::int64_t step_guard, std::optional<int> max_len) {
    TokenSeq out;
    std::vector<std::int32_t> stack = {idx.start_id};  // top at back
    std::int64_t steps = 0;
    while (!stack.empty()) {
        if (++steps > step_guard) {
            return std::nullopt;
        }
        const std::int32_t top = stack.back();
        stack.pop_back();
        if (idx.is_terminal(top)) {
            out.push_back(idx.symbols[top]);
            if (max_len && static_cast<int>(out.size()) > *max_len) {
                return std::nullopt;
            }
            continue;
        }
        const auto& rules = idx.rules[top - idx.terminal_count];
        std::vector<Rational> probs;
        probs.reserve(rules.size());
        for (const auto& rule : rules) {
            probs.push_back(rule.prob);
        }
        const auto& chosen = rules[rng.pick(probs)];
        for (auto it = chosen.rhs.rbegin(); it != chosen.rhs.rend(); ++it) {
            stack.push_back(*it);
        }
    }
    return out;
}

TokenSeq expand_parametric(const ParametricLanguage& lang, int n) {
    TokenSeq out;
    out.reserve(static_cast<std::size_t>(n) * (lang.kind == ParametricKind::anbn ? 2 : 3));
    for (int i = 0; i < n; ++i) out.emplace_back("a");
    for (int i = 0; i < n; ++i) out.emplace_back("b");
    if (lang.kind == ParametricKind::anbncn) {
        for (int i = 0; i < n; ++i) out.emplace_back("c");
    }
    return out;
}

}  // namespace

TokenSeq sample_string(const LanguageSpec& spec, Rng& rng) {
    const std::int64_t step_guard = 10LL * (spec.max_sample_len ? *spec.max_sample_len : 1000);
    if (spec.parametric) {
        for (std::uint64_t attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
            int n = 1;
            bool overflow = false;
            while (!rng.bernoulli(spec.parametric->p)) {
                if (++n > step_guard) {
                    overflow = true;
                    break;
                }
            }
            if (overflow) {
                continue;
            }
            TokenSeq s = expand_parametric(*spec.parametric, n);
            if (!spec.max_sample_len || static_cast<int>(s.size()) <= *spec.max_sample_len) {
                return s;
            }
        }
        throw std::runtime_error("sampling stalled");
    }
    const PcfgIndex idx = PcfgIndex::build(*spec.pcfg);
    for (std::uint64_t attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        auto s = derive_once(idx, rng, step_guard, spec.max_sample_len);
        if (s) {
            return *s;
        }
    }
    throw std::runtime_error("sampling stalled");
}

Corpus sample_corpus(const LanguageSpec& spec, int count, std::uint64_t seed) {
    if (count < 1) {
        throw std::runtime_error("sample_corpus: count must be >= 1");
    }
    Rng rng(seed);
    Corpus corpus;
    corpus.role = CorpusRole::train;
    corpus.sequences.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        CorpusEntry entry;
        entry.tokens = sample_string(spec, rng);
        entry.weight = 1;
        entry.true_prob = string_probability(spec, entry.tokens);
        corpus.sequences.push_back(std::move(entry));
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// GrammarPredictor
// ---------------------------------------------------------------------------

struct GrammarPredictor::Impl {
    std::optional<PcfgIndex> index;
    std::optional<ParametricLanguage> parametric;
    std::size_t alphabet_size = 0;
    bool dead = false;

    // PCFG posterior: expanded sentential forms (symbol ids) -> mass.
    std::map<std::vector<std::int32_t>, Rational> beliefs;

    // Parametric bookkeeping.
    int count_a = 0;
    int count_b = 0;
    int count_c = 0;
    int phase = 0;  // 0 = a-run, 1 = b-run, 2 = c-run

    void reset() {
        dead = false;
        beliefs.clear();
        count_a = count_b = count_c = 0;
        phase = 0;
        if (index) {
            expand_and_insert({index->start_id}, Rational(1));
        }
    }

    // Depth-first expansion of the leftmost nonterminal until the form is
    // empty or starts with a terminal.
    void expand_and_insert(std::vector<std::int32_t> form, Rational mass) {
        struct Item {
            std::vector<std::int32_t> form;
            Rational mass;
        };
        std::vector<Item> work;
        work.push_back({std::move(form), std::move(mass)});
        std::int64_t guard = 0;
        while (!work.empty()) {
            Item item = std::move(work.back());
            work.pop_back();
            if (++guard > 1'000'000) {
                throw std::runtime_error("grammar predictor: expansion did not terminate");
            }
            if (item.form.empty() || index->is_terminal(item.form.front())) {
                beliefs[item.form] += item.mass;
                continue;
            }
            const std::int32_t nt = item.form.front();
            for (const auto& rule : index->rules[nt - index->terminal_count]) {
                Item next;
                next.form.reserve(rule.rhs.size() + item.form.size() - 1);
                next.form.insert(next.form.end(), rule.rhs.begin(), rule.rhs.end());
                next.form.insert(next.form.end(), item.form.begin() + 1, item.form.end());
                next.mass = item.mass * rule.prob;
                work.push_back(std::move(next));
            }
        }
    }

    std::vector<Rational> pcfg_distribution() const {
        std::vector<Rational> dist(alphabet_size + 1, Rational(0));
        Rational total = 0;
        for (const auto& [form, mass] : beliefs) {
            total += mass;
            if (form.empty()) {
                dist.back() += mass;
            } else {
                dist[static_cast<std::size_t>(form.front())] += mass;
            }
        }
        if (total > 0) {
            for (auto& v : dist) {
                v /= total;
            }
        }
        return dist;
    }

    std::vector<Rational> parametric_distribution() const {
        const Rational p = parametric->p;
        const bool three = parametric->kind == ParametricKind::anbncn;
        std::vector<Rational> dist(three ? 4 : 3, Rational(0));
        // Layout: [a, b, (c,) eos]
        const std::size_t eos_slot = dist.size() - 1;
        if (phase == 0) {
            if (count_a == 0) {
                dist[0] = 1;
            } else {
                dist[0] = 1 - p;
                dist[1] = p;
            }
        } else if (phase == 1) {
            if (count_b < count_a) {
                dist[1] = 1;
            } else if (three) {
                dist[2] = 1;
            } else {
                dist[eos_slot] = 1;
            }
        } else {
            if (count_c < count_a) {
                dist[2] = 1;
            } else {
                dist[eos_slot] = 1;
            }
        }
        return dist;
    }

    bool consume_pcfg(const Symbol& symbol) {
        const auto it = index->ids.find(symbol);
        if (it == index->ids.end() || !index->is_terminal(it->second)) {
            return false;
        }
        const std::int32_t target = it->second;
        std::map<std::vector<std::int32_t>, Rational> old;
        old.swap(beliefs);
        bool matched = false;
        for (auto& [form, mass] : old) {
            if (!form.empty() && form.front() == target) {
                matched = true;
                expand_and_insert(std::vector<std::int32_t>(form.begin() + 1, form.end()), mass);
            }
        }
        return matched;
    }

    bool consume_parametric(const Symbol& symbol) {
        const bool three = parametric->kind == ParametricKind::anbncn;
        if (symbol == "a") {
            if (phase != 0) {
                return false;
            }
            ++count_a;
            return true;
        }
        if (symbol == "b") {
            if (count_a == 0 || phase > 1 || count_b >= count_a) {
                return false;
            }
            phase = 1;
            ++count_b;
            return true;
        }
        if (symbol == "c" && three) {
            if (phase == 0 || count_b != count_a || count_c >= count_a) {
                return false;
            }
            phase = 2;
            ++count_c;
            return true;
        }
        return false;
    }
};

GrammarPredictor::GrammarPredictor(const LanguageSpec& spec) : impl_(std::make_unique<Impl>()) {
    spec.validate();
    if (spec.pcfg) {
        impl_->index = PcfgIndex::build(*spec.pcfg);
        impl_->alphabet_size = spec.pcfg->terminals.size();
    } else {
        impl_->parametric = *spec.parametric;
        impl_->alphabet_size = spec.alphabet().size();
    }
    impl_->reset();
}

GrammarPredictor::~GrammarPredictor() = default;
GrammarPredictor::GrammarPredictor(GrammarPredictor&&) noexcept = default;
GrammarPredictor& GrammarPredictor::operator=(GrammarPredictor&&) noexcept = default;

void GrammarPredictor::reset() {
    impl_->reset();
}

bool GrammarPredictor::dead() const {
    return impl_->dead;
}

std::vector<Rational> GrammarPredictor::next_distribution() const {
    if (impl_->dead) {
        return std::vector<Rational>(impl_->alphabet_size + 1, Rational(0));
    }
    return impl_->index ? impl_->pcfg_distribution() : impl_->parametric_distribution();
}

bool GrammarPredictor::consume(const Symbol& symbol) {
    if (impl_->dead) {
        return false;
    }
    const bool ok = impl_->index ? impl_->consume_pcfg(symbol) : impl_->consume_parametric(symbol);
    if (!ok) {
        impl_->dead = true;
        impl_->beliefs.clear();
    }
    return ok;
}

Rational GrammarPredictor::completion_mass() const {
    if (impl_->dead) {
        return 0;
    }
    if (impl_->index) {
        const auto it = impl_->beliefs.find({});
        return it == impl_->beliefs.end() ? Rational(0) : it->second;
    }
    const auto& lang = *impl_->parametric;
    const bool complete = lang.kind == ParametricKind::anbn
                              ? (impl_->count_a >= 1 && impl_->count_b == impl_->count_a)
                              : (impl_->count_a >= 1 && impl_->count_b == impl_->count_a && impl_->count_c == impl_->count_a);
    if (!complete) {
        return 0;
    }
    Rational prob = lang.p;
    for (int i = 1; i < impl_->count_a; ++i) {
        prob *= (1 - lang.p);
    }
    return prob;
}

// ---------------------------------------------------------------------------
// string_probability / enumerate_test_set / optimal_score
// ---------------------------------------------------------------------------

Rational string_probability(const LanguageSpec& spec, const TokenSeq& s) {
    GrammarPredictor predictor(spec);
    for (const auto& token : s) {
        if (!predictor.consume(token)) {
            return 0;
        }
    }
    return predictor.completion_mass();
}

Corpus enumerate_test_set(const LanguageSpec& spec, const TestSetLimit& limit) {
    Corpus corpus;
    corpus.role = CorpusRole::test;

    if (spec.parametric) {
        if (!limit.n_range) {
            throw std::runtime_error("enumerate_test_set: parametric task requires an n-range");
        }
        const int lo = std::max(1, limit.n_range->first);
        const int hi = limit.n_range->second;
        if (static_cast<std::size_t>(std::max(0, hi - lo + 1)) > limit.member_cap) {
            throw std::runtime_error("test set too large");
        }
        Rational prob = spec.parametric->p;
        for (int i = 1; i < lo; ++i) {
            prob *= (1 - spec.parametric->p);
        }
        for (int n = lo; n <= hi; ++n) {
            CorpusEntry entry;
            entry.tokens = expand_parametric(*spec.parametric, n);
            entry.true_prob = prob;
            entry.weight = prob;
            corpus.sequences.push_back(std::move(entry));
            prob *= (1 - spec.parametric->p);
        }
        return corpus;
    }

    if (!limit.max_len) {
        throw std::runtime_error("enumerate_test_set: PCFG task requires a max length");
    }
    const int max_len = *limit.max_len;
    const PcfgIndex idx = PcfgIndex::build(*spec.pcfg);

    struct Item {
        std::vector<std::int32_t> emitted;
        std::vector<std::int32_t> form;
        Rational mass;
    };
    std::map<std::vector<std::int32_t>, Rational> members;
    std::deque<Item> queue;
    queue.push_back({{}, {idx.start_id}, Rational(1)});
    std::uint64_t ops = 0;
    while (!queue.empty()) {
        if (++ops > kEnumGuard) {
            throw std::runtime_error("test set enumeration stalled");
        }
        Item item = std::move(queue.front());
        queue.pop_front();
        // Strip leading terminals into the emitted prefix.
        std::size_t head = 0;
        while (head < item.form.size() && idx.is_terminal(item.form[head])) {
            item.emitted.push_back(item.form[head]);
            ++head;
        }
        item.form.erase(item.form.begin(), item.form.begin() + static_cast<std::ptrdiff_t>(head));
        const std::int64_t floor_len = static_cast<std::int64_t>(item.emitted.size()) + idx.form_min_len(item.form);
        if (floor_len > max_len) {
            continue;
        }
        if (item.form.empty()) {
            members[item.emitted] += item.mass;
            if (members.size() > limit.member_cap) {
                throw std::runtime_error("test set too large");
            }
            continue;
        }
        const std::int32_t nt = item.form.front();
        for (const auto& rule : idx.rules[nt - idx.terminal_count]) {
            Item next;
            next.emitted = item.emitted;
            next.form.reserve(rule.rhs.size() + item.form.size() - 1);
            next.form.insert(next.form.end(), rule.rhs.begin(), rule.rhs.end());
            next.form.insert(next.form.end(), item.form.begin() + 1, item.form.end());
            next.mass = item.mass * rule.prob;
            queue.push_back(std::move(next));
        }
    }

    for (const auto& [tokens_ids, prob] : members) {
        if (tokens_ids.empty() && !limit.include_empty) {
            continue;
        }
        CorpusEntry entry;
        entry.tokens.reserve(tokens_ids.size());
        for (const std::int32_t id : tokens_ids) {
            entry.tokens.push_back(idx.symbols[id]);
        }
        entry.true_prob = prob;
        entry.weight = prob;
        corpus.sequences.push_back(std::move(entry));
    }
    std::sort(corpus.sequences.begin(), corpus.sequences.end(), [](const CorpusEntry& a, const CorpusEntry& b) {
        if (a.tokens.size() != b.tokens.size()) {
            return a.tokens.size() < b.tokens.size();
        }
        return a.tokens < b.tokens;
    });
    return corpus;
}

double optimal_score_bits(const Corpus& corpus) {
    double bits = 0.0;
    for (const auto& entry : corpus.sequences) {
        if (entry.true_prob <= 0) {
            throw std::runtime_error("optimal score undefined: sequence with zero probability");
        }
        bits += to_double(entry.weight) * -log2_rational(entry.true_prob);
    }
    return bits;
}

int max_parametric_n(const LanguageSpec& spec, const Corpus& corpus) {
    if (!spec.parametric) {
        throw std::runtime_error("max_parametric_n: not a parametric task");
    }
    const std::size_t k = spec.parametric->kind == ParametricKind::anbn ? 2 : 3;
    std::size_t max_n = 0;
    for (const auto& entry : corpus.sequences) {
        max_n = std::max(max_n, entry.tokens.size() / k);
    }
    return static_cast<int>(max_n);
}

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

TokenSeq split_tokens(const std::string& s) {
    TokenSeq tokens;
    std::istringstream in(s);
    Symbol token;
    while (in >> token) {
        tokens.push_back(token);
    }
    return tokens;
}

}  // namespace

Pcfg parse_grammar_text(const std::string& text) {
    Pcfg g;
    std::set<Symbol> nonterminal_set;
    std::vector<std::pair<TokenSeq, std::pair<Symbol, Rational>>> pending;  // (rhs, (lhs, prob))
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto arrow = line.find("->");
        const auto colon = line.rfind(':');
        if (arrow == std::string::npos || colon == std::string::npos || colon < arrow) {
            throw std::runtime_error("grammar parse: malformed rule '" + line + "'");
        }
        const Symbol lhs = trim(line.substr(0, arrow));
        TokenSeq rhs = split_tokens(line.substr(arrow + 2, colon - arrow - 2));
        if (rhs.size() == 1 && (rhs[0] == "eps" || rhs[0] == "epsilon")) {
            rhs.clear();
        }
        const Rational prob = parse_rational(trim(line.substr(colon + 1)));
        if (lhs.empty()) {
            throw std::runtime_error("grammar parse: empty lhs in '" + line + "'");
        }
        if (nonterminal_set.insert(lhs).second) {
            g.nonterminals.push_back(lhs);
        }
        pending.push_back({std::move(rhs), {lhs, prob}});
    }
    if (g.nonterminals.empty()) {
        throw std::runtime_error("grammar parse: no rules");
    }
    g.start = g.nonterminals.front();
    std::set<Symbol> terminal_set;
    for (const auto& [rhs, lhs_prob] : pending) {
        PcfgRule rule;
        rule.lhs = lhs_prob.first;
        rule.prob = lhs_prob.second;
        rule.rhs = rhs;
        for (const auto& sym : rhs) {
            if (!nonterminal_set.count(sym) && terminal_set.insert(sym).second) {
                g.terminals.push_back(sym);
            }
        }
        g.rules.push_back(std::move(rule));
    }
    g.validate();
    return g;
}

Pcfg load_grammar_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open grammar file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_grammar_text(buffer.str());
}

std::string grammar_to_text(const Pcfg& g) {
    std::ostringstream out;
    for (const auto& rule : g.rules) {
        out << rule.lhs << " ->";
        for (const auto& sym : rule.rhs) {
            out << ' ' << sym;
        }
        out << " : " << rational_to_string(rule.prob) << '\n';
    }
    return out.str();
}

std::string corpus_to_text(const Corpus& corpus) {
    std::ostringstream out;
    out << "# role: " << (corpus.role == CorpusRole::train ? "train" : "test") << '\n';
    for (const auto& entry : corpus.sequences) {
        for (std::size_t i = 0; i < entry.tokens.size(); ++i) {
            if (i > 0) {
                out << ' ';
            }
            out << entry.tokens[i];
        }
        out << '\t' << rational_to_string(entry.weight) << '\t' << rational_to_string(entry.true_prob) << '\n';
    }
    return out.str();
}

Corpus parse_corpus_text(const std::string& text) {
    Corpus corpus;
    std::istringstream in(text);
    std::string line;
    bool role_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            const auto pos = line.find("role:");
            if (pos != std::string::npos) {
                const std::string role = trim(line.substr(pos + 5));
                if (role == "train") {
                    corpus.role = CorpusRole::train;
                } else if (role == "test") {
                    corpus.role = CorpusRole::test;
                } else {
                    throw std::runtime_error("corpus parse: unknown role '" + role + "'");
                }
                role_seen = true;
            }
            continue;
        }
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            throw std::runtime_error("corpus parse: malformed line '" + line + "'");
        }
        CorpusEntry entry;
        entry.tokens = split_tokens(line.substr(0, tab1));
        entry.weight = parse_rational(line.substr(tab1 + 1, tab2 - tab1 - 1));
        entry.true_prob = parse_rational(line.substr(tab2 + 1));
        corpus.sequences.push_back(std::move(entry));
    }
    if (!role_seen && corpus.sequences.empty()) {
        throw std::runtime_error("corpus parse: empty input");
    }
    return corpus;
}

void save_corpus_file(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write corpus file '" + path + "'");
    }
    out << corpus_to_text(corpus);
}

Corpus load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open corpus file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_corpus_text(buffer.str());
}

}  // namespace mdlrnn
