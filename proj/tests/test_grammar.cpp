#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdlrnn/grammar.hpp"
#include "mdlrnn/tasks.hpp"
#include "oracles.hpp"

#include <set>

using namespace mdlrnn;

namespace {

LanguageSpec anbn_spec() {
    return get_task("anbn").spec;
}

TokenSeq tokens(std::initializer_list<const char*> list) {
    TokenSeq out;
    for (const char* s : list) {
        out.emplace_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("string probability closed forms") {
    const auto anbn = anbn_spec();
    CHECK(string_probability(anbn, tokens({"a", "b"})) == make_rational(3, 10));
    CHECK(string_probability(anbn, tokens({"a", "a", "b", "b"})) == make_rational(21, 100));  // 0.3 * 0.7
    CHECK(string_probability(anbn, tokens({"a", "a", "b"})) == 0);
    CHECK(string_probability(anbn, tokens({"b"})) == 0);
    CHECK(string_probability(anbn, {}) == 0);

    const auto anbncn = get_task("anbncn").spec;
    CHECK(string_probability(anbncn, tokens({"a", "b", "c"})) == make_rational(3, 10));
    CHECK(string_probability(anbncn, tokens({"a", "a", "a", "b", "b", "b", "c", "c", "c"})) ==
          make_rational(3, 10) * make_rational(49, 100));
    CHECK(string_probability(anbncn, tokens({"a", "b"})) == 0);
}

TEST_CASE("dyck1 unique derivation product") {
    const auto dyck1 = get_task("dyck1").spec;
    CHECK(string_probability(dyck1, tokens({"[", "]"})) == make_rational(4, 27));  // (1/3)(2/3)(2/3)
    CHECK(string_probability(dyck1, {}) == make_rational(2, 3));
    CHECK(string_probability(dyck1, tokens({"[", "]", "["})) == 0);
}

TEST_CASE("pcfg probabilities match brute-force derivation sums") {
    for (const auto& name : {"dyck1", "dyck2", "arithmetic", "toy_english"}) {
        const auto task = get_task(name);
        TestSetLimit limit;
        limit.max_len = 8;
        const auto members = enumerate_test_set(task.spec, limit);
        REQUIRE(!members.sequences.empty());
        for (const auto& entry : members.sequences) {
            const Rational expected = oracles::brute_force_probability(*task.spec.pcfg, entry.tokens);
            CHECK(string_probability(task.spec, entry.tokens) == expected);
            CHECK(entry.true_prob == expected);
        }
    }
}

TEST_CASE("toy english spot checks") {
    const auto spec = get_task("toy_english").spec;
    // NP->N (3/4) * VP->Vi (33/100)
    CHECK(string_probability(spec, tokens({"dogs", "sleep"})) == make_rational(3, 4) * make_rational(33, 100));
    // dogs chase dogs: 3/4 * 17/50 * 3/4
    CHECK(string_probability(spec, tokens({"dogs", "chase", "dogs"})) ==
          make_rational(3, 4) * make_rational(17, 50) * make_rational(3, 4));
    // think that expands to two tokens
    CHECK(string_probability(spec, tokens({"dogs", "think", "that", "dogs", "sleep"})) ==
          make_rational(3, 4) * make_rational(33, 100) * make_rational(3, 4) * make_rational(33, 100));
    CHECK(string_probability(spec, tokens({"dogs", "think", "dogs", "sleep"})) == 0);
}

TEST_CASE("sampling is reproducible and yields members") {
    for (const auto& name : task_names()) {
        const auto task = get_task(name);
        Rng rng1(42), rng2(42);
        for (int i = 0; i < 20; ++i) {
            const auto s1 = sample_string(task.spec, rng1);
            const auto s2 = sample_string(task.spec, rng2);
            CHECK(s1 == s2);
            CHECK(string_probability(task.spec, s1) > 0);
            if (task.spec.max_sample_len) {
                CHECK(static_cast<int>(s1.size()) <= *task.spec.max_sample_len);
            }
        }
    }
}

TEST_CASE("sample_corpus structure") {
    const auto task = get_task("anbn");
    const auto corpus = sample_corpus(task.spec, 50, 100);
    CHECK(corpus.role == CorpusRole::train);
    CHECK(corpus.sequences.size() == 50);
    CHECK(corpus.total_weight() == 50);
    for (const auto& entry : corpus.sequences) {
        CHECK(entry.weight == 1);
        CHECK(entry.true_prob == string_probability(task.spec, entry.tokens));
    }
    const auto again = sample_corpus(task.spec, 50, 100);
    CHECK(corpus_to_text(again) == corpus_to_text(corpus));
    const auto different = sample_corpus(task.spec, 50, 101);
    CHECK(corpus_to_text(different) != corpus_to_text(corpus));
}

TEST_CASE("anbn test set mass is exactly 1 - 0.7^N") {
    const auto task = get_task("anbn");
    TestSetLimit limit;
    limit.n_range = {1, 30};
    const auto test = enumerate_test_set(task.spec, limit);
    CHECK(test.sequences.size() == 30);
    Rational mass = 0;
    for (const auto& entry : test.sequences) {
        CHECK(entry.weight == entry.true_prob);
        mass += entry.true_prob;
    }
    Rational tail = 1;
    for (int i = 0; i < 30; ++i) {
        tail *= make_rational(7, 10);
    }
    CHECK(mass == 1 - tail);
}

TEST_CASE("pcfg test sets: masses bounded, members deduplicated, closed under sampling") {
    for (const auto& name : {"dyck1", "dyck2", "arithmetic", "toy_english"}) {
        const auto task = get_task(name);
        const auto limit = task_test_limit(task, nullptr);
        const auto test = enumerate_test_set(task.spec, limit);
        REQUIRE(!test.sequences.empty());
        Rational mass = 0;
        std::set<TokenSeq> seen;
        for (const auto& entry : test.sequences) {
            mass += entry.true_prob;
            CHECK(seen.insert(entry.tokens).second);
            CHECK(static_cast<int>(entry.tokens.size()) <= *limit.max_len);
        }
        CHECK(mass <= 1);

        // Closure: sampled members within the limit appear with equal probability.
        Rng rng(13);
        std::map<TokenSeq, Rational> lookup;
        for (const auto& entry : test.sequences) {
            lookup[entry.tokens] = entry.true_prob;
        }
        for (int i = 0; i < 1000; ++i) {
            const auto s = sample_string(task.spec, rng);
            if (static_cast<int>(s.size()) <= *limit.max_len) {
                REQUIRE(lookup.count(s));
                CHECK(lookup[s] == string_probability(task.spec, s));
            }
        }
    }
}

TEST_CASE("dyck test sets include the empty string unless excluded") {
    const auto task = get_task("dyck1");
    auto limit = task_test_limit(task, nullptr);
    const auto with_empty = enumerate_test_set(task.spec, limit);
    CHECK(with_empty.sequences.front().tokens.empty());
    // Dyck-1 members of length <= 10: Catalan 1+1+2+5+14+42.
    CHECK(with_empty.sequences.size() == 65);
    limit.include_empty = false;
    const auto without_empty = enumerate_test_set(task.spec, limit);
    CHECK(without_empty.sequences.size() == 64);
    for (const auto& entry : without_empty.sequences) {
        CHECK(!entry.tokens.empty());
    }
}

TEST_CASE("optimal scores") {
    Corpus single;
    single.role = CorpusRole::train;
    single.sequences.push_back({tokens({"a", "b"}), 1, make_rational(3, 10)});
    CHECK(optimal_score_bits(single) == doctest::Approx(1.7369655941662063).epsilon(1e-12));

    const auto task = get_task("anbn");
    TestSetLimit limit;
    limit.n_range = {1, 1020};
    const auto test = enumerate_test_set(task.spec, limit);
    const double h_geom = (0.3 * std::log2(10.0 / 3.0) + 0.7 * std::log2(10.0 / 7.0)) / 0.3;
    CHECK(optimal_score_bits(test) == doctest::Approx(h_geom).epsilon(1e-6));
    CHECK(optimal_score_bits(test) == doctest::Approx(2.94).epsilon(0.004));

    const auto dyck1 = get_task("dyck1");
    const auto dyck_test = enumerate_test_set(dyck1.spec, task_test_limit(dyck1, nullptr));
    CHECK(optimal_score_bits(dyck_test) == doctest::Approx(1.77).epsilon(0.006));

    Corpus bad;
    bad.sequences.push_back({tokens({"a"}), 1, 0});
    CHECK_THROWS(optimal_score_bits(bad));
}

TEST_CASE("optimal score grows toward entropy as the limit grows") {
    const auto task = get_task("dyck1");
    TestSetLimit limit;
    double prev = 0.0;
    for (int len = 2; len <= 12; len += 2) {
        limit.max_len = len;
        const double score = optimal_score_bits(enumerate_test_set(task.spec, limit));
        CHECK(score >= prev);
        prev = score;
    }
}

TEST_CASE("grammar predictor conditionals") {
    const auto task = get_task("dyck1");
    GrammarPredictor predictor(task.spec);
    auto dist = predictor.next_distribution();
    // alphabet order: [ ] then eos
    CHECK(dist[0] == make_rational(1, 3));
    CHECK(dist[1] == 0);
    CHECK(dist[2] == make_rational(2, 3));
    REQUIRE(predictor.consume("["));
    dist = predictor.next_distribution();
    CHECK(dist[0] == make_rational(1, 3));
    CHECK(dist[1] == make_rational(2, 3));
    CHECK(dist[2] == 0);
    CHECK(!predictor.consume("x"));
    CHECK(predictor.dead());
}

TEST_CASE("grammar text format round trip") {
    const auto g = get_task("toy_english").spec.pcfg;
    const auto text = grammar_to_text(*g);
    const auto parsed = parse_grammar_text(text);
    CHECK(grammar_to_text(parsed) == text);
    CHECK(parsed.start == "S");
    CHECK(parsed.terminals == g->terminals);

    CHECK_THROWS(parse_grammar_text("S -> a : 1/2\n"));  // probabilities don't sum to 1
    CHECK_THROWS(parse_grammar_text("S -> S : 1\n"));    // unproductive
}

TEST_CASE("corpus text format round trip, including empty strings") {
    const auto task = get_task("dyck1");
    auto corpus = enumerate_test_set(task.spec, task_test_limit(task, nullptr));
    const auto text = corpus_to_text(corpus);
    const auto parsed = parse_corpus_text(text);
    CHECK(parsed.role == CorpusRole::test);
    REQUIRE(parsed.sequences.size() == corpus.sequences.size());
    for (std::size_t i = 0; i < parsed.sequences.size(); ++i) {
        CHECK(parsed.sequences[i].tokens == corpus.sequences[i].tokens);
        CHECK(parsed.sequences[i].weight == corpus.sequences[i].weight);
        CHECK(parsed.sequences[i].true_prob == corpus.sequences[i].true_prob);
    }
}

TEST_CASE("max_parametric_n") {
    const auto task = get_task("anbn");
    Corpus corpus;
    corpus.sequences.push_back({tokens({"a", "b"}), 1, make_rational(3, 10)});
    corpus.sequences.push_back({tokens({"a", "a", "a", "b", "b", "b"}), 1, make_rational(1, 100)});
    CHECK(max_parametric_n(task.spec, corpus) == 3);
}
