#pragma once

// Test-only reference implementations, kept independent of the library's
// computation paths.

#include "mdlrnn/grammar.hpp"

#include <map>
#include <stdexcept>

namespace mdlrnn::oracles {

// Sums rule probabilities over every derivation of `s` by direct recursion
// on sentential forms, pruning branches that cannot fit the remaining
// suffix. Exponential; use on short strings only.
inline Rational brute_force_probability(const Pcfg& g, const TokenSeq& s) {
    std::map<Symbol, std::size_t> min_len;
    for (const auto& nt : g.nonterminals) {
        min_len[nt] = 1'000'000;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& rule : g.rules) {
            std::size_t total = 0;
            for (const auto& sym : rule.rhs) {
                const auto it = min_len.find(sym);
                total += it == min_len.end() ? 1 : it->second;
            }
            if (total < min_len[rule.lhs]) {
                min_len[rule.lhs] = total;
                changed = true;
            }
        }
    }
    auto form_min = [&](const TokenSeq& form) {
        std::size_t total = 0;
        for (const auto& sym : form) {
            const auto it = min_len.find(sym);
            total += it == min_len.end() ? 1 : it->second;
        }
        return total;
    };

    long long guard = 0;
    std::function<Rational(const TokenSeq&, std::size_t)> go = [&](const TokenSeq& form, std::size_t pos) -> Rational {
        if (++guard > 50'000'000) {
            throw std::runtime_error("brute force oracle: too many expansions");
        }
        if (pos + form_min(form) > s.size()) {
            return 0;
        }
        if (form.empty()) {
            return pos == s.size() ? Rational(1) : Rational(0);
        }
        const Symbol& head = form.front();
        if (!min_len.count(head) || !g.is_nonterminal(head)) {
            if (pos >= s.size() || s[pos] != head) {
                return 0;
            }
            return go(TokenSeq(form.begin() + 1, form.end()), pos + 1);
        }
        Rational total = 0;
        for (const auto& rule : g.rules) {
            if (rule.lhs != head) {
                continue;
            }
            TokenSeq next = rule.rhs;
            next.insert(next.end(), form.begin() + 1, form.end());
            total += rule.prob * go(next, pos);
        }
        return total;
    };
    return go({g.start}, 0);
}

}  // namespace mdlrnn::oracles
