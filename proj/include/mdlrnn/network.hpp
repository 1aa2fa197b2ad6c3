#pragma once

#include "mdlrnn/grammar.hpp"
#include "mdlrnn/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdlrnn {

enum class Activation {
    linear,
    relu,
    tanh,
    sigmoid,
    unsigned_step,  // 1 if x > 0 else 0
    floor,
    mod3,  // x - 3*floor(x/3)
    mod4,
    abs,
};

enum class UnitKind { summation, multiplication };
enum class UnitRole { input, hidden, output };
enum class ConnKind { forward, recurrent };
enum class OutputTransform { softmax, normalize };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);
bool activation_differentiable(Activation a);

// Free-form recurrent network. Unit ids double as canonical addresses:
// inputs are 0..I-1 (alphabet order, then the start marker), outputs are
// I..I+O-1 (alphabet order, then eos), hidden units are any id >= I+O.
struct Unit {
    int id = 0;
    UnitKind kind = UnitKind::summation;
    Activation activation = Activation::linear;
    Rational bias = 0;
    UnitRole role = UnitRole::hidden;
};

struct Connection {
    int from = 0;
    int to = 0;
    ConnKind kind = ConnKind::forward;
    Rational weight = 0;
};

struct Network {
    std::vector<Symbol> alphabet;
    Symbol eos = "<eos>";
    OutputTransform transform = OutputTransform::softmax;
    std::vector<Unit> units;
    std::vector<Connection> connections;

    std::size_t input_count() const { return alphabet.size() + 1; }   // + start marker
    std::size_t output_count() const { return alphabet.size() + 1; }  // + eos

    const Unit* find_unit(int id) const;
    std::size_t hidden_count() const;
    int fresh_hidden_id() const;
    bool has_connection(int from, int to, ConnKind kind) const;

    // Unit ids in canonical order: inputs, hidden ascending by id, outputs.
    std::vector<int> canonical_ids() const;

    // Throws on any structural invariant violation, including
    // "cycle in forward graph" when forward edges are not a DAG.
    void validate(std::optional<std::size_t> max_units = std::nullopt) const;
};

bool operator==(const Unit& a, const Unit& b);
bool operator==(const Connection& a, const Connection& b);
// Structural equality on the canonical serialization.
bool operator==(const Network& a, const Network& b);

// Fresh network with input and output units only (no hidden, no connections).
Network make_network_shell(const std::vector<Symbol>& alphabet, const Symbol& eos, OutputTransform transform);

// Convenience builders used by golden constructions and tests.
int add_hidden_unit(Network& net, UnitKind kind, Activation act, const Rational& bias);
void add_connection(Network& net, int from, int to, ConnKind kind, const Rational& weight);
int input_id(const Network& net, const Symbol& symbol);  // symbol or "<start>"
int output_id(const Network& net, const Symbol& symbol);  // symbol or eos

// Human-diffable text format: header (alphabet, eos, transform), one line per
// unit, one line per connection, in canonical order.
std::string network_to_text(const Network& net);
Network parse_network_text(const std::string& text);
void save_network_file(const Network& net, const std::string& path);
Network load_network_file(const std::string& path);

inline constexpr const char* kStartMarker = "<start>";

}  // namespace mdlrnn
