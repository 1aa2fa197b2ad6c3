#include "mdlrnn/network.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mdlrnn {

namespace {

const std::map<std::string, Activation>& activation_table() {
    static const std::map<std::string, Activation> table = {
        {"linear", Activation::linear},   {"relu", Activation::relu},
        {"tanh", Activation::tanh},       {"sigmoid", Activation::sigmoid},
        {"step", Activation::unsigned_step},
        {"floor", Activation::floor},     {"mod3", Activation::mod3},
        {"mod4", Activation::mod4},       {"abs", Activation::abs},
    };
    return table;
}

}  // namespace

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::sigmoid: return "sigmoid";
        case Activation::unsigned_step: return "step";
        case Activation::floor: return "floor";
        case Activation::mod3: return "mod3";
        case Activation::mod4: return "mod4";
        case Activation::abs: return "abs";
    }
    return "?";
}

Activation activation_from_name(const std::string& name) {
    const auto it = activation_table().find(name);
    if (it == activation_table().end()) {
        throw std::runtime_error("unknown activation '" + name + "'");
    }
    return it->second;
}

bool activation_differentiable(Activation a) {
    switch (a) {
        case Activation::linear:
        case Activation::relu:
        case Activation::tanh:
        case Activation::sigmoid:
            return true;
        default:
            return false;
    }
}

const Unit* Network::find_unit(int id) const {
    for (const auto& unit : units) {
        if (unit.id == id) {
            return &unit;
        }
    }
    return nullptr;
}

std::size_t Network::hidden_count() const {
    return units.size() - input_count() - output_count();
}

int Network::fresh_hidden_id() const {
    int max_id = static_cast<int>(input_count() + output_count()) - 1;
    for (const auto& unit : units) {
        max_id = std::max(max_id, unit.id);
    }
    return max_id + 1;
}

bool Network::has_connection(int from, int to, ConnKind kind) const {
    for (const auto& conn : connections) {
        if (conn.from == from && conn.to == to && conn.kind == kind) {
            return true;
        }
    }
    return false;
}

std::vector<int> Network::canonical_ids() const {
    const int first_output = static_cast<int>(input_count());
    const int first_hidden = first_output + static_cast<int>(output_count());
    std::vector<int> inputs, hidden, outputs;
    for (const auto& unit : units) {
        if (unit.id < first_output) {
            inputs.push_back(unit.id);
        } else if (unit.id < first_hidden) {
            outputs.push_back(unit.id);
        } else {
            hidden.push_back(unit.id);
        }
    }
    std::sort(inputs.begin(), inputs.end());
    std::sort(hidden.begin(), hidden.end());
    std::sort(outputs.begin(), outputs.end());
    std::vector<int> order;
    order.reserve(units.size());
    order.insert(order.end(), inputs.begin(), inputs.end());
    order.insert(order.end(), hidden.begin(), hidden.end());
    order.insert(order.end(), outputs.begin(), outputs.end());
    return order;
}

void Network::validate(std::optional<std::size_t> max_units) const {
    if (alphabet.empty()) {
        throw std::runtime_error("network: empty alphabet");
    }
    {
        std::set<Symbol> seen;
        for (const auto& sym : alphabet) {
            if (!seen.insert(sym).second) {
                throw std::runtime_error("network: duplicate alphabet symbol '" + sym + "'");
            }
            if (sym == eos || sym == kStartMarker) {
                throw std::runtime_error("network: reserved symbol '" + sym + "' in alphabet");
            }
        }
    }
    const int in_count = static_cast<int>(input_count());
    const int out_count = static_cast<int>(output_count());
    std::set<int> ids;
    int inputs_seen = 0;
    int outputs_seen = 0;
    for (const auto& unit : units) {
        if (!ids.insert(unit.id).second) {
            throw std::runtime_error("network: duplicate unit id " + std::to_string(unit.id));
        }
        const UnitRole expected = unit.id < in_count                ? UnitRole::input
                                  : unit.id < in_count + out_count ? UnitRole::output
                                                                   : UnitRole::hidden;
        if (unit.role != expected) {
            throw std::runtime_error("network: unit " + std::to_string(unit.id) + " role does not match its id range");
        }
        if (unit.role == UnitRole::input) {
            ++inputs_seen;
            if (unit.activation != Activation::linear || unit.bias != 0 || unit.kind != UnitKind::summation) {
                throw std::runtime_error("network: input unit " + std::to_string(unit.id) + " must be a plain linear unit with zero bias");
            }
        } else if (unit.role == UnitRole::output) {
            ++outputs_seen;
        }
    }
    if (inputs_seen != in_count) {
        throw std::runtime_error("network: expected " + std::to_string(in_count) + " input units, found " + std::to_string(inputs_seen));
    }
    if (outputs_seen != out_count) {
        throw std::runtime_error("network: expected " + std::to_string(out_count) + " output units, found " + std::to_string(outputs_seen));
    }
    if (max_units && units.size() > *max_units) {
        throw std::runtime_error("network: unit count exceeds maximum");
    }

    std::set<std::tuple<int, int, int>> conn_keys;
    std::map<int, std::vector<int>> forward_out;
    std::map<int, int> forward_in_degree;
    for (const auto& conn : connections) {
        if (!ids.count(conn.from) || !ids.count(conn.to)) {
            throw std::runtime_error("network: connection references unknown unit");
        }
        if (conn.to < in_count) {
            throw std::runtime_error("network: input unit " + std::to_string(conn.to) + " has an incoming connection");
        }
        if (!conn_keys.insert({conn.from, conn.to, static_cast<int>(conn.kind)}).second) {
            throw std::runtime_error("network: duplicate connection " + std::to_string(conn.from) + "->" + std::to_string(conn.to));
        }
        if (conn.kind == ConnKind::forward) {
            forward_out[conn.from].push_back(conn.to);
            ++forward_in_degree[conn.to];
        }
    }

    // Kahn's algorithm over forward edges.
    std::vector<int> ready;
    for (const int id : ids) {
        if (forward_in_degree.find(id) == forward_in_degree.end()) {
            ready.push_back(id);
        }
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const int id = ready.back();
        ready.pop_back();
        ++visited;
        const auto it = forward_out.find(id);
        if (it == forward_out.end()) {
            continue;
        }
        for (const int to : it->second) {
            if (--forward_in_degree[to] == 0) {
                ready.push_back(to);
            }
        }
    }
    if (visited != ids.size()) {
        throw std::runtime_error("cycle in forward graph");
    }
}

bool operator==(const Unit& a, const Unit& b) {
    return a.id == b.id && a.kind == b.kind && a.activation == b.activation && a.bias == b.bias && a.role == b.role;
}

bool operator==(const Connection& a, const Connection& b) {
    return a.from == b.from && a.to == b.to && a.kind == b.kind && a.weight == b.weight;
}

bool operator==(const Network& a, const Network& b) {
    return network_to_text(a) == network_to_text(b);
}

Network make_network_shell(const std::vector<Symbol>& alphabet, const Symbol& eos, OutputTransform transform) {
    Network net;
    net.alphabet = alphabet;
    net.eos = eos;
    net.transform = transform;
    const int in_count = static_cast<int>(net.input_count());
    const int out_count = static_cast<int>(net.output_count());
    for (int i = 0; i < in_count; ++i) {
        net.units.push_back({i, UnitKind::summation, Activation::linear, 0, UnitRole::input});
    }
    for (int i = 0; i < out_count; ++i) {
        net.units.push_back({in_count + i, UnitKind::summation, Activation::linear, 0, UnitRole::output});
    }
    return net;
}

int add_hidden_unit(Network& net, UnitKind kind, Activation act, const Rational& bias) {
    const int id = net.fresh_hidden_id();
    net.units.push_back({id, kind, act, bias, UnitRole::hidden});
    return id;
}

void add_connection(Network& net, int from, int to, ConnKind kind, const Rational& weight) {
    net.connections.push_back({from, to, kind, weight});
}

int input_id(const Network& net, const Symbol& symbol) {
    if (symbol == kStartMarker) {
        return static_cast<int>(net.alphabet.size());
    }
    const auto it = std::find(net.alphabet.begin(), net.alphabet.end(), symbol);
    if (it == net.alphabet.end()) {
        throw std::runtime_error("unknown symbol '" + symbol + "'");
    }
    return static_cast<int>(it - net.alphabet.begin());
}

int output_id(const Network& net, const Symbol& symbol) {
    const int base = static_cast<int>(net.input_count());
    if (symbol == net.eos) {
        return base + static_cast<int>(net.alphabet.size());
    }
    const auto it = std::find(net.alphabet.begin(), net.alphabet.end(), symbol);
    if (it == net.alphabet.end()) {
        throw std::runtime_error("unknown symbol '" + symbol + "'");
    }
    return base + static_cast<int>(it - net.alphabet.begin());
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

namespace {

std::string unit_name(const Network& net, int id) {
    const int in_count = static_cast<int>(net.input_count());
    const int out_count = static_cast<int>(net.output_count());
    if (id < in_count) {
        return "in:" + (id == in_count - 1 ? std::string(kStartMarker) : net.alphabet[static_cast<std::size_t>(id)]);
    }
    if (id < in_count + out_count) {
        const int slot = id - in_count;
        return "out:" + (slot == out_count - 1 ? net.eos : net.alphabet[static_cast<std::size_t>(slot)]);
    }
    return "hid:" + std::to_string(id);
}

int unit_id_from_name(const Network& net, const std::string& name) {
    if (name.rfind("in:", 0) == 0) {
        return input_id(net, name.substr(3));
    }
    if (name.rfind("out:", 0) == 0) {
        return output_id(net, name.substr(4));
    }
    if (name.rfind("hid:", 0) == 0) {
        const int id = std::stoi(name.substr(4));
        if (id < static_cast<int>(net.input_count() + net.output_count())) {
            throw std::runtime_error("network parse: hidden id " + std::to_string(id) + " collides with input/output range");
        }
        return id;
    }
    throw std::runtime_error("network parse: bad unit name '" + name + "'");
}

}  // namespace

std::string network_to_text(const Network& net) {
    std::ostringstream out;
    out << "alphabet";
    for (const auto& sym : net.alphabet) {
        out << ' ' << sym;
    }
    out << '\n';
    out << "eos " << net.eos << '\n';
    out << "transform " << (net.transform == OutputTransform::softmax ? "softmax" : "normalize") << '\n';

    std::map<int, const Unit*> by_id;
    for (const auto& unit : net.units) {
        by_id[unit.id] = &unit;
    }
    for (const int id : net.canonical_ids()) {
        const Unit& unit = *by_id.at(id);
        out << "unit " << unit_name(net, id) << ' '
            << (unit.kind == UnitKind::summation ? "sum" : "mult") << ' '
            << activation_name(unit.activation) << ' '
            << rational_to_string(unit.bias) << '\n';
    }

    std::map<int, std::size_t> canon_pos;
    {
        const auto order = net.canonical_ids();
        for (std::size_t i = 0; i < order.size(); ++i) {
            canon_pos[order[i]] = i;
        }
    }
    auto sorted = net.connections;
    std::sort(sorted.begin(), sorted.end(), [&](const Connection& a, const Connection& b) {
        const auto ka = std::tuple(canon_pos.at(a.from), canon_pos.at(a.to), static_cast<int>(a.kind));
        const auto kb = std::tuple(canon_pos.at(b.from), canon_pos.at(b.to), static_cast<int>(b.kind));
        return ka < kb;
    });
    for (const auto& conn : sorted) {
        out << "conn " << unit_name(net, conn.from) << ' ' << unit_name(net, conn.to) << ' '
            << (conn.kind == ConnKind::forward ? "forward" : "recurrent") << ' '
            << rational_to_string(conn.weight) << '\n';
    }
    return out.str();
}

Network parse_network_text(const std::string& text) {
    Network net;
    bool have_alphabet = false;
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<Unit, std::string>> pending_units;   // unit (id unresolved), name
    std::vector<std::array<std::string, 4>> pending_conns;     // from, to, kind, weight

    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        std::istringstream fields(line);
        std::string head;
        if (!(fields >> head)) {
            continue;
        }
        if (head == "alphabet") {
            Symbol sym;
            while (fields >> sym) {
                net.alphabet.push_back(sym);
            }
            have_alphabet = true;
        } else if (head == "eos") {
            fields >> net.eos;
        } else if (head == "transform") {
            std::string t;
            fields >> t;
            if (t == "softmax") {
                net.transform = OutputTransform::softmax;
            } else if (t == "normalize") {
                net.transform = OutputTransform::normalize;
            } else {
                throw std::runtime_error("network parse: unknown transform '" + t + "'");
            }
        } else if (head == "unit") {
            std::string name, kind, act, bias;
            if (!(fields >> name >> kind >> act >> bias)) {
                throw std::runtime_error("network parse: malformed unit line '" + line + "'");
            }
            Unit unit;
            unit.kind = kind == "sum" ? UnitKind::summation
                        : kind == "mult" ? UnitKind::multiplication
                                         : throw std::runtime_error("network parse: unknown unit kind '" + kind + "'");
            unit.activation = activation_from_name(act);
            unit.bias = parse_rational(bias);
            pending_units.push_back({unit, name});
        } else if (head == "conn") {
            std::array<std::string, 4> parts;
            if (!(fields >> parts[0] >> parts[1] >> parts[2] >> parts[3])) {
                throw std::runtime_error("network parse: malformed conn line '" + line + "'");
            }
            pending_conns.push_back(parts);
        } else {
            throw std::runtime_error("network parse: unknown directive '" + head + "'");
        }
    }
    if (!have_alphabet) {
        throw std::runtime_error("network parse: missing alphabet header");
    }
    const int in_count = static_cast<int>(net.input_count());
    const int out_count = static_cast<int>(net.output_count());
    for (auto& [unit, name] : pending_units) {
        unit.id = unit_id_from_name(net, name);
        unit.role = unit.id < in_count                ? UnitRole::input
                    : unit.id < in_count + out_count ? UnitRole::output
                                                     : UnitRole::hidden;
        net.units.push_back(unit);
    }
    for (const auto& parts : pending_conns) {
        Connection conn;
        conn.from = unit_id_from_name(net, parts[0]);
        conn.to = unit_id_from_name(net, parts[1]);
        if (parts[2] == "forward") {
            conn.kind = ConnKind::forward;
        } else if (parts[2] == "recurrent") {
            conn.kind = ConnKind::recurrent;
        } else {
            throw std::runtime_error("network parse: unknown connection kind '" + parts[2] + "'");
        }
        conn.weight = parse_rational(parts[3]);
        net.connections.push_back(conn);
    }
    net.validate();
    return net;
}

void save_network_file(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write network file '" + path + "'");
    }
    out << network_to_text(net);
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open network file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_network_text(buffer.str());
}

}  // namespace mdlrnn
