#include "mdlrnn/mdl.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mdlrnn {

const char* reg_kind_name(RegKind kind) {
    switch (kind) {
        case RegKind::mdl: return "mdl";
        case RegKind::l1: return "l1";
        case RegKind::l2: return "l2";
        case RegKind::none: return "none";
        case RegKind::none_with_h_limit: return "none_h_limit";
    }
    return "?";
}

const char* reg_kind_label(RegKind kind) {
    switch (kind) {
        case RegKind::mdl: return "MDL (|H|)";
        case RegKind::l1: return "L1";
        case RegKind::l2: return "L2";
        case RegKind::none: return "None";
        case RegKind::none_with_h_limit: return "None (Lim. |H|)";
    }
    return "?";
}

RegKind reg_kind_from_name(const std::string& name) {
    if (name == "mdl") return RegKind::mdl;
    if (name == "l1") return RegKind::l1;
    if (name == "l2") return RegKind::l2;
    if (name == "none") return RegKind::none;
    if (name == "none_h_limit" || name == "none_with_h_limit") return RegKind::none_with_h_limit;
    throw std::runtime_error("unknown regularizer '" + name + "'");
}

void RegularizerSpec::validate() const {
    if (kind == RegKind::l1 || kind == RegKind::l2) {
        if (lambda < 0) {
            throw std::runtime_error("regularizer: lambda must be nonnegative");
        }
    }
    if (kind == RegKind::none_with_h_limit && !h_limit) {
        throw std::runtime_error("regularizer: none_with_h_limit requires an |H| ceiling");
    }
    if (kind != RegKind::none_with_h_limit && h_limit) {
        throw std::runtime_error("regularizer: h_limit only applies to none_with_h_limit");
    }
}

EncodingContext EncodingContext::for_palette(std::size_t palette_size) {
    EncodingContext ctx;
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < palette_size) {
        ++bits;
    }
    ctx.activation_bits = bits;
    return ctx;
}

namespace {

EncodingAudit encode_impl(const Network& net, const EncodingContext& ctx) {
    EncodingAudit audit;
    auto add = [&audit](const std::string& label, BitLength bits) {
        audit.parts.emplace_back(label, bits);
        audit.total += bits;
    };

    add("unit_count", encode_int_length(static_cast<std::uint64_t>(net.units.size())));

    const std::vector<int> order = net.canonical_ids();
    std::map<int, std::size_t> canon_pos;
    for (std::size_t i = 0; i < order.size(); ++i) {
        canon_pos[order[i]] = i;
    }
    std::map<int, const Unit*> by_id;
    for (const auto& unit : net.units) {
        by_id[unit.id] = &unit;
    }
    std::map<int, std::uint64_t> out_degree;
    for (const auto& conn : net.connections) {
        ++out_degree[conn.from];
    }

    for (const int id : order) {
        const Unit& unit = *by_id.at(id);
        const BitLength unit_bits = 1 /* kind */ + ctx.activation_bits + encode_fraction_length(unit.bias);
        add("unit:" + std::to_string(id), unit_bits);
        add("outdeg:" + std::to_string(id), encode_int_length(out_degree.count(id) ? out_degree[id] : 0));
    }

    auto sorted = net.connections;
    std::sort(sorted.begin(), sorted.end(), [&](const Connection& a, const Connection& b) {
        return std::tuple(canon_pos.at(a.from), canon_pos.at(a.to), static_cast<int>(a.kind)) <
               std::tuple(canon_pos.at(b.from), canon_pos.at(b.to), static_cast<int>(b.kind));
    });
    for (const auto& conn : sorted) {
        const BitLength conn_bits = encode_int_length(static_cast<std::uint64_t>(canon_pos.at(conn.from))) +
                                    encode_int_length(static_cast<std::uint64_t>(canon_pos.at(conn.to))) +
                                    1 /* forward/recurrent */ + encode_fraction_length(conn.weight);
        add("conn:" + std::to_string(conn.from) + "->" + std::to_string(conn.to), conn_bits);
    }
    return audit;
}

}  // namespace

BitLength encode_network(const Network& net, const EncodingContext& ctx) {
    return encode_impl(net, ctx).total;
}

EncodingAudit encode_network_audit(const Network& net, const EncodingContext& ctx) {
    return encode_impl(net, ctx);
}

double l1_term(const Network& net, double lambda) {
    double sum = 0.0;
    for (const auto& conn : net.connections) {
        sum += std::fabs(to_double(conn.weight));
    }
    for (const auto& unit : net.units) {
        sum += std::fabs(to_double(unit.bias));
    }
    return lambda * sum;
}

double l2_term(const Network& net, double lambda) {
    double sum = 0.0;
    for (const auto& conn : net.connections) {
        const double w = to_double(conn.weight);
        sum += w * w;
    }
    for (const auto& unit : net.units) {
        const double b = to_double(unit.bias);
        sum += b * b;
    }
    return lambda * sum;
}

double objective_value(const RegularizerSpec& reg, BitLength h_bits, double l1_lambda1, double l2_lambda1, double dh_train) {
    switch (reg.kind) {
        case RegKind::mdl:
            return static_cast<double>(h_bits) + dh_train;
        case RegKind::l1:
            return reg.lambda * l1_lambda1 + dh_train;
        case RegKind::l2:
            return reg.lambda * l2_lambda1 + dh_train;
        case RegKind::none:
        case RegKind::none_with_h_limit:
            return dh_train;
    }
    return dh_train;
}

bool h_limit_feasible(const RegularizerSpec& reg, BitLength h_bits) {
    if (reg.kind != RegKind::none_with_h_limit) {
        return true;
    }
    return h_bits <= *reg.h_limit;
}

}  // namespace mdlrnn
