#pragma once

#include "mdlrnn/bitcode.hpp"
#include "mdlrnn/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdlrnn {

enum class RegKind { mdl, l1, l2, none, none_with_h_limit };

const char* reg_kind_name(RegKind kind);        // config token: mdl | l1 | l2 | none | none_h_limit
const char* reg_kind_label(RegKind kind);       // table label: "MDL (|H|)", "L1", ...
RegKind reg_kind_from_name(const std::string&);

struct RegularizerSpec {
    RegKind kind = RegKind::mdl;
    double lambda = 1.0;                  // l1 / l2 only
    std::optional<BitLength> h_limit;     // none_with_h_limit only
    void validate() const;
};

// Encoding layout parameters. The activation code width is ceil(log2 A) for a
// task palette of A allowed activations.
struct EncodingContext {
    unsigned activation_bits = 2;

    static EncodingContext for_palette(std::size_t palette_size);
};

// |H|: unit count, then per unit kind (1 bit) + activation + bias fraction +
// out-degree, then per connection from/to indices in canonical order, a
// kind bit, and the weight fraction.
BitLength encode_network(const Network& net, const EncodingContext& ctx);

// Full bit layout per network part, for audits.
struct EncodingAudit {
    BitLength total = 0;
    std::vector<std::pair<std::string, BitLength>> parts;
};
EncodingAudit encode_network_audit(const Network& net, const EncodingContext& ctx);

// lambda * sum of |w| (or w^2) over all connection weights and unit biases.
double l1_term(const Network& net, double lambda);
double l2_term(const Network& net, double lambda);

// Regularized objective given precomputed ingredients; mdl -> h + dh,
// l1/l2 -> lambda*term + dh, none / none_with_h_limit -> dh.
double objective_value(const RegularizerSpec& reg, BitLength h_bits, double l1_lambda1, double l2_lambda1, double dh_train);

// Feasibility under an |H| ceiling; always true for other regularizers.
bool h_limit_feasible(const RegularizerSpec& reg, BitLength h_bits);

}  // namespace mdlrnn
