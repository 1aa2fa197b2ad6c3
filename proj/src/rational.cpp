#include "mdlrnn/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdlrnn {

double to_double(const Rational& q) {
    return q.convert_to<double>();
}

double log2_rational(const Rational& q) {
    if (q <= 0) {
        throw std::runtime_error("log2_rational: non-positive argument");
    }
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    auto log2_big = [](const BigInt& n) {
        const std::size_t bits = boost::multiprecision::msb(n);  // floor(log2 n)
        // Scale into double range: n = m * 2^shift with m in [2^52, 2^53).
        if (bits <= 52) {
            return std::log2(n.convert_to<double>());
        }
        const std::size_t shift = bits - 52;
        const BigInt m = n >> shift;
        return std::log2(m.convert_to<double>()) + static_cast<double>(shift);
    };
    return log2_big(num) - log2_big(den);
}

std::string rational_to_string(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
    if (text.empty()) {
        throw std::runtime_error("parse_rational: empty string");
    }
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const BigInt num(text.substr(0, slash));
            const BigInt den(text.substr(slash + 1));
            if (den == 0) {
                throw std::runtime_error("parse_rational: zero denominator in '" + text + "'");
            }
            return Rational(num, den);
        }
        const auto dot = text.find('.');
        if (dot == std::string::npos) {
            return Rational(BigInt(text));
        }
        // Exact decimal: digits after the dot become a power-of-ten denominator.
        std::string head = text.substr(0, dot);
        std::string tail = text.substr(dot + 1);
        bool negative = false;
        if (!head.empty() && (head[0] == '-' || head[0] == '+')) {
            negative = head[0] == '-';
            head = head.substr(1);
        }
        if (tail.empty() && head.empty()) {
            throw std::runtime_error("parse_rational: malformed '" + text + "'");
        }
        BigInt den = 1;
        for (std::size_t i = 0; i < tail.size(); ++i) {
            den *= 10;
        }
        const BigInt num = BigInt(head.empty() ? "0" : head) * den + BigInt(tail.empty() ? "0" : tail);
        Rational q(num, den);
        return negative ? Rational(-q) : q;
    } catch (const std::runtime_error&) {
        throw;
    } catch (const std::exception&) {
        throw std::runtime_error("parse_rational: malformed '" + text + "'");
    }
}

Rational rational_from_double(double x, std::uint64_t max_den) {
    if (!std::isfinite(x)) {
        throw std::runtime_error("rational_from_double: non-finite value");
    }
    if (max_den == 0) {
        throw std::runtime_error("rational_from_double: max_den must be positive");
    }
    const bool negative = x < 0;
    double v = std::fabs(x);

    // Continued-fraction convergents p/q with q capped at max_den.
    BigInt p_prev = 1, q_prev = 0;  // h_{-1}, k_{-1}
    BigInt p = 0, q = 1;            // h_0 for a_0 handled in loop
    double frac = v;
    bool first = true;
    for (int iter = 0; iter < 64; ++iter) {
        const double a_floor = std::floor(frac);
        if (a_floor > 9.2e18) {
            break;
        }
        const BigInt a = static_cast<std::uint64_t>(a_floor);
        BigInt p_next = first ? a : a * p + p_prev;
        BigInt q_next = first ? BigInt(1) : a * q + q_prev;
        if (!first && q_next > max_den) {
            // Best semiconvergent still within the cap.
            const BigInt a_max = (BigInt(max_den) - q_prev) / q;
            if (a_max * 2 >= a) {
                const BigInt p_semi = a_max * p + p_prev;
                const BigInt q_semi = a_max * q + q_prev;
                if (q_semi >= 1) {
                    const double err_conv = std::fabs(to_double(Rational(p, q)) - v);
                    const double err_semi = std::fabs(to_double(Rational(p_semi, q_semi)) - v);
                    if (err_semi < err_conv) {
                        p = p_semi;
                        q = q_semi;
                    }
                }
            }
            break;
        }
        if (first) {
            p_prev = 1;
            q_prev = 0;
            p = p_next;
            q = q_next;
            first = false;
        } else {
            p_prev = std::exchange(p, p_next);
            q_prev = std::exchange(q, q_next);
        }
        const double rem = frac - a_floor;
        if (rem < 1e-15) {
            break;
        }
        frac = 1.0 / rem;
    }
    Rational result(p, q);
    return negative ? Rational(-result) : result;
}

}  // namespace mdlrnn
