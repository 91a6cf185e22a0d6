#include "lame/rational.hpp"

#include <stdexcept>

namespace lame {

std::string to_fraction_string(const rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

rational rational_from_string(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    mpq_class out;
    if (out.set_str(std::string(s), 10) != 0)
        throw std::invalid_argument("malformed rational literal: " + std::string(s));
    out.canonicalize();
    if (out.get_den() == 0)
        throw std::invalid_argument("zero denominator in rational literal: " + std::string(s));
    return out;
}

rational rational_pow(const rational& base, unsigned exp) {
    rational acc(1);
    rational b = base;
    unsigned e = exp;
    while (e) {
        if (e & 1u) acc *= b;
        b *= b;
        e >>= 1u;
    }
    return acc;
}

mpz_class factorial(unsigned n) {
    mpz_class out;
    mpz_fac_ui(out.get_mpz_t(), n);
    return out;
}

}
