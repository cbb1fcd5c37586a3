#pragma once

#include "bsdkit/exactarith.hpp"

namespace bsdkit {

struct shacheck_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BSDTerms {
    int r = 0;
    BigFloat lead;               // L^(r)(1) / r!
    BigFloat P;                  // real period
    BigFloat R = 1;              // regulator; <= 0 means not supplied
    std::map<std::uint64_t, Integer> c;
    Integer torsion = 1;
};

enum class ShaClass { square, twice_square, neither };

inline const char* to_string(ShaClass c)
{
    switch (c) {
    case ShaClass::square:
        return "square";
    case ShaClass::twice_square:
        return "twice_square";
    default:
        return "neither";
    }
}

struct ShaVerdict {
    BigFloat sha;
    Rational q;
    ShaClass cls = ShaClass::neither;
    BigFloat int_distance;       // |x - round(x)|
};

// |Sha|_an = lead * tors^2 / (P * R * prod c_p); J is self-dual so the
// torsion of the dual equals that of J.
inline BigFloat bsd_sha(const BSDTerms& t)
{
    if (t.r >= 1 && !(t.R > 0))
        throw shacheck_error("rank " + std::to_string(t.r) + " needs a regulator");
    if (!(t.P > 0) || !(t.lead > 0) || t.torsion < 1)
        throw shacheck_error("BSD terms must be positive");
    BigFloat R = t.r == 0 ? BigFloat(1) : t.R;
    Integer cprod = 1;
    for (auto& [p, c] : t.c) {
        if (c < 1)
            throw shacheck_error("Tamagawa number at " + std::to_string(p) + " must be positive");
        cprod *= c;
    }
    return t.lead * to_big(Integer(t.torsion * t.torsion)) / (t.P * R * to_big(cprod));
}

inline bool is_square(const Rational& q)
{
    return q >= 0 && is_square(Integer(mp::numerator(q) * mp::denominator(q)));
}

inline ShaClass classify(const Rational& q)
{
    if (q <= 0)
        return ShaClass::neither;
    if (is_square(q))
        return ShaClass::square;
    if (is_square(Integer(2 * mp::numerator(q) * mp::denominator(q))))
        return ShaClass::twice_square;
    return ShaClass::neither;
}

inline std::pair<bool, BigFloat> near_integer_check(const BigFloat& x, const BigFloat& eps)
{
    if (!(eps > 0))
        throw shacheck_error("near_integer_check: eps must be positive");
    BigFloat d = mp::abs(x - mp::round(x));
    return {d < eps, d};
}

inline ShaVerdict square_or_twice_square(const BigFloat& x, const BigFloat& tol = BigFloat("1e-6"),
                                         const Integer& max_den = 10000)
{
    if (!(x > 0))
        throw shacheck_error("square test needs a positive value");
    auto q = rational_reconstruct(x, max_den, tol);
    if (!q)
        throw shacheck_error("no rational with denominator <= " + max_den.str() + " within " + big_str(tol, 3) +
                             " of " + big_str(x, 15));
    ShaVerdict v;
    v.sha = x;
    v.q = *q;
    v.cls = classify(*q);
    v.int_distance = near_integer_check(x, BigFloat(1)).second;
    return v;
}

}  // namespace bsdkit
