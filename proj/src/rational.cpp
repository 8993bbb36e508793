#include "ghzlab/rational.hpp"

#include "ghzlab/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace ghzlab {

std::string rat_to_string(const Rat& r) {
    return r.str();
}

Rat rat_from_string(const std::string& s) {
    if (s.empty()) {
        throw ValidationError("empty rational literal");
    }
    auto is_int = [](const std::string& t) {
        if (t.empty()) {
            return false;
        }
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) {
            return false;
        }
        for (; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) {
                return false;
            }
        }
        return true;
    };
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (!is_int(s)) {
            throw ValidationError("bad rational literal: '" + s + "'");
        }
        return Rat(BigInt(s));
    }
    const std::string num = s.substr(0, slash);
    const std::string den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) {
        throw ValidationError("bad rational literal: '" + s + "'");
    }
    BigInt d(den);
    if (d == 0) {
        throw ValidationError("zero denominator in rational literal: '" + s + "'");
    }
    return Rat(BigInt(num), d);
}

double rat_to_double(const Rat& r) {
    return r.convert_to<double>();
}

Rat rat_snap(double x, std::int64_t max_den) {
    if (!std::isfinite(x)) {
        throw ValidationError("cannot snap non-finite value to a rational");
    }
    const bool neg = x < 0;
    double v = std::fabs(x);

    // Convergents p/q of the continued fraction of v. Stop once the next
    // denominator would exceed max_den or the expansion terminates.
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double a = v;
    for (int iter = 0; iter < 64; ++iter) {
        const double fa = std::floor(a);
        if (fa > 9.2e18) {
            break;
        }
        const auto ai = static_cast<std::int64_t>(fa);
        if (q1 > 0 && ai > (max_den - q0) / q1) {
            break; // next convergent denominator would exceed max_den
        }
        const std::int64_t p2 = ai * p1 + p0;
        const std::int64_t q2 = ai * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double frac = a - fa;
        if (frac < 1e-15 * std::max(1.0, std::fabs(a))) {
            break;
        }
        a = 1.0 / frac;
    }
    if (q1 == 0) {
        return Rat(0);
    }
    Rat r(p1, q1);
    return neg ? Rat(-r) : r;
}

} // namespace ghzlab
