#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

#include "powexp/errors.hpp"
#include "powexp/number.hpp"

namespace powexp {

// Rounding direction for endpoint computations.
enum class Dir { Down, Up };

// Backend over mpfr with exact directed rounding. `prec` is the working
// precision in bits for every derived endpoint.
struct mp_policy {
    using num = MpReal;
    static constexpr bool exact_directed = true;

    static mpfr_rnd_t rnd(Dir d) { return d == Dir::Down ? MPFR_RNDD : MPFR_RNDU; }

    static num add(const num& a, const num& b, Dir d, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_add(r.raw(), a.raw(), b.raw(), rnd(d));
        return r;
    }
    static num sub(const num& a, const num& b, Dir d, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_sub(r.raw(), a.raw(), b.raw(), rnd(d));
        return r;
    }
    static num mul(const num& a, const num& b, Dir d, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_mul(r.raw(), a.raw(), b.raw(), rnd(d));
        return r;
    }
    static num div(const num& a, const num& b, Dir d, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_div(r.raw(), a.raw(), b.raw(), rnd(d));
        return r;
    }
    static num exp(const num& a, Dir d, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_exp(r.raw(), a.raw(), rnd(d));
        return r;
    }
    static num log(const num& a, Dir d, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_log(r.raw(), a.raw(), rnd(d));
        return r;
    }
    static num sqrt(const num& a, Dir d, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_sqrt(r.raw(), a.raw(), rnd(d));
        return r;
    }
    static num pow(const num& a, const num& b, Dir d, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_pow(r.raw(), a.raw(), b.raw(), rnd(d));
        return r;
    }
    static num pow_int(const num& a, long n, Dir d, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_pow_si(r.raw(), a.raw(), n, rnd(d));
        return r;
    }
    static num neg(const num& a, long /*prec*/) { return mp_neg(a); }
    static num from_long(long v, long prec) { return num::from_long(v, (mpfr_prec_t)prec); }
    static num from_ratio(long long n, long long dn, Dir d, long prec) {
        return num::from_ratio(n, dn, (mpfr_prec_t)prec, rnd(d));
    }
    static num const_e(Dir d, long prec) { return num::e((mpfr_prec_t)prec, rnd(d)); }
    static num pos_inf(long prec) { return num::pos_inf((mpfr_prec_t)prec); }
    static num neg_inf(long prec) { return num::neg_inf((mpfr_prec_t)prec); }
    static num tiny(long prec) { return num::tiny((mpfr_prec_t)prec); }
    static num mid(const num& a, const num& b, long prec) {
        num r((mpfr_prec_t)prec);
        mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
        mpfr_div_2ui(r.raw(), r.raw(), 1, MPFR_RNDN);
        return r;
    }
    static bool is_nan(const num& a) { return a.is_nan(); }
    static bool lt(const num& a, const num& b) { return a < b; }
    static bool le(const num& a, const num& b) { return a <= b; }
    static bool eq_zero(const num& a) { return a.is_zero(); }
    static int sign(const num& a) { return a.sign(); }
    static double to_double(const num& a) { return a.to_double(); }
    static std::string str(const num& a) { return a.str(); }
    static num parse(const std::string& s, long prec) {
        return num::parse(s, (mpfr_prec_t)prec);
    }
};

// Fast backend over hardware doubles. Arithmetic is computed round-to-nearest
// and the result is widened by `steps` ulps in the requested direction; libm
// calls get a larger safety margin since they are not correctly rounded.
struct d_policy {
    using num = double;
    static constexpr bool exact_directed = false;

    static num bump(num r, Dir d, int steps) {
        if (!std::isfinite(r)) return r;
        num inf = d == Dir::Down ? -std::numeric_limits<num>::infinity()
                                 : std::numeric_limits<num>::infinity();
        for (int i = 0; i < steps; ++i) r = std::nextafter(r, inf);
        return r;
    }
    static num add(num a, num b, Dir d, long) { return bump(a + b, d, 1); }
    static num sub(num a, num b, Dir d, long) { return bump(a - b, d, 1); }
    static num mul(num a, num b, Dir d, long) { return bump(a * b, d, 1); }
    static num div(num a, num b, Dir d, long) { return bump(a / b, d, 1); }
    static num exp(num a, Dir d, long) { return bump(std::exp(a), d, 8); }
    static num log(num a, Dir d, long) { return bump(std::log(a), d, 8); }
    static num sqrt(num a, Dir d, long) { return bump(std::sqrt(a), d, 1); }
    static num pow(num a, num b, Dir d, long) { return bump(std::pow(a, b), d, 8); }
    static num pow_int(num a, long n, Dir d, long) {
        return bump(std::pow(a, (num)n), d, 8);
    }
    static num neg(num a, long) { return -a; }
    static num from_long(long v, long) { return (num)v; }
    static num from_ratio(long long n, long long dn, Dir d, long) {
        return bump((num)n / (num)dn, d, 1);
    }
    static num const_e(Dir d, long) {
        return bump(2.718281828459045235360287471352662498, d, 1);
    }
    static num pos_inf(long) { return std::numeric_limits<num>::infinity(); }
    static num neg_inf(long) { return -std::numeric_limits<num>::infinity(); }
    static num tiny(long) { return DBL_TRUE_MIN; }
    static num mid(num a, num b, long) {
        num m = a + (b - a) / 2;
        if (!(m >= a && m <= b)) m = a;  // overflow guard
        return m;
    }
    static bool is_nan(num a) { return std::isnan(a); }
    static bool lt(num a, num b) { return a < b; }
    static bool le(num a, num b) { return a <= b; }
    static bool eq_zero(num a) { return a == 0.0; }
    static int sign(num a) { return a > 0 ? 1 : (a < 0 ? -1 : 0); }
    static double to_double(num a) { return a; }
    static std::string str(num a) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", a);
        return buf;
    }
    static num parse(const std::string& s, long) {
        if (s == "inf") return pos_inf(0);
        if (s == "-inf") return neg_inf(0);
        return std::stod(s);
    }
};

// Closed interval [lo, hi]; the empty interval is a distinct sentinel.
template <class P>
struct Ival {
    using num = typename P::num;
    num lo, hi;
    bool empty = false;

    Ival() : lo(), hi(), empty(true) {}
    Ival(num l, num h) : lo(std::move(l)), hi(std::move(h)) {}
    static Ival make_empty() { return Ival(); }
    static Ival point(num v) { return Ival(v, v); }

    bool contains(const num& x) const {
        return !empty && P::le(lo, x) && P::le(x, hi);
    }
    bool subset_of(const Ival& o) const {
        if (empty) return true;
        if (o.empty) return false;
        return P::le(o.lo, lo) && P::le(hi, o.hi);
    }
};

using IvMp = Ival<mp_policy>;
using IvD = Ival<d_policy>;

template <class P>
Ival<P> iv_hull(const Ival<P>& a, const Ival<P>& b) {
    if (a.empty) return b;
    if (b.empty) return a;
    return Ival<P>(P::lt(a.lo, b.lo) ? a.lo : b.lo, P::lt(a.hi, b.hi) ? b.hi : a.hi);
}

template <class P>
Ival<P> iv_add(const Ival<P>& a, const Ival<P>& b, long prec) {
    if (a.empty || b.empty) return Ival<P>::make_empty();
    return Ival<P>(P::add(a.lo, b.lo, Dir::Down, prec), P::add(a.hi, b.hi, Dir::Up, prec));
}

template <class P>
Ival<P> iv_sub(const Ival<P>& a, const Ival<P>& b, long prec) {
    if (a.empty || b.empty) return Ival<P>::make_empty();
    return Ival<P>(P::sub(a.lo, b.hi, Dir::Down, prec), P::sub(a.hi, b.lo, Dir::Up, prec));
}

template <class P>
Ival<P> iv_neg(const Ival<P>& a, long prec) {
    if (a.empty) return a;
    return Ival<P>(P::neg(a.hi, prec), P::neg(a.lo, prec));
}

template <class P>
Ival<P> iv_mul(const Ival<P>& a, const Ival<P>& b, long prec) {
    if (a.empty || b.empty) return Ival<P>::make_empty();
    typename P::num cand;
    typename P::num lo = P::mul(a.lo, b.lo, Dir::Down, prec);
    cand = P::mul(a.lo, b.hi, Dir::Down, prec);
    if (P::lt(cand, lo)) lo = cand;
    cand = P::mul(a.hi, b.lo, Dir::Down, prec);
    if (P::lt(cand, lo)) lo = cand;
    cand = P::mul(a.hi, b.hi, Dir::Down, prec);
    if (P::lt(cand, lo)) lo = cand;
    typename P::num hi = P::mul(a.lo, b.lo, Dir::Up, prec);
    cand = P::mul(a.lo, b.hi, Dir::Up, prec);
    if (P::lt(hi, cand)) hi = cand;
    cand = P::mul(a.hi, b.lo, Dir::Up, prec);
    if (P::lt(hi, cand)) hi = cand;
    cand = P::mul(a.hi, b.hi, Dir::Up, prec);
    if (P::lt(hi, cand)) hi = cand;
    return Ival<P>(std::move(lo), std::move(hi));
}

// Tighter than iv_mul for squares: result is nonnegative.
template <class P>
Ival<P> iv_sqr(const Ival<P>& a, long prec) {
    if (a.empty) return a;
    typename P::num zero = P::from_long(0, prec);
    if (P::sign(a.lo) >= 0)
        return Ival<P>(P::mul(a.lo, a.lo, Dir::Down, prec), P::mul(a.hi, a.hi, Dir::Up, prec));
    if (P::sign(a.hi) <= 0)
        return Ival<P>(P::mul(a.hi, a.hi, Dir::Down, prec), P::mul(a.lo, a.lo, Dir::Up, prec));
    typename P::num u1 = P::mul(a.lo, a.lo, Dir::Up, prec);
    typename P::num u2 = P::mul(a.hi, a.hi, Dir::Up, prec);
    return Ival<P>(std::move(zero), P::lt(u1, u2) ? u2 : u1);
}

template <class P>
Ival<P> iv_div(const Ival<P>& a, const Ival<P>& b, long prec) {
    if (a.empty || b.empty) return Ival<P>::make_empty();
    if (P::sign(b.lo) <= 0 && P::sign(b.hi) >= 0)
        throw DomainError("division by interval containing zero");
    typename P::num cand;
    typename P::num lo = P::div(a.lo, b.lo, Dir::Down, prec);
    cand = P::div(a.lo, b.hi, Dir::Down, prec);
    if (P::lt(cand, lo)) lo = cand;
    cand = P::div(a.hi, b.lo, Dir::Down, prec);
    if (P::lt(cand, lo)) lo = cand;
    cand = P::div(a.hi, b.hi, Dir::Down, prec);
    if (P::lt(cand, lo)) lo = cand;
    typename P::num hi = P::div(a.lo, b.lo, Dir::Up, prec);
    cand = P::div(a.lo, b.hi, Dir::Up, prec);
    if (P::lt(hi, cand)) hi = cand;
    cand = P::div(a.hi, b.lo, Dir::Up, prec);
    if (P::lt(hi, cand)) hi = cand;
    cand = P::div(a.hi, b.hi, Dir::Up, prec);
    if (P::lt(hi, cand)) hi = cand;
    return Ival<P>(std::move(lo), std::move(hi));
}

template <class P>
Ival<P> iv_exp(const Ival<P>& a, long prec) {
    if (a.empty) return a;
    return Ival<P>(P::exp(a.lo, Dir::Down, prec), P::exp(a.hi, Dir::Up, prec));
}

template <class P>
Ival<P> iv_ln(const Ival<P>& a, long prec) {
    if (a.empty) return a;
    if (P::sign(a.hi) <= 0) throw DomainError("ln of nonpositive interval");
    if (P::sign(a.lo) <= 0)
        return Ival<P>(P::neg_inf(prec), P::log(a.hi, Dir::Up, prec));
    return Ival<P>(P::log(a.lo, Dir::Down, prec), P::log(a.hi, Dir::Up, prec));
}

template <class P>
Ival<P> iv_sqrt(const Ival<P>& a, long prec) {
    if (a.empty) return a;
    if (P::sign(a.lo) < 0) throw DomainError("sqrt of negative interval");
    return Ival<P>(P::sqrt(a.lo, Dir::Down, prec), P::sqrt(a.hi, Dir::Up, prec));
}

namespace detail {

// x^n for integer n; handles negative bases (even/odd symmetry).
template <class P>
Ival<P> iv_pow_int(const Ival<P>& a, long n, long prec) {
    if (a.empty) return a;
    if (n == 0) return Ival<P>(P::from_long(1, prec), P::from_long(1, prec));
    if (n < 0) {
        Ival<P> p = detail::iv_pow_int<P>(a, -n, prec);
        Ival<P> one(P::from_long(1, prec), P::from_long(1, prec));
        return iv_div(one, p, prec);
    }
    if (n % 2 == 0 && P::sign(a.lo) < 0 && P::sign(a.hi) > 0) {
        // straddles zero with an even exponent: [0, max(|lo|,|hi|)^n]
        typename P::num u1 = P::pow_int(a.lo, n, Dir::Up, prec);
        typename P::num u2 = P::pow_int(a.hi, n, Dir::Up, prec);
        return Ival<P>(P::from_long(0, prec), P::lt(u1, u2) ? u2 : u1);
    }
    typename P::num c1 = P::pow_int(a.lo, n, Dir::Down, prec);
    typename P::num c2 = P::pow_int(a.hi, n, Dir::Down, prec);
    typename P::num lo = P::lt(c1, c2) ? c1 : c2;
    typename P::num u1 = P::pow_int(a.lo, n, Dir::Up, prec);
    typename P::num u2 = P::pow_int(a.hi, n, Dir::Up, prec);
    typename P::num hi = P::lt(u1, u2) ? u2 : u1;
    return Ival<P>(std::move(lo), std::move(hi));
}

// One endpoint candidate of x^y with x >= 0; the zero-base cases follow the
// 0-power convention (0^0 = 1, 0^y = 0 for y > 0).
template <class P>
typename P::num pow_corner(const typename P::num& x, const typename P::num& y, Dir d,
                           long prec) {
    if (P::eq_zero(x)) {
        if (P::sign(y) > 0) return P::from_long(0, prec);
        if (P::eq_zero(y)) return P::from_long(1, prec);
        throw DomainError("0 raised to a negative power");
    }
    return P::pow(x, y, d, prec);
}

// x^y over x in [xl, xh], 0 < xl: for fixed x the map is monotone in y and
// for fixed y monotone in x, so the range is attained at the four corners.
template <class P>
Ival<P> pow_pos(const typename P::num& xl, const typename P::num& xh, const Ival<P>& y,
                long prec) {
    const typename P::num* xs[2] = {&xl, &xh};
    const typename P::num* ys[2] = {&y.lo, &y.hi};
    typename P::num lo = P::pow(xl, y.lo, Dir::Down, prec);
    typename P::num hi = P::pow(xl, y.lo, Dir::Up, prec);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            if (i == 0 && j == 0) continue;
            typename P::num c = P::pow(*xs[i], *ys[j], Dir::Down, prec);
            if (P::lt(c, lo)) lo = c;
            c = P::pow(*xs[i], *ys[j], Dir::Up, prec);
            if (P::lt(hi, c)) hi = c;
        }
    return Ival<P>(std::move(lo), std::move(hi));
}

}  // namespace detail

// x^y for x.lo >= 0. Boxes with x.lo == 0 combine the 0-power values with
// the positive part evaluated from the smallest positive representable.
template <class P>
Ival<P> iv_pow(const Ival<P>& x, const Ival<P>& y, long prec) {
    if (x.empty || y.empty) return Ival<P>::make_empty();
    if (P::sign(x.lo) < 0) throw DomainError("power with negative base interval");
    if (P::sign(x.lo) > 0) return detail::pow_pos<P>(x.lo, x.hi, y, prec);
    if (P::sign(y.lo) < 0) throw DomainError("0 raised to a negative power");
    // values contributed at x = 0
    Ival<P> z = P::eq_zero(y.hi)
                    ? Ival<P>::point(P::from_long(1, prec))
                    : (P::eq_zero(y.lo)
                           ? Ival<P>(P::from_long(0, prec), P::from_long(1, prec))
                           : Ival<P>::point(P::from_long(0, prec)));
    if (P::sign(x.hi) == 0) return z;
    typename P::num t = P::tiny(prec);
    return iv_hull(z, detail::pow_pos<P>(t, x.hi, y, prec));
}

template <class P>
Ival<P> iv_pow_int(const Ival<P>& x, long n, long prec) {
    return detail::iv_pow_int(x, n, prec);
}

template <class P>
typename P::num iv_width(const Ival<P>& a, long prec) {
    if (a.empty) return P::from_long(0, prec);
    return P::sub(a.hi, a.lo, Dir::Up, prec);
}

template <class P>
typename P::num iv_mid(const Ival<P>& a, long prec) {
    return P::mid(a.lo, a.hi, prec);
}

// Magnitude: max(|lo|, |hi|), rounded up.
template <class P>
typename P::num iv_mag(const Ival<P>& a, long prec) {
    typename P::num al = P::neg(a.lo, prec);
    if (P::lt(al, a.hi)) al = a.hi;
    if (P::sign(al) < 0) return P::from_long(0, prec);
    return al;
}

template <class P>
std::string iv_str(const Ival<P>& a) {
    if (a.empty) return "[empty]";
    return "[" + P::str(a.lo) + ", " + P::str(a.hi) + "]";
}

}  // namespace powexp
