#pragma once

#include <mpfr.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <utility>

#include "powexp/errors.hpp"

namespace powexp {

// RAII wrapper around mpfr_t. Precision is fixed at construction; arithmetic
// helpers take an explicit rounding mode so interval code can round outward.
class MpReal {
public:
    explicit MpReal(mpfr_prec_t prec = 96) {
        mpfr_init2(v_, prec);
        mpfr_set_nan(v_);
    }
    MpReal(const MpReal& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    MpReal(MpReal&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    MpReal& operator=(const MpReal& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    MpReal& operator=(MpReal&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }
    ~MpReal() { mpfr_clear(v_); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    static MpReal from_long(long x, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) {
        MpReal r(prec);
        mpfr_set_si(r.v_, x, rnd);
        return r;
    }
    static MpReal from_double(double x, mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) {
        MpReal r(prec);
        mpfr_set_d(r.v_, x, rnd);
        return r;
    }
    // num/den exact rational, rounded once in the requested direction.
    static MpReal from_ratio(long long num, long long den, mpfr_prec_t prec,
                             mpfr_rnd_t rnd = MPFR_RNDN) {
        MpReal r(prec);
        MpReal n(prec >= 64 ? prec : 64), d(prec >= 64 ? prec : 64);
        mpfr_set_sj(n.v_, num, MPFR_RNDN);  // exact: 64-bit ints fit
        mpfr_set_sj(d.v_, den, MPFR_RNDN);
        mpfr_div(r.v_, n.v_, d.v_, rnd);
        return r;
    }
    static MpReal from_str(const std::string& s, mpfr_prec_t prec,
                           mpfr_rnd_t rnd = MPFR_RNDN) {
        MpReal r(prec);
        if (mpfr_set_str(r.v_, s.c_str(), 10, rnd) != 0)
            throw Error("cannot parse number '" + s + "'");
        return r;
    }
    static MpReal e(mpfr_prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) {
        MpReal r(prec);
        MpReal one = from_long(1, prec);
        mpfr_exp(r.v_, one.v_, rnd);
        return r;
    }
    static MpReal zero(mpfr_prec_t prec) { return from_long(0, prec); }
    static MpReal pos_inf(mpfr_prec_t prec) {
        MpReal r(prec);
        mpfr_set_inf(r.v_, +1);
        return r;
    }
    static MpReal neg_inf(mpfr_prec_t prec) {
        MpReal r(prec);
        mpfr_set_inf(r.v_, -1);
        return r;
    }
    // Smallest positive representable value.
    static MpReal tiny(mpfr_prec_t prec) {
        MpReal r = zero(prec);
        mpfr_nextabove(r.v_);
        return r;
    }

    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_inf() const { return mpfr_inf_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    int cmp(const MpReal& o) const { return mpfr_cmp(v_, o.v_); }
    bool operator<(const MpReal& o) const { return cmp(o) < 0; }
    bool operator<=(const MpReal& o) const { return cmp(o) <= 0; }
    bool operator>(const MpReal& o) const { return cmp(o) > 0; }
    bool operator>=(const MpReal& o) const { return cmp(o) >= 0; }
    bool operator==(const MpReal& o) const { return cmp(o) == 0; }

    // Decimal string that round-trips exactly at this precision
    // (mpfr_get_str with n=0 guarantees read-back identity under RNDN).
    std::string str() const {
        if (mpfr_nan_p(v_)) return "nan";
        if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
        if (mpfr_zero_p(v_)) return "0";
        mpfr_exp_t exp = 0;
        char* digits = mpfr_get_str(nullptr, &exp, 10, 0, v_, MPFR_RNDN);
        std::string d(digits);
        mpfr_free_str(digits);
        std::string sign;
        if (d[0] == '-') {
            sign = "-";
            d.erase(0, 1);
        }
        // value = 0.d1d2... * 10^exp  ->  d1.d2...e(exp-1)
        std::string out = sign + d.substr(0, 1);
        if (d.size() > 1) out += "." + d.substr(1);
        out += "e" + std::to_string(static_cast<long long>(exp) - 1);
        return out;
    }

    static MpReal parse(const std::string& s, mpfr_prec_t prec) {
        if (s == "nan") return MpReal(prec);
        if (s == "inf") return pos_inf(prec);
        if (s == "-inf") return neg_inf(prec);
        return from_str(s, prec);
    }

private:
    mpfr_t v_;
};

inline MpReal mp_add(const MpReal& a, const MpReal& b, mpfr_rnd_t rnd) {
    MpReal r(std::max(a.prec(), b.prec()));
    mpfr_add(r.raw(), a.raw(), b.raw(), rnd);
    return r;
}
inline MpReal mp_sub(const MpReal& a, const MpReal& b, mpfr_rnd_t rnd) {
    MpReal r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.raw(), a.raw(), b.raw(), rnd);
    return r;
}
inline MpReal mp_mul(const MpReal& a, const MpReal& b, mpfr_rnd_t rnd) {
    MpReal r(std::max(a.prec(), b.prec()));
    mpfr_mul(r.raw(), a.raw(), b.raw(), rnd);
    return r;
}
inline MpReal mp_div(const MpReal& a, const MpReal& b, mpfr_rnd_t rnd) {
    MpReal r(std::max(a.prec(), b.prec()));
    mpfr_div(r.raw(), a.raw(), b.raw(), rnd);
    return r;
}
inline MpReal mp_neg(const MpReal& a) {
    MpReal r(a.prec());
    mpfr_neg(r.raw(), a.raw(), MPFR_RNDN);  // exact
    return r;
}

}  // namespace powexp
