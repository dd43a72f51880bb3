#pragma once

#include <unordered_map>
#include <vector>

#include "powexp/expr.hpp"
#include "powexp/interval.hpp"

namespace powexp {

// Flat SSA form of an expression DAG: each instruction writes one slot, and
// shared subexpressions are computed once. Specialized opcodes keep interval
// evaluation tight (integer powers handle negative bases, exp/sqrt avoid the
// generic corner-based power).
enum class TOp : uint8_t {
    Const,   // num/den
    E,       //
    Var,     // arg0 = variable index
    Add, Sub, Mul, Div,   // arg0, arg1 = slots
    Ln, Exp, Sqrt,        // arg0 = slot
    PowInt,  // arg0 = slot, inum = exponent
    Pow,     // arg0, arg1 = slots
};

struct TInstr {
    TOp op;
    uint32_t arg0 = 0, arg1 = 0;
    long long num = 0, den = 1;  // Const payload or PowInt exponent in num
    Expr src;                    // originating subexpression, for diagnostics
};

struct Tape {
    std::vector<TInstr> code;
    std::vector<std::string> vars;  // slot order for inputs

    size_t size() const { return code.size(); }
};

inline Tape compile(const Expr& f, const std::vector<std::string>& vars) {
    Tape t;
    t.vars = vars;
    std::unordered_map<std::string, uint32_t> vidx;
    for (uint32_t i = 0; i < vars.size(); ++i) vidx[vars[i]] = i;
    std::unordered_map<uint64_t, uint32_t> slot;

    auto emit = [&](TInstr in) {
        t.code.push_back(std::move(in));
        return (uint32_t)(t.code.size() - 1);
    };

    // explicit stack to avoid deep recursion
    struct Frame {
        Expr e;
        int stage = 0;
        uint32_t s0 = 0, s1 = 0;
    };
    std::vector<Frame> st;
    st.push_back({f});
    uint32_t result = 0;
    while (!st.empty()) {
        Frame& fr = st.back();
        const Expr& e = fr.e;
        auto it = slot.find(e->id);
        if (it != slot.end()) {
            result = it->second;
            st.pop_back();
            continue;
        }
        bool leaf = e->op == Op::Const || e->op == Op::E || e->op == Op::Var;
        if (leaf) {
            TInstr in;
            in.src = e;
            if (e->op == Op::Const) {
                in.op = TOp::Const;
                in.num = e->num;
                in.den = e->den;
            } else if (e->op == Op::E) {
                in.op = TOp::E;
            } else {
                auto vit = vidx.find(e->name);
                if (vit == vidx.end()) throw Error("unbound variable '" + e->name + "'");
                in.op = TOp::Var;
                in.arg0 = vit->second;
            }
            result = emit(std::move(in));
            slot[e->id] = result;
            st.pop_back();
            continue;
        }
        if (fr.stage == 0) {
            fr.stage = 1;
            st.push_back({e->a});
            continue;
        }
        if (fr.stage == 1) {
            fr.s0 = result;
            fr.stage = 2;
            if (e->b && !(e->op == Op::Pow &&
                          (e->a->op == Op::E ||
                           (e->b->op == Op::Const && e->b->den == 1) ||
                           (e->b->op == Op::Const && e->b->num == 1 && e->b->den == 2)))) {
                st.push_back({e->b});
                continue;
            }
            if (e->op == Op::Pow && e->a->op == Op::E) {
                // exp(w): evaluate the exponent instead of the base
                Expr keep = e;  // copy before the frame is destroyed
                st.pop_back();
                st.push_back({keep, 3, 0, 0});
                st.push_back({keep->b});
                continue;
            }
        }
        TInstr in;
        in.src = e;
        switch (e->op) {
            case Op::Add: in.op = TOp::Add; break;
            case Op::Sub: in.op = TOp::Sub; break;
            case Op::Mul: in.op = TOp::Mul; break;
            case Op::Div: in.op = TOp::Div; break;
            case Op::Ln:
                in.op = TOp::Ln;
                in.arg0 = fr.s0;
                result = emit(std::move(in));
                slot[e->id] = result;
                st.pop_back();
                continue;
            case Op::Pow:
                if (fr.stage == 3) {  // exp(w); `result` holds w's slot
                    in.op = TOp::Exp;
                    in.arg0 = result;
                    result = emit(std::move(in));
                    slot[e->id] = result;
                    st.pop_back();
                    continue;
                }
                if (e->b->op == Op::Const && e->b->den == 1) {
                    in.op = TOp::PowInt;
                    in.arg0 = fr.s0;
                    in.num = e->b->num;
                    result = emit(std::move(in));
                    slot[e->id] = result;
                    st.pop_back();
                    continue;
                }
                if (e->b->op == Op::Const && e->b->num == 1 && e->b->den == 2) {
                    in.op = TOp::Sqrt;
                    in.arg0 = fr.s0;
                    result = emit(std::move(in));
                    slot[e->id] = result;
                    st.pop_back();
                    continue;
                }
                in.op = TOp::Pow;
                break;
            default:
                throw Error("unexpected node in tape compile");
        }
        in.arg0 = fr.s0;
        in.arg1 = result;
        result = emit(std::move(in));
        slot[e->id] = result;
        st.pop_back();
    }
    return t;
}

// Interval evaluation over either backend. DomainErrors are re-thrown with
// the offending subterm attached.
template <class P>
Ival<P> eval_interval(const Tape& t, const std::vector<Ival<P>>& box, long prec) {
    std::vector<Ival<P>> s(t.code.size());
    for (size_t i = 0; i < t.code.size(); ++i) {
        const TInstr& in = t.code[i];
        try {
            switch (in.op) {
                case TOp::Const:
                    s[i] = Ival<P>(P::from_ratio(in.num, in.den, Dir::Down, prec),
                                   P::from_ratio(in.num, in.den, Dir::Up, prec));
                    break;
                case TOp::E:
                    s[i] = Ival<P>(P::const_e(Dir::Down, prec), P::const_e(Dir::Up, prec));
                    break;
                case TOp::Var:
                    s[i] = box[in.arg0];
                    break;
                case TOp::Add: s[i] = iv_add(s[in.arg0], s[in.arg1], prec); break;
                case TOp::Sub: s[i] = iv_sub(s[in.arg0], s[in.arg1], prec); break;
                case TOp::Mul: s[i] = iv_mul(s[in.arg0], s[in.arg1], prec); break;
                case TOp::Div: s[i] = iv_div(s[in.arg0], s[in.arg1], prec); break;
                case TOp::Ln: s[i] = iv_ln(s[in.arg0], prec); break;
                case TOp::Exp: s[i] = iv_exp(s[in.arg0], prec); break;
                case TOp::Sqrt: s[i] = iv_sqrt(s[in.arg0], prec); break;
                case TOp::PowInt: s[i] = iv_pow_int(s[in.arg0], in.num, prec); break;
                case TOp::Pow: s[i] = iv_pow(s[in.arg0], s[in.arg1], prec); break;
            }
        } catch (const DomainError& e) {
            throw DomainError(e.what(), render(in.src));
        }
    }
    return s.back();
}

// Point evaluation at mpfr precision, round-to-nearest (not validated; used
// by search heuristics and high-precision spot checks).
inline MpReal eval_point(const Tape& t, const std::vector<MpReal>& x, mpfr_prec_t prec) {
    std::vector<MpReal> s;
    s.reserve(t.code.size());
    for (const TInstr& in : t.code) {
        MpReal r(prec);
        switch (in.op) {
            case TOp::Const:
                r = MpReal::from_ratio(in.num, in.den, prec);
                break;
            case TOp::E:
                r = MpReal::e(prec);
                break;
            case TOp::Var:
                r = x[in.arg0];
                break;
            case TOp::Add: mpfr_add(r.raw(), s[in.arg0].raw(), s[in.arg1].raw(), MPFR_RNDN); break;
            case TOp::Sub: mpfr_sub(r.raw(), s[in.arg0].raw(), s[in.arg1].raw(), MPFR_RNDN); break;
            case TOp::Mul: mpfr_mul(r.raw(), s[in.arg0].raw(), s[in.arg1].raw(), MPFR_RNDN); break;
            case TOp::Div: mpfr_div(r.raw(), s[in.arg0].raw(), s[in.arg1].raw(), MPFR_RNDN); break;
            case TOp::Ln: mpfr_log(r.raw(), s[in.arg0].raw(), MPFR_RNDN); break;
            case TOp::Exp: mpfr_exp(r.raw(), s[in.arg0].raw(), MPFR_RNDN); break;
            case TOp::Sqrt: mpfr_sqrt(r.raw(), s[in.arg0].raw(), MPFR_RNDN); break;
            case TOp::PowInt: mpfr_pow_si(r.raw(), s[in.arg0].raw(), in.num, MPFR_RNDN); break;
            case TOp::Pow: {
                // 0^0 := 1, 0^positive := 0 (mpfr_pow already follows this
                // except 0^0 which it defines as 1 too)
                mpfr_pow(r.raw(), s[in.arg0].raw(), s[in.arg1].raw(), MPFR_RNDN);
                break;
            }
        }
        s.push_back(std::move(r));
    }
    return s.back();
}

// Fast double point evaluation for inner search loops.
inline double eval_point_d(const Tape& t, const std::vector<double>& x) {
    std::vector<double> s(t.code.size());
    for (size_t i = 0; i < t.code.size(); ++i) {
        const TInstr& in = t.code[i];
        switch (in.op) {
            case TOp::Const: s[i] = (double)in.num / (double)in.den; break;
            case TOp::E: s[i] = 2.718281828459045235360287471352662498; break;
            case TOp::Var: s[i] = x[in.arg0]; break;
            case TOp::Add: s[i] = s[in.arg0] + s[in.arg1]; break;
            case TOp::Sub: s[i] = s[in.arg0] - s[in.arg1]; break;
            case TOp::Mul: s[i] = s[in.arg0] * s[in.arg1]; break;
            case TOp::Div: s[i] = s[in.arg0] / s[in.arg1]; break;
            case TOp::Ln: s[i] = std::log(s[in.arg0]); break;
            case TOp::Exp: s[i] = std::exp(s[in.arg0]); break;
            case TOp::Sqrt: s[i] = std::sqrt(s[in.arg0]); break;
            case TOp::PowInt: s[i] = std::pow(s[in.arg0], (double)in.num); break;
            case TOp::Pow:
                if (s[in.arg0] == 0.0 && s[in.arg1] == 0.0)
                    s[i] = 1.0;
                else
                    s[i] = std::pow(s[in.arg0], s[in.arg1]);
                break;
        }
    }
    return s.back();
}

}  // namespace powexp
