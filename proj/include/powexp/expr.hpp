#pragma once

#include <gmpxx.h>

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "powexp/errors.hpp"

namespace powexp {

// Immutable expression node. Nodes are interned: structurally equal
// subexpressions share one object, so expressions form a DAG and pointer
// equality implies structural equality.
struct Node;
using Expr = std::shared_ptr<const Node>;

enum class Op : uint8_t { Const, E, Var, Add, Sub, Mul, Div, Pow, Ln };

struct Node {
    Op op;
    long long num = 0, den = 1;  // Const payload, gcd-reduced, den > 0
    std::string name;            // Var payload
    Expr a, b;                   // children (Ln uses only a)
    uint64_t id = 0;             // creation-ordered unique id
};

namespace detail {

inline long long llgcd(long long a, long long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        long long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

struct Interner {
    std::mutex mu;
    std::unordered_map<std::string, Expr> table;
    std::atomic<uint64_t> next_id{1};

    static Interner& get() {
        static Interner s;
        return s;
    }

    Expr intern(Node n) {
        std::string key;
        key.reserve(48);
        key += char('A' + int(n.op));
        switch (n.op) {
            case Op::Const:
                key += std::to_string(n.num) + "/" + std::to_string(n.den);
                break;
            case Op::Var:
                key += n.name;
                break;
            case Op::E:
                break;
            default:
                key += std::to_string(n.a->id);
                if (n.b) key += "," + std::to_string(n.b->id);
        }
        std::lock_guard lk(mu);
        auto it = table.find(key);
        if (it != table.end()) return it->second;
        n.id = next_id.fetch_add(1);
        auto p = std::make_shared<const Node>(std::move(n));
        table.emplace(std::move(key), p);
        return p;
    }
};

}  // namespace detail

namespace ex {

inline Expr num(long long n, long long d = 1) {
    if (d == 0) throw Error("rational constant with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    long long g = detail::llgcd(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    Node nd;
    nd.op = Op::Const;
    nd.num = n;
    nd.den = d;
    return detail::Interner::get().intern(std::move(nd));
}

inline Expr e() {
    Node nd;
    nd.op = Op::E;
    return detail::Interner::get().intern(std::move(nd));
}

inline Expr var(std::string name) {
    Node nd;
    nd.op = Op::Var;
    nd.name = std::move(name);
    return detail::Interner::get().intern(std::move(nd));
}

inline bool is_const(const Expr& x, long long n, long long d = 1) {
    return x->op == Op::Const && x->num == n && x->den == d;
}

namespace fold {
// Exact rational fold; returns nullptr when the result would overflow i64.
inline Expr rat(Op op, long long an, long long ad, long long bn, long long bd) {
    __int128 n, d;
    switch (op) {
        case Op::Add:
            n = (__int128)an * bd + (__int128)bn * ad;
            d = (__int128)ad * bd;
            break;
        case Op::Sub:
            n = (__int128)an * bd - (__int128)bn * ad;
            d = (__int128)ad * bd;
            break;
        case Op::Mul:
            n = (__int128)an * bn;
            d = (__int128)ad * bd;
            break;
        case Op::Div:
            if (bn == 0) throw DomainError("division by zero constant");
            n = (__int128)an * bd;
            d = (__int128)ad * bn;
            break;
        default:
            return nullptr;
    }
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 g = 1;
    {
        __int128 x = n < 0 ? -n : n, y = d;
        while (y) {
            __int128 t = x % y;
            x = y;
            y = t;
        }
        g = x ? x : 1;
    }
    n /= g;
    d /= g;
    constexpr __int128 lim = INT64_MAX;
    if (n > lim || n < -lim || d > lim) return nullptr;
    return num((long long)n, (long long)d);
}
}  // namespace fold

inline Expr binary(Op op, Expr a, Expr b) {
    Node nd;
    nd.op = op;
    nd.a = std::move(a);
    nd.b = std::move(b);
    return detail::Interner::get().intern(std::move(nd));
}

inline Expr add(Expr a, Expr b) {
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    if (a->op == Op::Const && b->op == Op::Const)
        if (Expr f = fold::rat(Op::Add, a->num, a->den, b->num, b->den)) return f;
    return binary(Op::Add, std::move(a), std::move(b));
}

inline Expr sub(Expr a, Expr b) {
    if (is_const(b, 0)) return a;
    if (a->op == Op::Const && b->op == Op::Const)
        if (Expr f = fold::rat(Op::Sub, a->num, a->den, b->num, b->den)) return f;
    return binary(Op::Sub, std::move(a), std::move(b));
}

inline Expr mul(Expr a, Expr b) {
    if (is_const(a, 0) || is_const(b, 0)) return num(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    if (a->op == Op::Const && b->op == Op::Const)
        if (Expr f = fold::rat(Op::Mul, a->num, a->den, b->num, b->den)) return f;
    return binary(Op::Mul, std::move(a), std::move(b));
}

inline Expr div(Expr a, Expr b) {
    if (is_const(b, 1)) return a;
    if (a->op == Op::Const && b->op == Op::Const)
        if (Expr f = fold::rat(Op::Div, a->num, a->den, b->num, b->den)) return f;
    return binary(Op::Div, std::move(a), std::move(b));
}

inline Expr neg(Expr a) { return mul(num(-1), std::move(a)); }

inline Expr pow(Expr a, Expr b) {
    if (is_const(b, 0)) return num(1);  // 0^0 := 1
    if (is_const(b, 1)) return a;
    return binary(Op::Pow, std::move(a), std::move(b));
}

inline Expr ln(Expr a) {
    if (is_const(a, 1)) return num(0);
    if (a->op == Op::E) return num(1);
    Node nd;
    nd.op = Op::Ln;
    nd.a = std::move(a);
    return detail::Interner::get().intern(std::move(nd));
}

// sqrt and exp are canonicalized to powers at construction.
inline Expr sqrt(Expr a) { return pow(std::move(a), num(1, 2)); }
inline Expr exp(Expr a) { return pow(e(), std::move(a)); }

}  // namespace ex

inline void collect_vars(const Expr& x, std::set<std::string>& out,
                         std::set<uint64_t>& seen) {
    if (!seen.insert(x->id).second) return;
    if (x->op == Op::Var) out.insert(x->name);
    if (x->a) collect_vars(x->a, out, seen);
    if (x->b) collect_vars(x->b, out, seen);
}

inline std::set<std::string> free_vars(const Expr& x) {
    std::set<std::string> out;
    std::set<uint64_t> seen;
    collect_vars(x, out, seen);
    return out;
}

inline bool depends_on(const Expr& x, const std::string& v) {
    return free_vars(x).count(v) > 0;
}

// Infix rendering with minimal parentheses; inverse of the statement parser
// for the operator subset used there.
inline int render_prec(Op op) {
    switch (op) {
        case Op::Add:
        case Op::Sub:
            return 1;
        case Op::Mul:
        case Op::Div:
            return 2;
        case Op::Pow:
            return 3;
        default:
            return 4;
    }
}

inline std::string render(const Expr& x) {
    auto wrap = [](const Expr& c, int parent_prec, bool strict) {
        std::string s = render(c);
        int p = render_prec(c->op);
        if (c->op == Op::Const && c->num < 0) p = 1;
        if (p < parent_prec || (strict && p == parent_prec)) return "(" + s + ")";
        return s;
    };
    switch (x->op) {
        case Op::Const:
            return x->den == 1 ? std::to_string(x->num)
                               : std::to_string(x->num) + "/" + std::to_string(x->den);
        case Op::E:
            return "e";
        case Op::Var:
            return x->name;
        case Op::Add:
            return wrap(x->a, 1, false) + " + " + wrap(x->b, 1, false);
        case Op::Sub:
            return wrap(x->a, 1, false) + " - " + wrap(x->b, 1, true);
        case Op::Mul:
            return wrap(x->a, 2, false) + "*" + wrap(x->b, 2, false);
        case Op::Div:
            return wrap(x->a, 2, false) + "/" + wrap(x->b, 2, true);
        case Op::Pow:
            if (x->a->op == Op::E) return "exp(" + render(x->b) + ")";
            if (x->b->op == Op::Const && x->b->num == 1 && x->b->den == 2)
                return "sqrt(" + render(x->a) + ")";
            return wrap(x->a, 3, true) + "^" + wrap(x->b, 3, false);
        case Op::Ln:
            return "ln(" + render(x->a) + ")";
    }
    return "?";
}

// Substitute `repl` for every occurrence of variable `v`.
inline Expr subst(const Expr& x, const std::string& v, const Expr& repl,
                  std::unordered_map<uint64_t, Expr>& memo) {
    auto it = memo.find(x->id);
    if (it != memo.end()) return it->second;
    Expr r;
    switch (x->op) {
        case Op::Const:
        case Op::E:
            r = x;
            break;
        case Op::Var:
            r = x->name == v ? repl : x;
            break;
        case Op::Ln:
            r = ex::ln(subst(x->a, v, repl, memo));
            break;
        case Op::Add:
            r = ex::add(subst(x->a, v, repl, memo), subst(x->b, v, repl, memo));
            break;
        case Op::Sub:
            r = ex::sub(subst(x->a, v, repl, memo), subst(x->b, v, repl, memo));
            break;
        case Op::Mul:
            r = ex::mul(subst(x->a, v, repl, memo), subst(x->b, v, repl, memo));
            break;
        case Op::Div:
            r = ex::div(subst(x->a, v, repl, memo), subst(x->b, v, repl, memo));
            break;
        case Op::Pow:
            r = ex::pow(subst(x->a, v, repl, memo), subst(x->b, v, repl, memo));
            break;
    }
    memo.emplace(x->id, r);
    return r;
}

inline Expr subst(const Expr& x, const std::string& v, const Expr& repl) {
    std::unordered_map<uint64_t, Expr> memo;
    return subst(x, v, repl, memo);
}

// d/dv. Power rule splits three ways: constant exponent, exp(w), general u^w.
inline Expr differentiate(const Expr& x, const std::string& v) {
    using namespace ex;
    switch (x->op) {
        case Op::Const:
        case Op::E:
            return num(0);
        case Op::Var:
            return num(x->name == v ? 1 : 0);
        case Op::Add:
            return add(differentiate(x->a, v), differentiate(x->b, v));
        case Op::Sub:
            return sub(differentiate(x->a, v), differentiate(x->b, v));
        case Op::Mul:
            return add(mul(differentiate(x->a, v), x->b),
                       mul(x->a, differentiate(x->b, v)));
        case Op::Div:
            return div(sub(mul(differentiate(x->a, v), x->b),
                           mul(x->a, differentiate(x->b, v))),
                       mul(x->b, x->b));
        case Op::Ln:
            return div(differentiate(x->a, v), x->a);
        case Op::Pow: {
            const Expr& u = x->a;
            const Expr& w = x->b;
            bool w_const = !depends_on(w, v);
            bool u_const = !depends_on(u, v);
            if (u_const && w_const) return num(0);
            if (u->op == Op::E)  // d exp(w) = exp(w) w'
                return mul(x, differentiate(w, v));
            if (w_const)  // d u^c = c u^(c-1) u'
                return mul(mul(w, pow(u, sub(w, num(1)))), differentiate(u, v));
            if (u_const)  // d u^w = u^w ln(u) w'
                return mul(mul(x, ln(u)), differentiate(w, v));
            return mul(x, add(mul(differentiate(w, v), ln(u)),
                              div(mul(w, differentiate(u, v)), u)));
        }
    }
    return ex::num(0);
}

inline std::vector<Expr> gradient(const Expr& f, const std::vector<std::string>& vars) {
    std::vector<Expr> g;
    g.reserve(vars.size());
    for (auto& v : vars) g.push_back(differentiate(f, v));
    return g;
}

inline std::vector<std::vector<Expr>> hessian(const Expr& f,
                                              const std::vector<std::string>& vars) {
    size_t n = vars.size();
    std::vector<std::vector<Expr>> h(n, std::vector<Expr>(n));
    std::vector<Expr> g = gradient(f, vars);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
            h[i][j] = differentiate(g[i], vars[j]);
            if (j != i) h[j][i] = h[i][j];
        }
    return h;
}

// ---------------------------------------------------------------------------
// Normal form: sum of monomials with exact rational coefficients. A monomial
// is a set of (atom, rational exponent) factors times exp(E) for a normal
// form E. Non-rational powers are rewritten as x^w = exp(w ln x) and pure
// rational multiples of ln(atom) inside E are folded back into atom powers,
// so equal-by-algebra expressions built from the same pieces collapse to the
// same form. Used for offline structural identity checks, not for bounding.
// The rewrites assume positive bases, which holds on the domains these
// identities are checked over.
// ---------------------------------------------------------------------------

struct NormalForm;

struct Monomial {
    std::map<std::string, mpq_class> atoms;  // atom key -> exponent
    std::shared_ptr<NormalForm> exp_arg;     // nullptr means exp(0)
    std::string key() const;
};

struct NormalForm {
    // monomial key -> (coefficient, monomial)
    std::map<std::string, std::pair<mpq_class, Monomial>> terms;

    bool is_zero() const { return terms.empty(); }
    bool is_rational() const {
        if (terms.empty()) return true;
        if (terms.size() != 1) return false;
        const Monomial& m = terms.begin()->second.second;
        return m.atoms.empty() && !m.exp_arg;
    }
    mpq_class rational_value() const {
        return terms.empty() ? mpq_class(0) : terms.begin()->second.first;
    }
    std::string key() const {
        std::string s;
        for (auto& [k, cm] : terms) s += cm.first.get_str() + "*" + k + " + ";
        return s;
    }
};

inline std::string Monomial::key() const {
    std::string s;
    for (auto& [a, q] : atoms) s += a + "^" + q.get_str() + ".";
    if (exp_arg && !exp_arg->is_zero()) s += "exp{" + exp_arg->key() + "}";
    return s;
}

namespace nf {

inline NormalForm constant(const mpq_class& c) {
    NormalForm r;
    if (c != 0) r.terms.emplace(Monomial{}.key(), std::make_pair(c, Monomial{}));
    return r;
}

inline void add_term(NormalForm& r, const mpq_class& c, const Monomial& m) {
    if (c == 0) return;
    std::string k = m.key();
    auto it = r.terms.find(k);
    if (it == r.terms.end()) {
        r.terms.emplace(std::move(k), std::make_pair(c, m));
    } else {
        it->second.first += c;
        if (it->second.first == 0) r.terms.erase(it);
    }
}

inline NormalForm add(const NormalForm& a, const NormalForm& b) {
    NormalForm r = a;
    for (auto& [k, cm] : b.terms) add_term(r, cm.first, cm.second);
    return r;
}

inline NormalForm scale(const NormalForm& a, const mpq_class& c) {
    NormalForm r;
    if (c == 0) return r;
    for (auto& [k, cm] : a.terms) r.terms.emplace(k, std::make_pair(cm.first * c, cm.second));
    return r;
}

inline NormalForm sub(const NormalForm& a, const NormalForm& b) {
    return add(a, scale(b, mpq_class(-1)));
}

NormalForm mul(const NormalForm& a, const NormalForm& b);

// Fold rational multiples of ln(<atom>) out of an exponent sum into explicit
// atom powers; everything else stays under exp().
inline Monomial simplify_exp(Monomial m) {
    if (!m.exp_arg) return m;
    NormalForm rest;
    for (auto& [k, cm] : m.exp_arg->terms) {
        const Monomial& em = cm.second;
        if (!em.exp_arg && em.atoms.size() == 1 && em.atoms.begin()->second == 1 &&
            em.atoms.begin()->first.rfind("ln{", 0) == 0) {
            // coeff * ln{A}: pull A^coeff into the monomial
            std::string inner = em.atoms.begin()->first;
            inner = inner.substr(3, inner.size() - 4);
            m.atoms[inner] += cm.first;
            if (m.atoms[inner] == 0) m.atoms.erase(inner);
        } else {
            add_term(rest, cm.first, em);
        }
    }
    if (rest.is_zero())
        m.exp_arg = nullptr;
    else
        m.exp_arg = std::make_shared<NormalForm>(std::move(rest));
    return m;
}

inline Monomial mul_mono(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (auto& [atom, q] : b.atoms) {
        r.atoms[atom] += q;
        if (r.atoms[atom] == 0) r.atoms.erase(atom);
    }
    if (b.exp_arg) {
        if (!r.exp_arg)
            r.exp_arg = b.exp_arg;
        else
            r.exp_arg = std::make_shared<NormalForm>(add(*r.exp_arg, *b.exp_arg));
    }
    return simplify_exp(std::move(r));
}

inline NormalForm mul(const NormalForm& a, const NormalForm& b) {
    NormalForm r;
    for (auto& [ka, ca] : a.terms)
        for (auto& [kb, cb] : b.terms)
            add_term(r, ca.first * cb.first, mul_mono(ca.second, cb.second));
    return r;
}

// c^q for rational c > 0 or q integer; returns false when the result is not
// rational (caller then keeps a symbolic atom).
inline bool rat_pow(const mpq_class& c, const mpq_class& q, mpq_class& out) {
    if (c == 1 || q == 0) {
        out = 1;
        return true;
    }
    if (!q.get_den().fits_ulong_p() || !q.get_num().fits_slong_p()) return false;
    unsigned long root = q.get_den().get_ui();
    long p = q.get_num().get_si();
    mpz_class n = c.get_num(), d = c.get_den();
    if (root > 1) {
        if (c < 0) return false;
        mpz_class rn, rd;
        if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), root)) return false;
        if (!mpz_root(rd.get_mpz_t(), d.get_mpz_t(), root)) return false;
        n = rn;
        d = rd;
    }
    if (p < 0) {
        std::swap(n, d);
        p = -p;
        if (n == 0) return false;
        if (d < 0) {
            d = -d;
            n = -n;
        }
    }
    mpz_class np, dp;
    mpz_pow_ui(np.get_mpz_t(), n.get_mpz_t(), (unsigned long)p);
    mpz_pow_ui(dp.get_mpz_t(), d.get_mpz_t(), (unsigned long)p);
    out = mpq_class(np, dp);
    out.canonicalize();
    return true;
}

NormalForm pow_rat(const NormalForm& a, const mpq_class& q);

inline NormalForm opaque_atom(const std::string& key) {
    NormalForm r;
    Monomial m;
    m.atoms[key] = 1;
    r.terms.emplace(m.key(), std::make_pair(mpq_class(1), m));
    return r;
}

inline NormalForm pow_rat(const NormalForm& a, const mpq_class& q) {
    if (q == 0) return constant(1);
    if (q == 1) return a;
    if (a.is_zero()) return a;  // 0^q = 0 for q != 0 (q < 0 never reached on valid domains)
    if (a.terms.size() == 1) {
        auto& [c, m] = a.terms.begin()->second;
        mpq_class cq;
        Monomial r;
        for (auto& [atom, p] : m.atoms) r.atoms[atom] = p * q;
        if (m.exp_arg) r.exp_arg = std::make_shared<NormalForm>(scale(*m.exp_arg, q));
        NormalForm res;
        if (rat_pow(c, q, cq)) {
            add_term(res, cq, simplify_exp(std::move(r)));
        } else {
            r.atoms["cpow{" + c.get_str() + "}"] += q;
            add_term(res, mpq_class(1), simplify_exp(std::move(r)));
        }
        return res;
    }
    // sum: expand integer powers, otherwise keep the whole thing as an atom
    if (q.get_den() == 1 && q.get_num().fits_slong_p()) {
        long p = q.get_num().get_si();
        bool inv = p < 0;
        if (inv) p = -p;
        NormalForm acc = constant(1);
        NormalForm base = a;
        while (p) {
            if (p & 1) acc = mul(acc, base);
            base = mul(base, base);
            p >>= 1;
        }
        if (!inv) return acc;
        return opaque_atom("inv{" + acc.key() + "}");
    }
    NormalForm r = opaque_atom("pow{" + a.key() + ";" + q.get_str() + "}");
    return r;
}

// ln(n) for integer n > 1 as a multiple of ln of the smallest integer root,
// so e.g. ln(4) and 2 ln(2) normalize identically.
inline void log_int(NormalForm& r, const mpz_class& n, const mpq_class& coeff) {
    if (n == 1) return;
    mpz_class base = n;
    unsigned long mult = 1;
    for (unsigned long k = 63; k >= 2; --k) {
        mpz_class root;
        if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k)) {
            base = root;
            mult = k;
            break;
        }
    }
    Monomial lm;
    lm.atoms["lnc{" + base.get_str() + "}"] = 1;
    add_term(r, coeff * mpq_class(mult), lm);
}

// ln of a normal form. Single positive monomials split multiplicatively;
// sums become opaque ln atoms.
inline NormalForm log(const NormalForm& a) {
    if (a.terms.size() == 1) {
        auto& [c, m] = a.terms.begin()->second;
        if (c > 0) {
            NormalForm r;
            log_int(r, c.get_num(), mpq_class(1));
            log_int(r, c.get_den(), mpq_class(-1));
            for (auto& [atom, q] : m.atoms) {
                Monomial lm;
                lm.atoms["ln{" + atom + "}"] = 1;
                add_term(r, q, lm);
            }
            if (m.exp_arg) r = add(r, *m.exp_arg);
            return r;
        }
    }
    return opaque_atom("ln{" + a.key() + "}");
}

}  // namespace nf

inline NormalForm normalize(const Expr& x,
                            std::unordered_map<uint64_t, NormalForm>& memo) {
    auto it = memo.find(x->id);
    if (it != memo.end()) return it->second;
    NormalForm r;
    switch (x->op) {
        case Op::Const:
            r = nf::constant(mpq_class(x->num, x->den));
            break;
        case Op::E: {
            Monomial m;
            m.exp_arg = std::make_shared<NormalForm>(nf::constant(1));
            nf::add_term(r, mpq_class(1), m);
            break;
        }
        case Op::Var: {
            Monomial m;
            m.atoms["v{" + x->name + "}"] = 1;
            nf::add_term(r, mpq_class(1), m);
            break;
        }
        case Op::Add:
            r = nf::add(normalize(x->a, memo), normalize(x->b, memo));
            break;
        case Op::Sub:
            r = nf::sub(normalize(x->a, memo), normalize(x->b, memo));
            break;
        case Op::Mul:
            r = nf::mul(normalize(x->a, memo), normalize(x->b, memo));
            break;
        case Op::Div:
            r = nf::mul(normalize(x->a, memo),
                        nf::pow_rat(normalize(x->b, memo), mpq_class(-1)));
            break;
        case Op::Ln:
            r = nf::log(normalize(x->a, memo));
            break;
        case Op::Pow: {
            NormalForm w = normalize(x->b, memo);
            NormalForm u = normalize(x->a, memo);
            if (w.is_rational()) {
                r = nf::pow_rat(u, w.rational_value());
            } else {
                // u^w = exp(w ln u)
                NormalForm arg = nf::mul(w, nf::log(u));
                Monomial m;
                m.exp_arg = std::make_shared<NormalForm>(std::move(arg));
                nf::add_term(r, mpq_class(1), nf::simplify_exp(std::move(m)));
            }
            break;
        }
    }
    memo.emplace(x->id, r);
    return r;
}

inline NormalForm normalize(const Expr& x) {
    std::unordered_map<uint64_t, NormalForm> memo;
    return normalize(x, memo);
}

// True when the expression is identically zero by algebraic normalization.
inline bool is_zero_structural(const Expr& x) { return normalize(x).is_zero(); }

inline bool equal_structural(const Expr& a, const Expr& b) {
    if (a->id == b->id) return true;
    return is_zero_structural(ex::sub(a, b));
}

}  // namespace powexp
