#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nominal.hpp"

namespace fhml {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// either a name or a value variable
struct Value {
    bool is_var = false;
    Name name = 0;
    std::string var;

    static Value of(Name a) { return {false, a, {}}; }
    static Value of(std::string x) { return {true, 0, std::move(x)}; }

    friend bool operator==(const Value&, const Value&) = default;
};

inline std::string to_string(const Value& v) { return v.is_var ? v.var : name_str(v.name); }

enum class Op { Eq, Neq, Or, And, Not, BigOr, BigAnd, Fresh, Diamond, Box, Mu, Nu, Var };

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
    Op op;
    std::vector<Value> vals;         // Eq/Neq operands, label arguments, fixpoint or variable arguments
    std::string tag;                 // Diamond/Box
    std::string x;                   // BigOr/BigAnd/Fresh binder
    std::string rec;                 // Mu/Nu/Var
    std::vector<std::string> params; // Mu/Nu
    Formula a, b;
};

using Signature = std::map<std::string, int>;

namespace mk {
inline Formula node(Node n) { return std::make_shared<const Node>(std::move(n)); }
inline Formula eq(Value u, Value v) { return node({Op::Eq, {u, v}, {}, {}, {}, {}, {}, {}}); }
inline Formula neq(Value u, Value v) { return node({Op::Neq, {u, v}, {}, {}, {}, {}, {}, {}}); }
inline Formula lor(Formula a, Formula b) { return node({Op::Or, {}, {}, {}, {}, {}, a, b}); }
inline Formula land(Formula a, Formula b) { return node({Op::And, {}, {}, {}, {}, {}, a, b}); }
inline Formula lnot(Formula a) { return node({Op::Not, {}, {}, {}, {}, {}, a, {}}); }
inline Formula some(std::string x, Formula a) { return node({Op::BigOr, {}, {}, x, {}, {}, a, {}}); }
inline Formula all(std::string x, Formula a) { return node({Op::BigAnd, {}, {}, x, {}, {}, a, {}}); }
inline Formula fresh(std::string x, Formula a) { return node({Op::Fresh, {}, {}, x, {}, {}, a, {}}); }
inline Formula dia(std::string t, std::vector<Value> us, Formula a) {
    return node({Op::Diamond, std::move(us), t, {}, {}, {}, a, {}});
}
inline Formula box(std::string t, std::vector<Value> us, Formula a) {
    return node({Op::Box, std::move(us), t, {}, {}, {}, a, {}});
}
inline Formula mu(std::string X, std::vector<std::string> xs, Formula body, std::vector<Value> us = {}) {
    return node({Op::Mu, std::move(us), {}, {}, X, std::move(xs), body, {}});
}
inline Formula nu(std::string X, std::vector<std::string> xs, Formula body, std::vector<Value> us = {}) {
    return node({Op::Nu, std::move(us), {}, {}, X, std::move(xs), body, {}});
}
inline Formula var(std::string X, std::vector<Value> us = {}) {
    return node({Op::Var, std::move(us), {}, {}, X, {}, {}, {}});
}
} // namespace mk

inline bool is_binder(Op op) { return op == Op::BigOr || op == Op::BigAnd || op == Op::Fresh; }
inline bool is_fix(Op op) { return op == Op::Mu || op == Op::Nu; }
inline bool is_modal(Op op) { return op == Op::Diamond || op == Op::Box; }
inline bool is_binary(Op op) { return op == Op::Or || op == Op::And; }

// copy of n with new children / values
inline Formula rebuild(const Node& n, Formula a, Formula b = {}) {
    Node m = n;
    m.a = std::move(a);
    m.b = std::move(b);
    return mk::node(std::move(m));
}

inline bool equal(const Formula& f, const Formula& g) {
    if (f == g) return true;
    if (!f || !g) return false;
    if (f->op != g->op || f->vals != g->vals || f->tag != g->tag || f->x != g->x || f->rec != g->rec ||
        f->params != g->params)
        return false;
    return equal(f->a, g->a) && equal(f->b, g->b);
}

// ---------- printing

namespace detail {
inline std::string values_str(const std::vector<Value>& us) {
    std::string r;
    for (std::size_t i = 0; i < us.size(); ++i) r += (i ? "," : "") + to_string(us[i]);
    return r;
}

// binders and anything ending in one swallow text to their right
inline bool open_right(const Formula& f) {
    switch (f->op) {
    case Op::BigOr: case Op::BigAnd: case Op::Fresh: case Op::Mu: case Op::Nu: return true;
    case Op::Not: case Op::Diamond: case Op::Box: return open_right(f->a);
    case Op::Or: case Op::And: return open_right(f->b);
    default: return false;
    }
}

inline std::string print(const Formula& f);

inline std::string paren(const std::string& s) { return "(" + s + ")"; }

inline std::string print_unary_arg(const Formula& f) {
    std::string s = print(f);
    if (is_binary(f->op) || f->op == Op::Eq || f->op == Op::Neq) return paren(s);
    return s;
}

inline std::string print(const Formula& f) {
    switch (f->op) {
    case Op::Eq: return to_string(f->vals[0]) + " = " + to_string(f->vals[1]);
    case Op::Neq: return to_string(f->vals[0]) + " != " + to_string(f->vals[1]);
    case Op::Or:
    case Op::And: {
        std::string l = print(f->a), r = print(f->b);
        bool lp = open_right(f->a) || (f->op == Op::And && f->a->op == Op::Or);
        bool rp = is_binary(f->b->op) && (f->b->op == f->op || f->op == Op::And);
        return (lp ? paren(l) : l) + (f->op == Op::Or ? " | " : " & ") + (rp ? paren(r) : r);
    }
    case Op::Not: return "!" + print_unary_arg(f->a);
    case Op::BigOr: return "some " + f->x + ". " + print(f->a);
    case Op::BigAnd: return "all " + f->x + ". " + print(f->a);
    case Op::Fresh: return "fresh " + f->x + ". " + print(f->a);
    case Op::Diamond:
    case Op::Box: {
        std::string lab = f->tag + (f->vals.empty() ? "" : ":" + values_str(f->vals));
        std::string pre = f->op == Op::Diamond ? "<" + lab + "> " : "[" + lab + "] ";
        return pre + print_unary_arg(f->a);
    }
    case Op::Mu:
    case Op::Nu: {
        std::string r = (f->op == Op::Mu ? "mu " : "nu ") + f->rec;
        if (!f->params.empty()) {
            r += "(";
            for (std::size_t i = 0; i < f->params.size(); ++i) r += (i ? "," : "") + f->params[i];
            r += ")";
        }
        r += ". " + print(f->a);
        if (!f->vals.empty()) r += " (" + values_str(f->vals) + ")";
        return r;
    }
    case Op::Var: return f->rec + (f->vals.empty() ? "" : "(" + values_str(f->vals) + ")");
    }
    return {};
}
} // namespace detail

inline std::string to_string(const Formula& f) { return detail::print(f); }

// ---------- traversal helpers

// names in textual order, repeats included
inline void collect_names(const Formula& f, NameSeq& out) {
    if (!f) return;
    if (f->op == Op::Mu || f->op == Op::Nu) {
        collect_names(f->a, out);
        for (auto& v : f->vals)
            if (!v.is_var) out.push_back(v.name);
        return;
    }
    for (auto& v : f->vals)
        if (!v.is_var) out.push_back(v.name);
    collect_names(f->a, out);
    collect_names(f->b, out);
}

inline NameSet support(const Formula& f) {
    NameSeq s;
    collect_names(f, s);
    return {s.begin(), s.end()};
}

inline Formula act(const Permutation& p, const Formula& f) {
    if (!f || p.is_identity()) return f;
    Node n = *f;
    for (auto& v : n.vals)
        if (!v.is_var) v.name = p(v.name);
    n.a = act(p, f->a);
    n.b = act(p, f->b);
    return mk::node(std::move(n));
}

inline int count_not(const Formula& f) {
    if (!f) return 0;
    return (f->op == Op::Not ? 1 : 0) + count_not(f->a) + count_not(f->b);
}

// ---------- measures

inline int size(const Formula& f) {
    int n = static_cast<int>(f->vals.size());
    switch (f->op) {
    case Op::Eq: case Op::Neq: return 2;
    case Op::Or: case Op::And: return 1 + size(f->a) + size(f->b);
    case Op::Not: case Op::BigOr: case Op::BigAnd: case Op::Fresh: return 1 + size(f->a);
    case Op::Diamond: case Op::Box: return 1 + n + size(f->a);
    case Op::Mu: case Op::Nu: return 1 + size(f->a) + 2 * n;
    case Op::Var: return 1 + n;
    }
    return 0;
}

inline int bounding_depth(const Formula& f) {
    switch (f->op) {
    case Op::Eq: case Op::Neq: case Op::Var: return 0;
    case Op::Or: case Op::And: return std::max(bounding_depth(f->a), bounding_depth(f->b));
    case Op::Not: case Op::Diamond: case Op::Box: return bounding_depth(f->a);
    case Op::BigOr: case Op::BigAnd: case Op::Fresh: return 1 + bounding_depth(f->a);
    case Op::Mu: case Op::Nu: return bounding_depth(f->a) + static_cast<int>(f->params.size());
    }
    return 0;
}

inline void free_value_vars(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
    auto val = [&](const Value& v) {
        if (v.is_var && !bound.count(v.var)) out.insert(v.var);
    };
    for (auto& v : f->vals) val(v);
    if (is_binder(f->op) || is_fix(f->op)) {
        std::vector<std::string> xs = is_fix(f->op) ? f->params : std::vector<std::string>{f->x};
        std::vector<std::string> added;
        for (auto& x : xs)
            if (bound.insert(x).second) added.push_back(x);
        free_value_vars(f->a, bound, out);
        for (auto& x : added) bound.erase(x);
        return;
    }
    if (f->a) free_value_vars(f->a, bound, out);
    if (f->b) free_value_vars(f->b, bound, out);
}

inline std::set<std::string> free_value_vars(const Formula& f) {
    std::set<std::string> bound, out;
    free_value_vars(f, bound, out);
    return out;
}

inline void free_rec_vars(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
    if (f->op == Op::Var) {
        if (!bound.count(f->rec)) out.insert(f->rec);
        return;
    }
    if (is_fix(f->op)) {
        bool added = bound.insert(f->rec).second;
        free_rec_vars(f->a, bound, out);
        if (added) bound.erase(f->rec);
        return;
    }
    if (f->a) free_rec_vars(f->a, bound, out);
    if (f->b) free_rec_vars(f->b, bound, out);
}

inline std::set<std::string> free_rec_vars(const Formula& f) {
    std::set<std::string> bound, out;
    free_rec_vars(f, bound, out);
    return out;
}

inline bool is_firm(const Formula& f) { return free_value_vars(f).empty(); }
inline bool is_closed(const Formula& f) { return free_rec_vars(f).empty(); }
inline int zeta(const Formula& f) { return static_cast<int>(free_value_vars(f).size()); }

// ---------- validation

// arities, tags, and the even-negation rule for bound recursion variables
inline void validate(const Formula& root, const Signature* sig = nullptr) {
    struct Rec {
        std::size_t arity;
        int nots;
    };
    std::map<std::string, std::vector<Rec>> scope;
    std::map<std::string, std::size_t> free_arity;
    std::function<void(const Formula&, int)> go = [&](const Formula& f, int nots) {
        switch (f->op) {
        case Op::Not: go(f->a, nots + 1); return;
        case Op::Diamond:
        case Op::Box:
            if (sig) {
                auto it = sig->find(f->tag);
                if (it == sig->end()) throw Error("unknown tag '" + f->tag + "'");
                if (it->second != static_cast<int>(f->vals.size()))
                    throw Error("tag '" + f->tag + "' expects " + std::to_string(it->second) + " argument(s)");
            }
            go(f->a, nots);
            return;
        case Op::Mu:
        case Op::Nu:
            if (f->params.size() != f->vals.size())
                throw Error("fixpoint " + f->rec + " has " + std::to_string(f->params.size()) +
                            " parameter(s) but " + std::to_string(f->vals.size()) + " argument(s)");
            for (std::size_t i = 0; i < f->params.size(); ++i)
                for (std::size_t j = i + 1; j < f->params.size(); ++j)
                    if (f->params[i] == f->params[j]) throw Error("repeated parameter " + f->params[i]);
            scope[f->rec].push_back({f->params.size(), nots});
            go(f->a, nots);
            scope[f->rec].pop_back();
            return;
        case Op::Var: {
            auto it = scope.find(f->rec);
            if (it != scope.end() && !it->second.empty()) {
                const Rec& r = it->second.back();
                if (r.arity != f->vals.size())
                    throw Error("variable " + f->rec + " expects " + std::to_string(r.arity) + " argument(s)");
                if ((nots - r.nots) % 2 != 0)
                    throw Error("variable " + f->rec + " occurs under an odd number of negations");
            } else {
                auto [fit, fresh_entry] = free_arity.emplace(f->rec, f->vals.size());
                if (!fresh_entry && fit->second != f->vals.size())
                    throw Error("inconsistent arity for free variable " + f->rec);
            }
            return;
        }
        default:
            if (f->a) go(f->a, nots);
            if (f->b) go(f->b, nots);
        }
    };
    go(root, 0);
}

// ---------- substitution

using ValueSubst = std::vector<std::pair<std::vector<std::string>, NameSeq>>;
using RecSubst = std::vector<Formula>; // each entry is a fixpoint node; its own arguments are ignored

namespace detail {
inline Formula subst_block(const Formula& f, const std::map<std::string, Name>& m) {
    if (m.empty()) return f;
    bool changed = false;
    Node n = *f;
    for (auto& v : n.vals) {
        if (v.is_var) {
            auto it = m.find(v.var);
            if (it != m.end()) {
                v = Value::of(it->second);
                changed = true;
            }
        }
    }
    if (is_binder(f->op) || is_fix(f->op)) {
        std::vector<std::string> xs = is_fix(f->op) ? f->params : std::vector<std::string>{f->x};
        std::map<std::string, Name> inner = m;
        for (auto& x : xs) inner.erase(x);
        n.a = subst_block(f->a, inner);
    } else {
        if (f->a) n.a = subst_block(f->a, m);
        if (f->b) n.b = subst_block(f->b, m);
    }
    if (!changed && n.a == f->a && n.b == f->b) return f;
    return mk::node(std::move(n));
}

inline Formula subst_rec1(const Formula& f, const Formula& def, const std::set<std::string>& def_fv,
                          const std::set<std::string>& def_frv, std::set<std::string>& vb,
                          std::set<std::string>& rb) {
    if (f->op == Op::Var) {
        if (f->rec != def->rec) return f;
        for (auto& x : def_fv)
            if (vb.count(x)) throw Error("substitution would capture value variable " + x);
        for (auto& X : def_frv)
            if (rb.count(X)) throw Error("substitution would capture recursion variable " + X);
        Node n = *def;
        n.vals = f->vals;
        return mk::node(std::move(n));
    }
    if (is_fix(f->op) && f->rec == def->rec) return f; // rebinding
    if (!f->a) return f;
    std::vector<std::string> added_v;
    bool added_r = false;
    if (is_binder(f->op) || is_fix(f->op)) {
        std::vector<std::string> xs = is_fix(f->op) ? f->params : std::vector<std::string>{f->x};
        for (auto& x : xs)
            if (vb.insert(x).second) added_v.push_back(x);
        if (is_fix(f->op)) added_r = rb.insert(f->rec).second;
    }
    Formula a = subst_rec1(f->a, def, def_fv, def_frv, vb, rb);
    for (auto& x : added_v) vb.erase(x);
    if (added_r) rb.erase(f->rec);
    Formula b = f->b ? subst_rec1(f->b, def, def_fv, def_frv, vb, rb) : f->b;
    if (a == f->a && b == f->b) return f;
    return rebuild(*f, a, b);
}
} // namespace detail

inline Formula subst_values(Formula f, const ValueSubst& g) {
    for (auto& [xs, as] : g) {
        if (xs.size() != as.size()) throw Error("substitution block length mismatch");
        std::map<std::string, Name> m;
        for (std::size_t i = 0; i < xs.size(); ++i) m[xs[i]] = as[i];
        f = detail::subst_block(f, m);
    }
    return f;
}

inline Formula subst_rec(Formula f, const RecSubst& th) {
    for (auto& def : th) {
        if (!is_fix(def->op)) throw Error("recursion substitution needs a fixpoint");
        Node open = *def;
        open.vals.clear();
        auto fv = free_value_vars(def->a);
        for (auto& x : def->params) fv.erase(x);
        auto frv = free_rec_vars(def->a);
        frv.erase(def->rec);
        std::set<std::string> vb, rb;
        f = detail::subst_rec1(f, def, fv, frv, vb, rb);
    }
    return f;
}

// (body{fix/X}){args/params}
inline Formula unfold(const Formula& f) {
    if (!is_fix(f->op)) throw Error("unfold expects a fixpoint application");
    NameSeq as;
    for (auto& v : f->vals) {
        if (v.is_var) throw Error("unfold expects name arguments");
        as.push_back(v.name);
    }
    Formula body = subst_rec(f->a, {f});
    return subst_values(body, {{f->params, as}});
}

// ---------- binder normalization

inline Formula normalize_binders(const Formula& root) {
    std::set<std::string> claimed = free_rec_vars(root), used_rec = claimed, used_val;
    std::function<void(const Formula&)> names = [&](const Formula& f) {
        for (auto& v : f->vals)
            if (v.is_var) used_val.insert(v.var);
        if (is_binder(f->op)) used_val.insert(f->x);
        for (auto& x : f->params) used_val.insert(x);
        if (is_fix(f->op) || f->op == Op::Var) used_rec.insert(f->rec);
        if (f->a) names(f->a);
        if (f->b) names(f->b);
    };
    names(root);
    auto fresh_id = [](const std::string& base, std::set<std::string>& used) {
        for (int k = 1;; ++k) {
            std::string c = base + std::to_string(k);
            if (!used.count(c)) {
                used.insert(c);
                return c;
            }
        }
    };
    using Env = std::map<std::string, std::string>;
    std::function<Formula(const Formula&, const Env&, const Env&)> go = [&](const Formula& f, const Env& ve,
                                                                          const Env& re) -> Formula {
        Node n = *f;
        for (auto& v : n.vals)
            if (v.is_var) {
                auto it = ve.find(v.var);
                if (it != ve.end()) v.var = it->second;
            }
        if (f->op == Op::Var) {
            auto it = re.find(f->rec);
            if (it != re.end()) n.rec = it->second;
            return mk::node(std::move(n));
        }
        Env ve2 = ve, re2 = re;
        auto bind_val = [&](std::string& x) {
            bool shadow = false;
            for (auto& kv : ve)
                if (kv.second == x || kv.first == x) shadow = true;
            std::string nx = shadow ? fresh_id(x, used_val) : x;
            ve2[x] = nx;
            x = nx;
        };
        if (is_binder(f->op)) bind_val(n.x);
        if (is_fix(f->op)) {
            for (auto& x : n.params) bind_val(x);
            std::string X = f->rec;
            std::string nX = claimed.count(X) ? fresh_id(X, used_rec) : X;
            claimed.insert(nX);
            re2[X] = nX;
            n.rec = nX;
        }
        if (f->a) n.a = go(f->a, ve2, re2);
        if (f->b) n.b = go(f->b, ve2, re2);
        return mk::node(std::move(n));
    };
    return go(root, {}, {});
}

// ---------- negation elimination

inline Formula negation_free(const Formula& root) {
    if (!is_firm(root)) throw Error("negation elimination expects a firm formula");
    std::map<std::string, std::vector<bool>> pol;
    std::function<Formula(const Formula&, bool)> go = [&](const Formula& f, bool neg) -> Formula {
        switch (f->op) {
        case Op::Eq: return neg ? mk::neq(f->vals[0], f->vals[1]) : f;
        case Op::Neq: return neg ? mk::eq(f->vals[0], f->vals[1]) : f;
        case Op::Not: return go(f->a, !neg);
        case Op::Or:
        case Op::And: {
            Node n = *f;
            if (neg) n.op = f->op == Op::Or ? Op::And : Op::Or;
            n.a = go(f->a, neg);
            n.b = go(f->b, neg);
            return mk::node(std::move(n));
        }
        case Op::BigOr:
        case Op::BigAnd:
        case Op::Diamond:
        case Op::Box:
        case Op::Fresh: {
            Node n = *f;
            if (neg && f->op != Op::Fresh) {
                static const std::map<Op, Op> dual = {
                    {Op::BigOr, Op::BigAnd}, {Op::BigAnd, Op::BigOr}, {Op::Diamond, Op::Box}, {Op::Box, Op::Diamond}};
                n.op = dual.at(f->op);
            }
            n.a = go(f->a, neg);
            return mk::node(std::move(n));
        }
        case Op::Mu:
        case Op::Nu: {
            Node n = *f;
            if (neg) n.op = f->op == Op::Mu ? Op::Nu : Op::Mu;
            pol[f->rec].push_back(neg);
            n.a = go(f->a, neg);
            pol[f->rec].pop_back();
            return mk::node(std::move(n));
        }
        case Op::Var: {
            auto it = pol.find(f->rec);
            if (it == pol.end() || it->second.empty()) {
                if (neg) throw Error("free recursion variable " + f->rec + " under negation");
                return f;
            }
            if (it->second.back() != neg)
                throw Error("variable " + f->rec + " occurs under an odd number of negations");
            return f;
        }
        }
        return f;
    };
    return go(root, false);
}

// ---------- alternation depth and ranks

struct FixInfo {
    bool mu = false;
    Formula body;
    int adepth = 0;
};

/** Per-variable alternation data of a normalized formula. */
struct Alternation {
    std::map<std::string, FixInfo> vars;
    int depth = 0;

    int adepth_of(const std::string& X) const {
        auto it = vars.find(X);
        if (it == vars.end()) throw Error("unknown recursion variable " + X);
        return it->second.adepth;
    }
};

inline Alternation alternation(const Formula& root) {
    Alternation alt;
    std::function<void(const Formula&)> scan = [&](const Formula& f) {
        if (is_fix(f->op)) {
            if (alt.vars.count(f->rec)) throw Error("binders are not normalized: " + f->rec + " bound twice");
            alt.vars[f->rec] = {f->op == Op::Mu, f->a, 0};
        }
        if (f->a) scan(f->a);
        if (f->b) scan(f->b);
    };
    scan(root);
    // X -> Y when X occurs free in the body of Y
    std::map<std::string, std::set<std::string>> up;
    for (auto& [Y, info] : alt.vars)
        for (auto& X : free_rec_vars(info.body))
            if (X != Y && alt.vars.count(X)) up[X].insert(Y);
    std::map<std::string, std::set<std::string>> reach;
    for (auto& [X, info] : alt.vars) {
        std::vector<std::string> stack(up[X].begin(), up[X].end());
        auto& r = reach[X];
        while (!stack.empty()) {
            std::string Y = stack.back();
            stack.pop_back();
            if (!r.insert(Y).second) continue;
            for (auto& Z : up[Y]) stack.push_back(Z);
        }
    }
    std::map<std::string, int> memo;
    std::function<int(const std::string&)> chain = [&](const std::string& X) {
        auto it = memo.find(X);
        if (it != memo.end()) return it->second;
        int best = 1;
        for (auto& Y : reach[X])
            if (alt.vars[Y].mu != alt.vars[X].mu) best = std::max(best, 1 + chain(Y));
        return memo[X] = best;
    };
    for (auto& [X, info] : alt.vars) {
        info.adepth = chain(X);
        alt.depth = std::max(alt.depth, info.adepth);
    }
    return alt;
}

inline int alternation_depth(const Formula& f) { return alternation(f).depth; }

inline int rank(const Formula& f, const Alternation& alt) {
    if (!is_fix(f->op)) return 0;
    int d = alt.adepth_of(f->rec);
    return 2 * (d / 2) + (f->op == Op::Mu ? 1 : 0);
}

} // namespace fhml
