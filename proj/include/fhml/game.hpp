#pragma once

#include <cmath>
#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fra.hpp"
#include "logic.hpp"
#include "nominal.hpp"
#include "solver.hpp"

namespace fhml {

/** Game position (s, H, phi) with closed, firm, negation-free phi. */
struct Position {
    Config cfg;
    Formula phi;
};

inline bool same_position(const Position& a, const Position& b) { return a.cfg == b.cfg && equal(a.phi, b.phi); }

inline Position act(const Permutation& p, const Position& x) { return {act(p, x.cfg), act(p, x.phi)}; }

inline NameSet support(const Position& x) {
    NameSet s = support(x.cfg);
    NameSet f = support(x.phi);
    s.insert(f.begin(), f.end());
    return s;
}

// supp(s, phi): registers plus formula names
inline NameSet active_names(const Config& c, const Formula& phi) {
    NameSet s = support(phi);
    for (auto& kv : c.regs) s.insert(kv.second);
    return s;
}

// traversal order: registers by index, formula left to right, remaining history ascending
inline std::pair<Position, Permutation> canonical_renaming(const Position& x, const NameSet& prot) {
    NameSeq order;
    for (auto& kv : x.cfg.regs) order.push_back(kv.second);
    collect_names(x.phi, order);
    order.insert(order.end(), x.cfg.H.begin(), x.cfg.H.end());
    Permutation p = canonical_permutation(order, prot);
    return {act(p, x), p};
}

inline std::string position_text(const Fra& fra, const Position& x) {
    return to_string(fra, x.cfg) + " " + to_string(x.phi);
}

struct Setup {
    int N = 0;       // grade
    int M = 0;       // nominal potential
    int supp = 0;    // |supp(phi0)|
    int size = 0;    // |phi0|
    int regindex = 0;
    Alternation alt;
};

inline Setup grade(const Formula& phi0, const Fra& fra) {
    if (!is_closed(phi0)) throw Error("formula is not closed");
    if (!is_firm(phi0)) throw Error("formula is not firm");
    if (count_not(phi0) != 0) throw Error("formula contains negation");
    Setup s;
    s.supp = static_cast<int>(support(phi0).size());
    s.M = s.supp + bounding_depth(phi0);
    s.regindex = register_index(fra);
    s.N = s.M + s.regindex;
    s.size = size(phi0);
    s.alt = alternation(phi0);
    return s;
}

inline NameSet well_bound(const NameSet& H, const Config& s, const Formula& phi, int N) {
    if (static_cast<int>(H.size()) <= N) return H;
    NameSet act = active_names(s, phi);
    NameSet out;
    for (Name a : H)
        if (act.count(a)) out.insert(a);
    for (Name a : H) {
        if (static_cast<int>(out.size()) >= N + 1) break;
        out.insert(a);
    }
    return out;
}

inline Player owner_of(const Formula& f) {
    switch (f->op) {
    case Op::Eq: return f->vals[0] == f->vals[1] ? Player::Attacker : Player::Defender;
    case Op::Neq: return f->vals[0] == f->vals[1] ? Player::Defender : Player::Attacker;
    case Op::And: case Op::BigAnd: case Op::Box: return Player::Attacker;
    default: return Player::Defender;
    }
}

inline Name label_name(const Formula& f) {
    if (f->vals.size() != 1) throw Error("automaton labels carry exactly one name: " + to_string(f));
    if (f->vals[0].is_var) throw Error("label argument is not a name: " + to_string(f));
    return f->vals[0].name;
}

inline std::vector<Position> expand_moves(const Position& x, int N, const Fra& fra) {
    const Formula& f = x.phi;
    std::vector<Position> out;
    switch (f->op) {
    case Op::Eq:
    case Op::Neq: break;
    case Op::Or:
    case Op::And:
        out.push_back({x.cfg, f->a});
        out.push_back({x.cfg, f->b});
        break;
    case Op::BigOr:
    case Op::BigAnd: {
        NameSet prot = active_names(x.cfg, f);
        NameSet cands = prot;
        for (Name a : x.cfg.H)
            if (!prot.count(a)) {
                cands.insert(a);
                break;
            }
        NameSet used = x.cfg.H;
        used.insert(prot.begin(), prot.end());
        cands.insert(smallest_outside(used));
        for (Name a : cands) out.push_back({x.cfg, subst_values(f->a, {{{f->x}, {a}}})});
        break;
    }
    case Op::Fresh: {
        NameSet used = x.cfg.H;
        NameSet fs = support(f);
        used.insert(fs.begin(), fs.end());
        out.push_back({x.cfg, subst_values(f->a, {{{f->x}, {smallest_outside(used)}}})});
        break;
    }
    case Op::Diamond:
    case Op::Box: {
        Name a = label_name(f);
        for (auto& d : step(fra, x.cfg, f->tag, a)) {
            Config c = d;
            c.H = well_bound(d.H, d, f->a, N);
            out.push_back({c, f->a});
        }
        break;
    }
    case Op::Mu:
    case Op::Nu: out.push_back({x.cfg, unfold(f)}); break;
    case Op::Var: throw Error("internal: recursion variable " + f->rec + " reached a game position");
    case Op::Not: throw Error("internal: negation reached a game position");
    }
    return out;
}

struct GameStats {
    long positions = 0;
    long edges = 0;
    int max_rank = 0;
    int N = 0;
    int M = 0;
    long double bound = 0;
};

/** Orbit game: one position per orbit, keyed by its canonical representative. */
struct ParityGame : Arena {
    std::vector<std::string> keys;
    std::vector<Position> reps;
    int root = 0;
    GameStats stats;
};

// |Q| * |phi0| * M!/|supp|! * (M + regindex + 1)^(M+1) * 2
inline long double orbit_bound(const Fra& fra, const Setup& s) {
    long double fact = 1;
    for (int k = s.supp + 1; k <= s.M; ++k) fact *= k;
    return static_cast<long double>(fra.states.size()) * s.size * fact *
           std::pow(static_cast<long double>(s.M + s.regindex + 1), s.M + 1) * 2;
}

inline ParityGame build_orbit_game(const Fra& fra, const Formula& phi0, const Config& s0,
                                   long max_positions = 2000000) {
    if (!well_formed(fra, s0)) throw Error("start configuration does not fit the automaton");
    Setup st = grade(phi0, fra);
    ParityGame g;
    std::unordered_map<std::string, int> index;
    std::deque<int> work;
    auto intern = [&](const Position& p) {
        Position c = canonical_renaming(p, {}).first;
        std::string key = position_text(fra, c);
        auto [it, fresh_key] = index.emplace(key, g.size());
        if (fresh_key) {
            if (g.size() >= max_positions)
                throw Error("position ceiling of " + std::to_string(max_positions) + " reached");
            g.add(owner_of(c.phi), rank(c.phi, st.alt));
            g.keys.push_back(key);
            g.reps.push_back(c);
            work.push_back(it->second);
        }
        return it->second;
    };
    Config root = s0;
    root.H = well_bound(s0.H, s0, phi0, st.N);
    g.root = intern({root, phi0});
    long edges = 0;
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        Position x = g.reps[v];
        std::vector<int> succ;
        for (auto& y : expand_moves(x, st.N, fra)) succ.push_back(intern(y));
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        edges += static_cast<long>(succ.size());
        g.succ[v] = std::move(succ);
    }
    g.stats.positions = g.size();
    g.stats.edges = edges;
    for (int r : g.rank) g.stats.max_rank = std::max(g.stats.max_rank, r);
    g.stats.N = st.N;
    g.stats.M = st.M;
    g.stats.bound = orbit_bound(fra, st);
    return g;
}

// `key ; owner ; rank ; successors`, after a header
inline void dump_game(std::ostream& os, const ParityGame& g) {
    os << "root P" << g.root << "\n";
    os << "N " << g.stats.N << "\n";
    os << "d " << g.stats.max_rank << "\n";
    for (int v = 0; v < g.size(); ++v) {
        os << "P" << v << " " << g.keys[v] << " ; " << player_char(g.owner[v]) << " ; " << g.rank[v] << " ;";
        for (int w : g.succ[v]) os << " P" << w;
        os << "\n";
    }
}

namespace detail {
// structural match of two formulas, extending inj on their names
inline bool match_formula(const Formula& f, const Formula& g, PartialInjection& inj) {
    if (f->op != g->op || f->tag != g->tag || f->x != g->x || f->rec != g->rec || f->params != g->params ||
        f->vals.size() != g->vals.size())
        return false;
    NameSeq c, d;
    for (std::size_t i = 0; i < f->vals.size(); ++i) {
        const Value &u = f->vals[i], &v = g->vals[i];
        if (u.is_var != v.is_var) return false;
        if (u.is_var) {
            if (u.var != v.var) return false;
        } else {
            c.push_back(u.name);
            d.push_back(v.name);
        }
    }
    auto ext = extend_match(inj, c, d);
    if (!ext) return false;
    inj = *ext;
    if (f->a && !match_formula(f->a, g->a, inj)) return false;
    if (f->b && !match_formula(f->b, g->b, inj)) return false;
    return true;
}
} // namespace detail

// a permutation mapping p1 onto p2, or nullopt
inline std::optional<Permutation> nominal_equiv_positions(const Position& p1, const Position& p2) {
    if (p1.cfg.H.size() != p2.cfg.H.size()) return std::nullopt;
    PartialInjection inj;
    if (!detail::match_formula(p1.phi, p2.phi, inj)) return std::nullopt;
    NameSeq a, b;
    for (auto& [x, y] : inj.fwd) {
        a.push_back(x);
        b.push_back(y);
    }
    auto pi = permutation_oracle({p1.cfg.q, p1.cfg.regs}, {p2.cfg.q, p2.cfg.regs}, a, b);
    if (!pi) return std::nullopt;
    NameSet act1 = active_names(p1.cfg, p1.phi), act2 = active_names(p2.cfg, p2.phi);
    NameSeq extra1, extra2;
    for (Name x : p1.cfg.H)
        if (!act1.count(x)) extra1.push_back(x);
    for (Name y : p2.cfg.H)
        if (!act2.count(y)) extra2.push_back(y);
    if (extra1.size() != extra2.size()) return std::nullopt;
    // active history names must correspond as well
    for (Name x : act1)
        if (p1.cfg.H.count(x) != p2.cfg.H.count((*pi)(x))) return std::nullopt;
    PartialInjection full;
    for (Name x : act1) {
        full.fwd[x] = (*pi)(x);
        full.inv[(*pi)(x)] = x;
    }
    auto ext = extend_match(full, extra1, extra2);
    if (!ext) return std::nullopt;
    Permutation w = ext->completed();
    if (!same_position(act(w, p1), p2)) return std::nullopt;
    return w;
}

} // namespace fhml
