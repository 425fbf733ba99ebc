#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "logic.hpp"
#include "nominal.hpp"

namespace fhml {

enum class Kind { Read, LFresh, GFresh };

inline std::string to_string(Kind k) {
    switch (k) {
    case Kind::Read: return "read";
    case Kind::LFresh: return "lfresh";
    case Kind::GFresh: return "gfresh";
    }
    return {};
}

struct Transition {
    int from = 0;
    std::string tag;
    Kind kind = Kind::Read;
    int reg = 1;
    int to = 0;
};

/** Fresh-register automaton. Registers are numbered from 1. */
struct Fra {
    int r = 0;
    std::vector<std::string> states;
    std::vector<std::set<int>> avail;
    Signature tags;
    std::vector<Transition> delta;

    int state_index(const std::string& q) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == q) return static_cast<int>(i);
        return -1;
    }
};

using Regs = std::map<int, Name>;

struct Config {
    int q = 0;
    Regs regs;
    NameSet H;

    friend bool operator==(const Config&, const Config&) = default;
    friend auto operator<=>(const Config&, const Config&) = default;
};

inline NameSet reg_names(const Regs& r) {
    NameSet s;
    for (auto& kv : r) s.insert(kv.second);
    return s;
}

inline NameSet support(const Config& c) {
    NameSet s = c.H;
    for (auto& kv : c.regs) s.insert(kv.second);
    return s;
}

inline Config act(const Permutation& p, const Config& c) {
    Config d{c.q, {}, act(p, c.H)};
    for (auto& [i, a] : c.regs) d.regs[i] = p(a);
    return d;
}

inline std::string to_string(const Fra& fra, const Config& c) {
    std::string r = "(" + fra.states[c.q] + ",[";
    bool first = true;
    for (auto& [i, a] : c.regs) {
        r += (first ? "" : ",") + std::to_string(i) + ":" + name_str(a);
        first = false;
    }
    return r + "]," + to_string(c.H) + ")";
}

inline std::vector<std::string> validate(const Fra& fra) {
    std::vector<std::string> errs;
    if (fra.avail.size() != fra.states.size()) errs.push_back("availability table does not match state list");
    for (std::size_t q = 0; q < fra.avail.size(); ++q)
        for (int i : fra.avail[q])
            if (i < 1 || i > fra.r)
                errs.push_back("state " + fra.states[q] + " lists register " + std::to_string(i) + " outside 1.." +
                               std::to_string(fra.r));
    for (auto& [t, ar] : fra.tags)
        if (ar != 1) errs.push_back("tag " + t + " has arity " + std::to_string(ar) + ", automata need arity 1");
    for (auto& tr : fra.delta) {
        std::string where = "transition " + fra.states.at(tr.from) + " " + tr.tag + " " + to_string(tr.kind) + "(" +
                            std::to_string(tr.reg) + ") " + fra.states.at(tr.to) + ": ";
        if (!fra.tags.count(tr.tag)) errs.push_back(where + "undeclared tag");
        if (tr.reg < 1 || tr.reg > fra.r) {
            errs.push_back(where + "register out of range");
            continue;
        }
        const auto& src = fra.avail[tr.from];
        const auto& dst = fra.avail[tr.to];
        if (tr.kind == Kind::Read) {
            if (!src.count(tr.reg)) errs.push_back(where + "reads a register unavailable in the source");
            if (!std::includes(src.begin(), src.end(), dst.begin(), dst.end()))
                errs.push_back(where + "target availability not contained in source availability");
        } else {
            std::set<int> allowed = src;
            allowed.insert(tr.reg);
            if (!std::includes(allowed.begin(), allowed.end(), dst.begin(), dst.end()))
                errs.push_back(where + "target availability exceeds source plus the written register");
        }
    }
    return errs;
}

inline int register_index(const Fra& fra) {
    std::size_t m = 0;
    for (auto& s : fra.avail) m = std::max(m, s.size());
    return static_cast<int>(m);
}

// checks the configuration invariants for fra
inline bool well_formed(const Fra& fra, const Config& c) {
    if (c.q < 0 || c.q >= static_cast<int>(fra.states.size())) return false;
    std::set<int> dom;
    for (auto& kv : c.regs) dom.insert(kv.first);
    if (dom != fra.avail[c.q]) return false;
    NameSet range = reg_names(c.regs);
    if (range.size() != c.regs.size()) return false;
    return std::includes(c.H.begin(), c.H.end(), range.begin(), range.end());
}

inline std::vector<Config> step(const Fra& fra, const Config& c, const std::string& tag, Name a) {
    std::vector<Config> out;
    NameSet range = reg_names(c.regs);
    for (auto& tr : fra.delta) {
        if (tr.from != c.q || tr.tag != tag) continue;
        Regs next;
        if (tr.kind == Kind::Read) {
            auto it = c.regs.find(tr.reg);
            if (it == c.regs.end() || it->second != a) continue;
            next = c.regs;
        } else {
            if (tr.kind == Kind::LFresh && range.count(a)) continue;
            if (tr.kind == Kind::GFresh && c.H.count(a)) continue;
            next = c.regs;
            next[tr.reg] = a;
        }
        Config d{tr.to, {}, c.H};
        d.H.insert(a);
        for (int i : fra.avail[tr.to]) d.regs[i] = next.at(i);
        out.push_back(std::move(d));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct Move {
    std::string tag;
    Name name;
    Config target;
};

// one successor per name class: protected and register names, one old name, one new name
inline std::vector<Move> representative_successors(const Fra& fra, const Config& c, const NameSet& prot) {
    NameSet cands = prot;
    for (auto& kv : c.regs) cands.insert(kv.second);
    for (Name a : c.H)
        if (!cands.count(a)) {
            cands.insert(a);
            break;
        }
    NameSet used = c.H;
    used.insert(prot.begin(), prot.end());
    cands.insert(smallest_outside(used));
    std::vector<Move> out;
    std::set<std::string> tags;
    for (auto& tr : fra.delta)
        if (tr.from == c.q) tags.insert(tr.tag);
    for (auto& t : tags)
        for (Name a : cands)
            for (auto& d : step(fra, c, t, a)) out.push_back({t, a, d});
    return out;
}

struct RegState {
    int q = 0;
    Regs regs;
};

// a permutation sending s1 to s2 and a to b, or nullopt
inline std::optional<Permutation> permutation_oracle(const RegState& s1, const RegState& s2, const NameSeq& a,
                                                     const NameSeq& b) {
    if (s1.q != s2.q || s1.regs.size() != s2.regs.size()) return std::nullopt;
    NameSeq c, d;
    for (auto& [i, x] : s1.regs) {
        auto it = s2.regs.find(i);
        if (it == s2.regs.end()) return std::nullopt;
        c.push_back(x);
        d.push_back(it->second);
    }
    auto inj = extend_match({}, a, b);
    if (!inj) return std::nullopt;
    inj = extend_match(*inj, c, d);
    if (!inj) return std::nullopt;
    return inj->completed();
}

} // namespace fhml
