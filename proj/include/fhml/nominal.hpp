#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fhml {

// atoms are plain integers, printed as #n
using Name = std::uint32_t;
using NameSet = std::set<Name>;
using NameSeq = std::vector<Name>;

inline std::string name_str(Name a) { return "#" + std::to_string(a); }

// smallest name outside `used`
inline Name smallest_outside(const NameSet& used) {
    Name a = 0;
    for (Name b : used) {
        if (b != a) break;
        ++a;
    }
    return a;
}

/** Finite permutation of names. Only moved names are stored. */
class Permutation {
    std::map<Name, Name> fwd_, inv_;

public:
    Permutation() = default;

    // pairs must form a bijection on their domain
    static Permutation from_pairs(const std::map<Name, Name>& m) {
        Permutation p;
        for (auto [a, b] : m)
            if (a != b) {
                p.fwd_[a] = b;
                p.inv_[b] = a;
            }
        return p;
    }

    Name operator()(Name a) const {
        auto it = fwd_.find(a);
        return it == fwd_.end() ? a : it->second;
    }
    Name inverse(Name a) const {
        auto it = inv_.find(a);
        return it == inv_.end() ? a : it->second;
    }
    Permutation inverted() const {
        Permutation p;
        p.fwd_ = inv_;
        p.inv_ = fwd_;
        return p;
    }

    bool is_identity() const { return fwd_.empty(); }
    const std::map<Name, Name>& moved() const { return fwd_; }

    NameSet domain() const {
        NameSet s;
        for (auto& kv : fwd_) s.insert(kv.first);
        return s;
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.fwd_ == b.fwd_; }
};

inline Permutation identity() { return {}; }

inline Permutation swap(Name a, Name b) {
    if (a == b) return {};
    return Permutation::from_pairs({{a, b}, {b, a}});
}

// (compose(p1,p2))(a) = p1(p2(a))
inline Permutation compose(const Permutation& p1, const Permutation& p2) {
    NameSet dom = p1.domain();
    for (auto& kv : p2.moved()) dom.insert(kv.first);
    std::map<Name, Name> m;
    for (Name a : dom) m[a] = p1(p2(a));
    return Permutation::from_pairs(m);
}

inline Name act(const Permutation& p, Name a) { return p(a); }

inline NameSet act(const Permutation& p, const NameSet& s) {
    NameSet r;
    for (Name a : s) r.insert(p(a));
    return r;
}

inline NameSeq act(const Permutation& p, const NameSeq& s) {
    NameSeq r;
    r.reserve(s.size());
    for (Name a : s) r.push_back(p(a));
    return r;
}

inline NameSet support(const NameSet& s) { return s; }
inline NameSet support(const NameSeq& s) { return {s.begin(), s.end()}; }

/** Injective partial map, kept in both directions. */
struct PartialInjection {
    std::map<Name, Name> fwd, inv;

    bool maps(Name a) const { return fwd.count(a) != 0; }
    bool hits(Name b) const { return inv.count(b) != 0; }
    std::size_t size() const { return fwd.size(); }

    // close the injection into a permutation; unmatched targets are sent back to unmatched sources
    Permutation completed() const {
        std::vector<Name> taken, freed;
        for (auto& kv : inv)
            if (!fwd.count(kv.first)) taken.push_back(kv.first);
        for (auto& kv : fwd)
            if (!inv.count(kv.first)) freed.push_back(kv.first);
        std::map<Name, Name> m = fwd;
        for (std::size_t i = 0; i < taken.size(); ++i) m[taken[i]] = freed[i];
        return Permutation::from_pairs(m);
    }

    friend bool operator==(const PartialInjection&, const PartialInjection&) = default;
};

// extend inj so that c maps pointwise onto d; nullopt is the NO answer
inline std::optional<PartialInjection> extend_match(PartialInjection inj, const NameSeq& c,
                                                    const NameSeq& d) {
    if (c.size() != d.size()) return std::nullopt;
    for (std::size_t i = 0; i < c.size(); ++i) {
        bool in_a = inj.maps(c[i]), in_b = inj.hits(d[i]);
        if (in_a && in_b) {
            if (inj.fwd[c[i]] != d[i]) return std::nullopt;
        } else if (!in_a && !in_b) {
            inj.fwd[c[i]] = d[i];
            inj.inv[d[i]] = c[i];
        } else {
            return std::nullopt;
        }
    }
    return inj;
}

// renaming for a first-occurrence sequence: non-protected names go to the
// smallest names outside `prot`, in order
inline Permutation canonical_permutation(const NameSeq& order, const NameSet& prot) {
    PartialInjection inj;
    Name next = 0;
    for (Name a : order) {
        if (prot.count(a) || inj.maps(a)) continue;
        while (prot.count(next)) ++next;
        inj.fwd[a] = next;
        inj.inv[next] = a;
        ++next;
    }
    for (Name a : prot) {
        // protected names stay put
        inj.fwd.emplace(a, a);
        inj.inv.emplace(a, a);
    }
    return inj.completed();
}

inline std::pair<NameSet, Permutation> canonical_renaming(const NameSet& s, const NameSet& prot) {
    Permutation p = canonical_permutation(NameSeq(s.begin(), s.end()), prot);
    return {act(p, s), p};
}

inline std::string to_string(const NameSet& s) {
    std::string r = "{";
    bool first = true;
    for (Name a : s) {
        if (!first) r += ",";
        r += name_str(a);
        first = false;
    }
    return r + "}";
}

inline std::string to_string(const Permutation& p) {
    std::string r = "[";
    bool first = true;
    for (auto [a, b] : p.moved()) {
        if (!first) r += " ";
        r += name_str(a) + "->" + name_str(b);
        first = false;
    }
    return r + "]";
}

} // namespace fhml
