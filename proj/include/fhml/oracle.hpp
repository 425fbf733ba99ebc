#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "fra.hpp"
#include "logic.hpp"
#include "nominal.hpp"

namespace fhml {

/** Bitset over an indexed configuration list. */
class ConfigSet {
    std::vector<std::uint64_t> w_;
    std::size_t n_ = 0;

public:
    ConfigSet() = default;
    explicit ConfigSet(std::size_t n, bool full = false) : w_((n + 63) / 64, full ? ~0ULL : 0ULL), n_(n) {
        trim();
    }
    void trim() {
        if (n_ % 64 && !w_.empty()) w_.back() &= (1ULL << (n_ % 64)) - 1;
    }
    bool test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1ULL; }
    void set(std::size_t i) { w_[i / 64] |= 1ULL << (i % 64); }
    std::size_t universe() const { return n_; }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto x : w_) c += static_cast<std::size_t>(__builtin_popcountll(x));
        return c;
    }
    ConfigSet& operator|=(const ConfigSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    ConfigSet& operator&=(const ConfigSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    ConfigSet complement() const {
        ConfigSet r = *this;
        for (auto& x : r.w_) x = ~x;
        r.trim();
        return r;
    }
    friend bool operator==(const ConfigSet&, const ConfigSet&) = default;
};

// all (q, rho, H) with H drawn from the pool, |H| <= hmax
inline std::vector<Config> enumerate_configs(const Fra& fra, const NameSet& pool, int hmax) {
    NameSeq names(pool.begin(), pool.end());
    std::size_t P = names.size();
    std::vector<Config> out;
    for (std::size_t q = 0; q < fra.states.size(); ++q) {
        std::vector<int> regs(fra.avail[q].begin(), fra.avail[q].end());
        for (std::uint64_t m = 0; m < (1ULL << P); ++m) {
            if (__builtin_popcountll(m) > hmax) continue;
            NameSeq H;
            for (std::size_t i = 0; i < P; ++i)
                if (m >> i & 1ULL) H.push_back(names[i]);
            // injective register fillings from H
            std::vector<int> pick(regs.size(), 0);
            std::function<void(std::size_t, Regs&, std::vector<char>&)> fill = [&](std::size_t k, Regs& rho,
                                                                                   std::vector<char>& taken) {
                if (k == regs.size()) {
                    out.push_back({static_cast<int>(q), rho, NameSet(H.begin(), H.end())});
                    return;
                }
                for (std::size_t j = 0; j < H.size(); ++j) {
                    if (taken[j]) continue;
                    taken[j] = 1;
                    rho[regs[k]] = H[j];
                    fill(k + 1, rho, taken);
                    rho.erase(regs[k]);
                    taken[j] = 0;
                }
            };
            Regs rho;
            std::vector<char> taken(H.size(), 0);
            fill(0, rho, taken);
        }
    }
    return out;
}

/**
 * Denotational evaluation over a finite pool of names. Histories that outgrow
 * the grade are cut back to grade+1 names, keeping every name the formula still
 * refers to and filling up with the largest remaining ones.
 */
class Oracle {
    const Fra& fra_;
    NameSet pool_;
    NameSeq names_;
    int N_, hmax_;
    std::vector<Config> configs_;
    std::unordered_map<std::uint64_t, int> index_;
    struct Raw {
        std::uint64_t key;
        std::uint64_t regmask;
    };
    std::map<std::string, std::vector<std::vector<int>>> succ_cache_;
    std::map<std::string, std::vector<std::vector<Raw>>> raw_cache_;

    struct Binding {
        std::map<NameSeq, ConfigSet>* fn;
        NameSet names; // support of the defining fixpoint, outer definitions included
    };
    std::map<std::string, std::vector<Binding>> env_;

    std::uint64_t key(const Config& c) const {
        std::uint64_t k = static_cast<std::uint64_t>(c.q);
        std::uint64_t hm = 0;
        for (Name a : c.H) hm |= 1ULL << pos(a);
        k |= hm << 8;
        int sh = 8 + static_cast<int>(names_.size());
        for (auto& [i, a] : c.regs) {
            k |= static_cast<std::uint64_t>(pos(a) + 1) << (sh + 5 * (i - 1));
        }
        return k;
    }
    std::size_t pos(Name a) const {
        auto it = std::lower_bound(names_.begin(), names_.end(), a);
        if (it == names_.end() || *it != a) throw Error("name " + name_str(a) + " lies outside the pool");
        return static_cast<std::size_t>(it - names_.begin());
    }

    const Binding& lookup(const std::string& X) const {
        auto it = env_.find(X);
        if (it == env_.end() || it->second.empty()) throw Error("unbound recursion variable " + X);
        return it->second.back();
    }

    // names of f with the definitions of its free recursion variables
    NameSet expanded_support(const Formula& f) const {
        NameSet s = support(f);
        for (auto& X : free_rec_vars(f)) {
            const auto& b = lookup(X);
            s.insert(b.names.begin(), b.names.end());
        }
        return s;
    }

    NameSet env_support() const {
        NameSet s;
        for (auto& [X, stack] : env_)
            for (auto& b : stack) s.insert(b.names.begin(), b.names.end());
        return s;
    }

    std::uint64_t mask_of(const NameSet& s) const {
        std::uint64_t m = 0;
        for (Name a : s)
            if (std::binary_search(names_.begin(), names_.end(), a)) m |= 1ULL << pos(a);
        return m;
    }

    // untrimmed successors per configuration, shared by every keep set
    const std::vector<std::vector<Raw>>& raw_successors(const std::string& tag, Name a) {
        std::string ck = tag + "/" + std::to_string(a);
        auto it = raw_cache_.find(ck);
        if (it != raw_cache_.end()) return it->second;
        std::vector<std::vector<Raw>> table(configs_.size());
        for (std::size_t i = 0; i < configs_.size(); ++i)
            for (auto& d : step(fra_, configs_[i], tag, a)) table[i].push_back({key(d), mask_of(reg_names(d.regs))});
        return raw_cache_[ck] = std::move(table);
    }

    // cut a history beyond the grade back to N+1 names: kept names first, then the largest others
    std::uint64_t cut(std::uint64_t k, std::uint64_t regmask, std::uint64_t keep) const {
        std::uint64_t hm = (k >> 8) & ((1ULL << names_.size()) - 1);
        if (__builtin_popcountll(hm) <= N_) return k;
        std::uint64_t out = hm & (keep | regmask);
        for (int i = static_cast<int>(names_.size()) - 1; i >= 0 && __builtin_popcountll(out) < N_ + 1; --i)
            if (hm >> i & 1ULL) out |= 1ULL << i;
        return (k & ~(((1ULL << names_.size()) - 1) << 8)) | (out << 8);
    }

    const std::vector<std::vector<int>>& successors(const std::string& tag, Name a, const NameSet& keep) {
        std::uint64_t km = mask_of(keep);
        std::string ck = tag + "/" + std::to_string(a) + "/" + std::to_string(km);
        auto it = succ_cache_.find(ck);
        if (it != succ_cache_.end()) return it->second;
        const auto& raw = raw_successors(tag, a);
        std::vector<std::vector<int>> table(configs_.size());
        for (std::size_t i = 0; i < configs_.size(); ++i)
            for (auto& r : raw[i]) {
                auto jt = index_.find(cut(r.key, r.regmask, km));
                if (jt == index_.end()) throw Error("successor history exceeds the enumerated bound");
                table[i].push_back(jt->second);
            }
        return succ_cache_[ck] = std::move(table);
    }

    static Name name_of(const Value& v) {
        if (v.is_var) throw Error("evaluation needs a firm formula, found variable " + v.var);
        return v.name;
    }

public:
    Oracle(const Fra& fra, NameSet pool, int N, int hmax)
        : fra_(fra), pool_(std::move(pool)), names_(pool_.begin(), pool_.end()), N_(N), hmax_(hmax) {
        if (names_.size() > 20 || fra.r > 7) throw Error("pool or register count too large for the oracle");
        configs_ = enumerate_configs(fra, pool_, hmax);
        for (std::size_t i = 0; i < configs_.size(); ++i) index_[key(configs_[i])] = static_cast<int>(i);
    }

    const std::vector<Config>& configs() const { return configs_; }
    const NameSet& pool() const { return pool_; }

    int index_of(const Config& c) const {
        auto it = index_.find(key(c));
        if (it == index_.end()) throw Error("configuration outside the enumerated set");
        return it->second;
    }

    ConfigSet eval(const Formula& f) {
        std::size_t n = configs_.size();
        switch (f->op) {
        case Op::Eq: return ConfigSet(n, name_of(f->vals[0]) == name_of(f->vals[1]));
        case Op::Neq: return ConfigSet(n, name_of(f->vals[0]) != name_of(f->vals[1]));
        case Op::Or: {
            ConfigSet s = eval(f->a);
            s |= eval(f->b);
            return s;
        }
        case Op::And: {
            ConfigSet s = eval(f->a);
            s &= eval(f->b);
            return s;
        }
        case Op::Not: return eval(f->a).complement();
        case Op::BigOr:
        case Op::BigAnd: {
            bool any = f->op == Op::BigOr;
            ConfigSet s(n, !any);
            for (Name a : names_) {
                ConfigSet t = eval(subst_values(f->a, {{{f->x}, {a}}}));
                if (any) s |= t;
                else s &= t;
            }
            return s;
        }
        case Op::Fresh: {
            NameSet avoid = support(f);
            NameSet es = env_support();
            avoid.insert(es.begin(), es.end());
            ConfigSet s(n);
            for (Name a : names_) {
                if (avoid.count(a)) continue;
                ConfigSet t = eval(subst_values(f->a, {{{f->x}, {a}}}));
                for (std::size_t i = 0; i < n; ++i)
                    if (t.test(i) && !configs_[i].H.count(a)) s.set(i);
            }
            return s;
        }
        case Op::Diamond:
        case Op::Box: {
            if (f->vals.size() != 1) throw Error("automaton labels carry exactly one name");
            Name a = name_of(f->vals[0]);
            ConfigSet target = eval(f->a);
            const auto& table = successors(f->tag, a, expanded_support(f->a));
            bool dia = f->op == Op::Diamond;
            ConfigSet s(n);
            for (std::size_t i = 0; i < n; ++i) {
                bool ok = !dia;
                for (int j : table[i]) {
                    if (dia && target.test(j)) ok = true;
                    if (!dia && !target.test(j)) ok = false;
                }
                if (ok) s.set(i);
            }
            return s;
        }
        case Op::Mu:
        case Op::Nu: {
            std::size_t k = f->params.size();
            std::vector<NameSeq> tuples{{}};
            for (std::size_t d = 0; d < k; ++d) {
                std::vector<NameSeq> next;
                for (auto& t : tuples)
                    for (Name a : names_) {
                        NameSeq u = t;
                        u.push_back(a);
                        next.push_back(u);
                    }
                tuples = std::move(next);
            }
            std::map<NameSeq, ConfigSet> fn;
            for (auto& t : tuples) fn[t] = ConfigSet(n, f->op == Op::Nu);
            NameSet defs = support(f->a);
            for (auto& Y : free_rec_vars(f->a))
                if (Y != f->rec) {
                    const auto& b = lookup(Y);
                    defs.insert(b.names.begin(), b.names.end());
                }
            env_[f->rec].push_back({&fn, defs});
            bool changed = true;
            while (changed) {
                changed = false;
                std::map<NameSeq, ConfigSet> next;
                for (auto& t : tuples) next[t] = eval(subst_values(f->a, {{f->params, t}}));
                if (next != fn) {
                    fn = std::move(next);
                    changed = true;
                }
            }
            env_[f->rec].pop_back();
            NameSeq args;
            for (auto& v : f->vals) args.push_back(name_of(v));
            return fn.at(args);
        }
        case Op::Var: {
            NameSeq args;
            for (auto& v : f->vals) args.push_back(name_of(v));
            return lookup(f->rec).fn->at(args);
        }
        }
        return ConfigSet(n);
    }

    bool holds(const Formula& f, const Config& c) { return eval(f).test(static_cast<std::size_t>(index_of(c))); }
};

// grade-like measure of a formula that may still contain negation
inline int oracle_grade(const Formula& f, const Fra& fra) {
    return static_cast<int>(support(f).size()) + bounding_depth(f) + register_index(fra);
}

inline int oracle_hmax(const Formula& f, const Fra& fra, const NameSet& H0) {
    return std::max(static_cast<int>(H0.size()), oracle_grade(f, fra) + 1);
}

// supp(phi) and H0, topped up so that a history, the names of a formula and
// one spare name always fit: |pool| >= hmax + M + 1
inline NameSet default_pool(const Formula& f, const Fra& fra, const NameSet& H0) {
    int M = static_cast<int>(support(f).size()) + bounding_depth(f);
    std::size_t want = static_cast<std::size_t>(oracle_hmax(f, fra, H0) + M + 1);
    NameSet pool = support(f);
    pool.insert(H0.begin(), H0.end());
    while (pool.size() < want) pool.insert(smallest_outside(pool));
    return pool;
}

// membership of s0 in the formula's denotation under the default pool
inline bool oracle_holds(const Fra& fra, const Formula& f, const Config& s0) {
    Oracle o(fra, default_pool(f, fra, s0.H), oracle_grade(f, fra), oracle_hmax(f, fra, s0.H));
    return o.holds(f, s0);
}

// compares the two readings of a negated fresh quantifier
inline bool check_self_duality(const Formula& fresh_phi, const Fra& fra, const NameSet& pool, int N, int hmax) {
    if (fresh_phi->op != Op::Fresh) throw Error("self-duality check expects a fresh quantifier");
    Oracle o(fra, pool, N, hmax);
    Formula lhs = mk::lnot(fresh_phi);
    Formula rhs = mk::fresh(fresh_phi->x, mk::lnot(fresh_phi->a));
    return o.eval(lhs) == o.eval(rhs);
}

} // namespace fhml
