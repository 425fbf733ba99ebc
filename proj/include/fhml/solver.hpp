#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace fhml {

enum class Player { Defender, Attacker };

inline Player opponent(Player p) { return p == Player::Defender ? Player::Attacker : Player::Defender; }
inline char player_char(Player p) { return p == Player::Defender ? 'D' : 'A'; }

/** Bare parity game graph. Dead-ends lose for their owner. */
struct Arena {
    std::vector<Player> owner;
    std::vector<int> rank;
    std::vector<std::vector<int>> succ;

    int size() const { return static_cast<int>(owner.size()); }
    int add(Player p, int r) {
        owner.push_back(p);
        rank.push_back(r);
        succ.emplace_back();
        return size() - 1;
    }
};

struct WinningRegions {
    std::vector<char> defender; // 1 if Defender wins from the position
    std::vector<int> strategy;  // chosen successor for the region owner, -1 when unused

    bool defender_wins(int v) const { return defender.at(v) != 0; }
};

namespace detail {

using Mask = std::vector<char>;

// positions from which p forces a visit to `target`, staying inside `live`;
// strategy receives p's attracting moves
inline Mask attract(const Arena& g, const Mask& live, const Mask& target, Player p, std::vector<int>& strat) {
    int n = g.size();
    std::vector<std::vector<int>> pred(n);
    std::vector<int> count(n, 0);
    for (int v = 0; v < n; ++v) {
        if (!live[v]) continue;
        for (int w : g.succ[v])
            if (live[w]) {
                pred[w].push_back(v);
                ++count[v];
            }
    }
    Mask in(n, 0);
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (live[v] && (target[v] || (g.owner[v] != p && count[v] == 0))) {
            in[v] = 1;
            queue.push_back(v);
        }
    for (std::size_t i = 0; i < queue.size(); ++i) {
        int w = queue[i];
        for (int v : pred[w]) {
            if (in[v]) continue;
            if (g.owner[v] == p) {
                in[v] = 1;
                strat[v] = w;
                queue.push_back(v);
            } else if (--count[v] == 0) {
                in[v] = 1;
                queue.push_back(v);
            }
        }
    }
    return in;
}

inline bool empty(const Mask& m) { return std::find(m.begin(), m.end(), 1) == m.end(); }

inline Mask minus(const Mask& a, const Mask& b) {
    Mask r(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] && !b[i];
    return r;
}

// Defender region of `live`; `live` must have no dead-ends
inline Mask zielonka(const Arena& g, const Mask& live, std::vector<int>& strat) {
    int n = g.size();
    int d = -1;
    for (int v = 0; v < n; ++v)
        if (live[v]) d = std::max(d, g.rank[v]);
    if (d < 0) return Mask(n, 0);
    Player p = d % 2 == 0 ? Player::Defender : Player::Attacker;
    Mask top(n, 0);
    for (int v = 0; v < n; ++v)
        if (live[v] && g.rank[v] == d) top[v] = 1;
    std::vector<int> s1 = strat;
    Mask a = attract(g, live, top, p, s1);
    Mask rest = minus(live, a);
    std::vector<int> s2 = strat;
    Mask wd = zielonka(g, rest, s2);
    Mask w_opp(n, 0);
    for (int v = 0; v < n; ++v)
        if (rest[v]) w_opp[v] = (p == Player::Defender) ? !wd[v] : wd[v];
    if (empty(w_opp)) {
        // p wins everything in live
        for (int v = 0; v < n; ++v) {
            if (!live[v] || g.owner[v] != p) continue;
            if (rest[v]) strat[v] = s2[v];
            else if (!top[v]) strat[v] = s1[v];
            else
                for (int w : g.succ[v])
                    if (live[w]) {
                        strat[v] = w;
                        break;
                    }
        }
        return p == Player::Defender ? live : Mask(n, 0);
    }
    Player q = opponent(p);
    std::vector<int> s3 = strat;
    Mask b = attract(g, live, w_opp, q, s3);
    Mask rest2 = minus(live, b);
    std::vector<int> s4 = strat;
    Mask wd2 = zielonka(g, rest2, s4);
    Mask result(n, 0);
    for (int v = 0; v < n; ++v) {
        if (!live[v]) continue;
        if (rest2[v]) {
            result[v] = wd2[v];
            strat[v] = s4[v];
        } else {
            result[v] = q == Player::Defender;
            if (g.owner[v] == q) strat[v] = w_opp[v] ? s2[v] : s3[v];
        }
    }
    return result;
}

} // namespace detail

inline WinningRegions solve(const Arena& g) {
    int n = g.size();
    std::vector<int> strat(n, -1);
    detail::Mask all(n, 1), none(n, 0);
    // dead-end attractors first; what remains has no dead-ends
    detail::Mask wd0 = detail::attract(g, all, none, Player::Defender, strat);
    detail::Mask live = detail::minus(all, wd0);
    detail::Mask wa0 = detail::attract(g, live, none, Player::Attacker, strat);
    live = detail::minus(live, wa0);
    detail::Mask wd = detail::zielonka(g, live, strat);
    WinningRegions r;
    r.defender.assign(n, 0);
    r.strategy.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        r.defender[v] = wd0[v] || (live[v] && wd[v]);
        bool mine = (g.owner[v] == Player::Defender) == (r.defender[v] != 0);
        if (mine) r.strategy[v] = strat[v];
    }
    return r;
}

// positions Attacker wins once Defender's choices are fixed by `choice`
inline std::vector<char> attacker_wins_against(const Arena& g, const std::vector<int>& choice) {
    int n = g.size();
    std::vector<std::vector<int>> out(n);
    for (int v = 0; v < n; ++v) {
        if (g.owner[v] == Player::Defender) {
            if (choice[v] >= 0) out[v].push_back(choice[v]);
        } else {
            out[v] = g.succ[v];
        }
    }
    // bad sinks: Defender positions without moves
    std::vector<char> bad(n, 0);
    for (int v = 0; v < n; ++v)
        if (g.owner[v] == Player::Defender && out[v].empty()) bad[v] = 1;
    // bad cycles: some odd rank r on a cycle through positions of rank <= r
    for (int v = 0; v < n; ++v) {
        int r = g.rank[v];
        if (r % 2 == 0 || bad[v]) continue;
        std::vector<char> seen(n, 0);
        std::vector<int> stack;
        for (int w : out[v])
            if (g.rank[w] <= r) stack.push_back(w);
        bool cyc = false;
        while (!stack.empty() && !cyc) {
            int u = stack.back();
            stack.pop_back();
            if (u == v) cyc = true;
            if (seen[u]) continue;
            seen[u] = 1;
            for (int w : out[u])
                if (g.rank[w] <= r) stack.push_back(w);
        }
        if (cyc) bad[v] = 1;
    }
    // Attacker wins from anything that can reach a bad spot
    std::vector<char> win(n, 0);
    std::vector<std::vector<int>> pred(n);
    for (int v = 0; v < n; ++v)
        for (int w : out[v]) pred[w].push_back(v);
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (bad[v]) {
            win[v] = 1;
            queue.push_back(v);
        }
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (int u : pred[queue[i]])
            if (!win[u]) {
                win[u] = 1;
                queue.push_back(u);
            }
    return win;
}

// exhaustive search over positional Defender strategies
inline WinningRegions brute_force_solve(const Arena& g) {
    int n = g.size();
    if (n > 14) throw std::invalid_argument("brute force solving is limited to 14 positions");
    std::vector<int> dpos;
    for (int v = 0; v < n; ++v)
        if (g.owner[v] == Player::Defender && !g.succ[v].empty()) dpos.push_back(v);
    WinningRegions r;
    r.defender.assign(n, 0);
    r.strategy.assign(n, -1);
    std::vector<int> idx(dpos.size(), 0), choice(n, -1);
    while (true) {
        for (std::size_t i = 0; i < dpos.size(); ++i) choice[dpos[i]] = g.succ[dpos[i]][idx[i]];
        auto lose = attacker_wins_against(g, choice);
        for (int v = 0; v < n; ++v)
            if (!lose[v]) r.defender[v] = 1;
        std::size_t k = 0;
        while (k < dpos.size() && ++idx[k] == static_cast<int>(g.succ[dpos[k]].size())) idx[k++] = 0;
        if (k == dpos.size()) break;
    }
    return r;
}

inline Player winner(const Arena& g, int root) {
    return solve(g).defender_wins(root) ? Player::Defender : Player::Attacker;
}

} // namespace fhml
