#pragma once

#include <chrono>
#include <optional>

#include "fra.hpp"
#include "game.hpp"
#include "logic.hpp"
#include "oracle.hpp"
#include "solver.hpp"

namespace fhml {

// validated, binder-normalized, negation-free form of a closed formula
inline Formula prepare(const Formula& parsed, const Signature* sig = nullptr) {
    validate(parsed, sig);
    if (!is_closed(parsed)) throw Error("formula has free recursion variables");
    if (!is_firm(parsed)) throw Error("formula has free value variables");
    return negation_free(normalize_binders(parsed));
}

struct CheckOptions {
    long max_positions = 2000000;
    bool oracle = false;
};

struct CheckResult {
    bool sat = false;
    Formula phi;        // the formula the game was built for
    GameStats stats;
    double millis = 0;
    std::optional<bool> oracle; // oracle membership when requested
};

inline CheckResult check_formula(const Fra& fra, const Formula& parsed, const Config& s0, const CheckOptions& opt = {},
                         ParityGame* keep = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.phi = prepare(parsed, &fra.tags);
    ParityGame g = build_orbit_game(fra, r.phi, s0, opt.max_positions);
    r.sat = solve(g).defender_wins(g.root);
    r.stats = g.stats;
    r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (opt.oracle) r.oracle = oracle_holds(fra, r.phi, s0);
    if (keep) *keep = std::move(g);
    return r;
}

} // namespace fhml
