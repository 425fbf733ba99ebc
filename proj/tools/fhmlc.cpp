#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fhml/check.hpp"
#include "fhml/parse.hpp"

using namespace fhml;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Fra load_fra(const std::string& path) {
    try {
        return parse_fra(slurp(path));
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

Formula load_formula(const std::string& text, const Signature* sig) {
    try {
        return parse_formula(text, sig);
    } catch (const Error& e) {
        throw Error(std::string("formula: ") + e.what());
    }
}

struct Start {
    std::string state;
    std::string regs;
    std::string history;
};

Config start_config(const Fra& fra, const Start& st) {
    Config c;
    c.q = fra.state_index(st.state);
    if (c.q < 0) throw Error("unknown state " + st.state);
    c.regs = parse_regs(st.regs);
    c.H = st.history.empty() ? reg_names(c.regs) : parse_names(st.history);
    if (!well_formed(fra, c))
        throw Error("start configuration " + to_string(fra, c) + " does not match the availability of " + st.state);
    return c;
}

std::string bound_str(long double b) {
    std::ostringstream os;
    if (b < 1e15L) os << std::fixed << std::setprecision(0) << b;
    else os << std::scientific << std::setprecision(3) << static_cast<double>(b);
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model checker for fresh Hennessy-Milner logic with recursion over fresh-register automata"};
    app.require_subcommand(1);

    std::string model, formula, dump;
    Start st;
    bool as_json = false, with_oracle = false;
    long max_positions = 2000000;

    auto add_setup = [&](CLI::App* cmd) {
        cmd->add_option("model", model, "automaton file")->required();
        cmd->add_option("--formula,-f", formula, "formula text")->required();
        cmd->add_option("--state,-s", st.state, "start state")->required();
        cmd->add_option("--regs", st.regs, "register contents, e.g. 1=#0,2=#1");
        cmd->add_option("--history", st.history, "history names, e.g. #0,#1 (default: register contents)");
        cmd->add_option("--max-positions", max_positions, "abort once the game grows past this many positions");
    };

    auto* check = app.add_subcommand("check", "decide whether the start configuration satisfies the formula");
    add_setup(check);
    check->add_flag("--json", as_json, "machine-readable result");
    check->add_flag("--oracle", with_oracle, "also evaluate over a finite name pool and compare");
    check->add_option("--dump-game", dump, "write the orbit game to FILE");

    auto* stats = app.add_subcommand("stats", "game size against its orbit bound");
    add_setup(stats);

    std::string text, model_for_sig;
    auto* negfree = app.add_subcommand("negfree", "print the negation-free form");
    negfree->add_option("formula", text, "formula text")->required();
    negfree->add_option("--model", model_for_sig, "automaton whose tags to check against");

    auto* adepth = app.add_subcommand("adepth", "print the alternation depth");
    adepth->add_option("formula", text, "formula text")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*check || *stats) {
            Fra fra = load_fra(model);
            Formula f = load_formula(formula, &fra.tags);
            Config s0 = start_config(fra, st);
            CheckOptions opt;
            opt.max_positions = max_positions;
            opt.oracle = with_oracle && *check;
            ParityGame g;
            CheckResult r = check_formula(fra, f, s0, opt, &g);
            if (*stats) {
                std::cout << "positions " << r.stats.positions << "\n"
                          << "edges " << r.stats.edges << "\n"
                          << "max_rank " << r.stats.max_rank << "\n"
                          << "alternation_depth " << alternation_depth(r.phi) << "\n"
                          << "grade " << r.stats.N << "\n"
                          << "potential " << r.stats.M << "\n"
                          << "bound " << bound_str(r.stats.bound) << "\n"
                          << "within_bound " << (r.stats.positions <= r.stats.bound ? "yes" : "no") << "\n";
                return r.stats.positions <= r.stats.bound ? 0 : 1;
            }
            if (!dump.empty()) {
                std::ofstream out(dump);
                if (!out) throw Error("cannot write " + dump);
                dump_game(out, g);
            }
            const char* verdict = r.sat ? "SAT" : "UNSAT";
            if (as_json) {
                nlohmann::ordered_json j;
                j["verdict"] = verdict;
                j["positions"] = r.stats.positions;
                j["edges"] = r.stats.edges;
                j["max_rank"] = r.stats.max_rank;
                j["grade"] = r.stats.N;
                j["bound"] = static_cast<double>(r.stats.bound);
                j["millis"] = r.millis;
                if (r.oracle) j["oracle_agrees"] = *r.oracle == r.sat;
                std::cout << j.dump() << "\n";
            } else {
                std::cout << verdict << "\n";
                if (r.oracle) std::cout << "oracle " << (*r.oracle ? "SAT" : "UNSAT") << (*r.oracle == r.sat ? " (agrees)" : " (DISAGREES)") << "\n";
            }
            if (r.oracle && *r.oracle != r.sat) return 2;
            return r.sat ? 0 : 1;
        }
        if (*negfree) {
            std::optional<Fra> fra;
            if (!model_for_sig.empty()) fra = load_fra(model_for_sig);
            Formula f = load_formula(text, fra ? &fra->tags : nullptr);
            std::cout << to_string(prepare(f, fra ? &fra->tags : nullptr)) << "\n";
            return 0;
        }
        if (*adepth) {
            Formula f = load_formula(text, nullptr);
            std::cout << alternation_depth(prepare(f)) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
