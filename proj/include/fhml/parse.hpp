#pragma once

#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fra.hpp"
#include "logic.hpp"

namespace fhml {

struct ParseError : Error {
    int line, col;
    ParseError(int l, int c, const std::string& msg)
        : Error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg), line(l), col(c) {}
};

namespace detail {

enum class Tok { Ident, Name, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

inline std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto adv = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
            continue;
        }
        int l = line, cc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\''))
                ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), l, cc});
            adv(j - i);
        } else if (c == '#') {
            std::size_t j = i + 1;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j == i + 1) throw ParseError(l, cc, "expected digits after '#'");
            out.push_back({Tok::Name, s.substr(i + 1, j - i - 1), l, cc});
            adv(j - i);
        } else if (c == '!' && i + 1 < s.size() && s[i + 1] == '=') {
            out.push_back({Tok::Sym, "!=", l, cc});
            adv(2);
        } else if (std::string("=|&!.,()<>[]:").find(c) != std::string::npos) {
            out.push_back({Tok::Sym, std::string(1, c), l, cc});
            adv(1);
        } else {
            throw ParseError(l, cc, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

inline bool is_keyword(const std::string& s) {
    return s == "some" || s == "all" || s == "fresh" || s == "mu" || s == "nu";
}

class FormulaParser {
    std::vector<Token> t_;
    std::size_t p_ = 0;
    const Signature* sig_;
    bool allow_free_;
    std::map<std::string, int> vals_;                // bound value variables with multiplicity
    std::map<std::string, std::vector<std::size_t>> recs_; // arity stack per recursion variable

    const Token& peek(std::size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
    bool at(const std::string& sym, std::size_t k = 0) const {
        return peek(k).kind == Tok::Sym && peek(k).text == sym;
    }
    [[noreturn]] void fail(const Token& tk, const std::string& msg) const { throw ParseError(tk.line, tk.col, msg); }
    std::string describe(const Token& tk) const {
        switch (tk.kind) {
        case Tok::End: return "end of input";
        case Tok::Name: return "'#" + tk.text + "'";
        default: return "'" + tk.text + "'";
        }
    }
    void expect(const std::string& sym) {
        if (!at(sym)) fail(peek(), "expected '" + sym + "' but found " + describe(peek()));
        ++p_;
    }
    static bool lower(const std::string& s) { return std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_'; }
    static bool upper(const std::string& s) { return std::isupper(static_cast<unsigned char>(s[0])); }

    std::string value_ident() {
        const Token& tk = peek();
        if (tk.kind != Tok::Ident || !lower(tk.text) || is_keyword(tk.text))
            fail(tk, "expected a value variable but found " + describe(tk));
        ++p_;
        return tk.text;
    }

    Value value() {
        const Token& tk = peek();
        if (tk.kind == Tok::Name) {
            ++p_;
            return Value::of(static_cast<Name>(std::stoul(tk.text)));
        }
        if (tk.kind == Tok::Ident && lower(tk.text) && !is_keyword(tk.text)) {
            if (!allow_free_ && !vals_.count(tk.text)) fail(tk, "unbound variable " + tk.text);
            ++p_;
            return Value::of(tk.text);
        }
        fail(tk, "expected a name or value variable but found " + describe(tk));
    }

    std::vector<Value> value_list() {
        std::vector<Value> us{value()};
        while (at(",")) {
            ++p_;
            us.push_back(value());
        }
        return us;
    }

    void bind(const std::string& x) { ++vals_[x]; }
    void unbind(const std::string& x) {
        if (--vals_[x] == 0) vals_.erase(x);
    }

    Formula disj() {
        Formula f = conj();
        while (at("|")) {
            ++p_;
            f = mk::lor(f, conj());
        }
        return f;
    }

    Formula conj() {
        Formula f = unary();
        while (at("&")) {
            ++p_;
            f = mk::land(f, unary());
        }
        return f;
    }

    Formula unary() {
        const Token& tk = peek();
        if (at("!")) {
            ++p_;
            return mk::lnot(unary());
        }
        if (at("<") || at("[")) {
            bool dia = at("<");
            ++p_;
            const Token& tt = peek();
            if (tt.kind != Tok::Ident) fail(tt, "expected a tag but found " + describe(tt));
            ++p_;
            std::vector<Value> us;
            if (at(":")) {
                ++p_;
                us = value_list();
            }
            if (sig_) {
                auto it = sig_->find(tt.text);
                if (it == sig_->end()) fail(tt, "unknown tag '" + tt.text + "'");
                if (it->second != static_cast<int>(us.size()))
                    fail(tt, "tag '" + tt.text + "' expects " + std::to_string(it->second) + " argument(s), got " +
                                 std::to_string(us.size()));
            }
            expect(dia ? ">" : "]");
            Formula body = unary();
            return dia ? mk::dia(tt.text, us, body) : mk::box(tt.text, us, body);
        }
        if (tk.kind == Tok::Ident && (tk.text == "some" || tk.text == "all" || tk.text == "fresh")) {
            ++p_;
            std::string x = value_ident();
            expect(".");
            bind(x);
            Formula body = disj();
            unbind(x);
            if (tk.text == "some") return mk::some(x, body);
            if (tk.text == "all") return mk::all(x, body);
            return mk::fresh(x, body);
        }
        if (tk.kind == Tok::Ident && (tk.text == "mu" || tk.text == "nu")) return fixpoint();
        return atom();
    }

    Formula fixpoint() {
        const Token& kw = peek();
        ++p_;
        const Token& xt = peek();
        if (xt.kind != Tok::Ident || !upper(xt.text)) fail(xt, "expected a recursion variable but found " + describe(xt));
        ++p_;
        std::vector<std::string> xs;
        if (at("(")) {
            ++p_;
            if (!at(")")) {
                xs.push_back(value_ident());
                while (at(",")) {
                    ++p_;
                    xs.push_back(value_ident());
                }
            }
            expect(")");
        }
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = i + 1; j < xs.size(); ++j)
                if (xs[i] == xs[j]) fail(xt, "repeated parameter " + xs[i]);
        expect(".");
        for (auto& x : xs) bind(x);
        recs_[xt.text].push_back(xs.size());
        Formula body = disj();
        recs_[xt.text].pop_back();
        for (auto& x : xs) unbind(x);
        std::vector<Value> us;
        if (!xs.empty()) {
            if (!at("(")) fail(peek(), "fixpoint " + xt.text + " expects " + std::to_string(xs.size()) + " argument(s)");
            ++p_;
            us = value_list();
            expect(")");
            if (us.size() != xs.size())
                fail(xt, "fixpoint " + xt.text + " expects " + std::to_string(xs.size()) + " argument(s), got " +
                             std::to_string(us.size()));
        } else if (at("(") && at(")", 1)) {
            p_ += 2;
        }
        return kw.text == "mu" ? mk::mu(xt.text, xs, body, us) : mk::nu(xt.text, xs, body, us);
    }

    Formula atom() {
        const Token& tk = peek();
        if (at("(")) {
            ++p_;
            Formula f = disj();
            expect(")");
            return f;
        }
        if (tk.kind == Tok::Ident && upper(tk.text)) {
            ++p_;
            auto it = recs_.find(tk.text);
            bool bound = it != recs_.end() && !it->second.empty();
            if (!bound && !allow_free_) fail(tk, "unbound variable " + tk.text);
            std::vector<Value> us;
            if (bound && it->second.back() == 0) {
                if (at("(") && at(")", 1)) p_ += 2;
            } else if (at("(")) {
                ++p_;
                if (!at(")")) us = value_list();
                expect(")");
            }
            if (bound && us.size() != it->second.back())
                fail(tk, "variable " + tk.text + " expects " + std::to_string(it->second.back()) + " argument(s), got " +
                             std::to_string(us.size()));
            return mk::var(tk.text, us);
        }
        if (tk.kind == Tok::Name || (tk.kind == Tok::Ident && lower(tk.text) && !is_keyword(tk.text))) {
            Value u = value();
            bool ne = at("!=");
            if (!ne && !at("=")) fail(peek(), "expected '=' or '!=' but found " + describe(peek()));
            ++p_;
            Value v = value();
            return ne ? mk::neq(u, v) : mk::eq(u, v);
        }
        fail(tk, "expected a formula but found " + describe(tk));
    }

public:
    FormulaParser(const std::string& text, const Signature* sig, bool allow_free)
        : t_(lex(text)), sig_(sig), allow_free_(allow_free) {}

    Formula parse() {
        Formula f = disj();
        if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()));
        return f;
    }
};

} // namespace detail

// `sig` may be null to accept any tag; `allow_free` admits free variables
inline Formula parse_formula(const std::string& text, const Signature* sig = nullptr, bool allow_free = false) {
    return detail::FormulaParser(text, sig, allow_free).parse();
}

inline Fra parse_fra(const std::string& text) {
    Fra fra;
    bool have_regs = false;
    struct PendingTrans {
        int line;
        std::string from, tag, kind;
        int reg;
        std::string to;
    };
    std::vector<PendingTrans> pend;
    std::istringstream in(text);
    std::string raw;
    int ln = 0;
    auto err = [&](const std::string& msg) { throw ParseError(ln, 1, msg); };
    while (std::getline(in, raw)) {
        ++ln;
        auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "registers") {
            if (have_regs) err("duplicate registers declaration");
            if (!(ls >> fra.r) || fra.r < 0) err("expected a register count");
            have_regs = true;
        } else if (kw == "tags") {
            std::string item;
            while (ls >> item) {
                auto c = item.find(':');
                if (c == std::string::npos || c == 0) err("expected tag:arity, found '" + item + "'");
                std::string t = item.substr(0, c);
                int ar = 0;
                try {
                    ar = std::stoi(item.substr(c + 1));
                } catch (const std::exception&) {
                    err("bad arity in '" + item + "'");
                }
                if (fra.tags.count(t)) err("duplicate tag " + t);
                fra.tags[t] = ar;
            }
        } else if (kw == "state") {
            std::string q, av;
            if (!(ls >> q >> av) || av != "avail") err("expected: state NAME avail {i,...}");
            std::string rest, tok;
            while (ls >> tok) rest += tok;
            if (rest.size() < 2 || rest.front() != '{' || rest.back() != '}') err("expected a register set in braces");
            std::set<int> regs;
            std::string inner = rest.substr(1, rest.size() - 2), num;
            std::istringstream is(inner);
            while (std::getline(is, num, ',')) {
                if (num.empty()) err("empty entry in register set");
                try {
                    regs.insert(std::stoi(num));
                } catch (const std::exception&) {
                    err("bad register '" + num + "'");
                }
            }
            if (fra.state_index(q) >= 0) err("duplicate state " + q);
            fra.states.push_back(q);
            fra.avail.push_back(regs);
        } else if (kw == "trans") {
            std::string from, tag, kind, to;
            if (!(ls >> from >> tag >> kind >> to)) err("expected: trans FROM TAG KIND(i) TO");
            std::string extra;
            if (ls >> extra) err("trailing text '" + extra + "'");
            auto lp = kind.find('(');
            if (lp == std::string::npos || kind.back() != ')') err("expected read(i), lfresh(i) or gfresh(i)");
            int reg = 0;
            try {
                reg = std::stoi(kind.substr(lp + 1, kind.size() - lp - 2));
            } catch (const std::exception&) {
                err("bad register in '" + kind + "'");
            }
            pend.push_back({ln, from, tag, kind.substr(0, lp), reg, to});
        } else {
            err("unknown declaration '" + kw + "'");
        }
    }
    if (!have_regs) throw ParseError(1, 1, "missing registers declaration");
    for (auto& p : pend) {
        ln = p.line;
        Transition tr;
        tr.from = fra.state_index(p.from);
        tr.to = fra.state_index(p.to);
        if (tr.from < 0) err("unknown state " + p.from);
        if (tr.to < 0) err("unknown state " + p.to);
        if (p.kind == "read") tr.kind = Kind::Read;
        else if (p.kind == "lfresh") tr.kind = Kind::LFresh;
        else if (p.kind == "gfresh") tr.kind = Kind::GFresh;
        else err("unknown transition kind '" + p.kind + "'");
        tr.tag = p.tag;
        tr.reg = p.reg;
        fra.delta.push_back(tr);
    }
    auto errs = validate(fra);
    if (!errs.empty()) {
        std::string msg = "invalid automaton:";
        for (auto& e : errs) msg += "\n  " + e;
        throw Error(msg);
    }
    return fra;
}

inline std::string print_fra(const Fra& fra) {
    std::ostringstream os;
    os << "registers " << fra.r << "\n";
    os << "tags";
    for (auto& [t, ar] : fra.tags) os << " " << t << ":" << ar;
    os << "\n";
    for (std::size_t q = 0; q < fra.states.size(); ++q) {
        os << "state " << fra.states[q] << " avail {";
        bool first = true;
        for (int i : fra.avail[q]) {
            os << (first ? "" : ",") << i;
            first = false;
        }
        os << "}\n";
    }
    for (auto& tr : fra.delta)
        os << "trans " << fra.states[tr.from] << " " << tr.tag << " " << to_string(tr.kind) << "(" << tr.reg << ") "
           << fra.states[tr.to] << "\n";
    return os.str();
}

// `1=#0,2=#3` style register assignment
inline Regs parse_regs(const std::string& text) {
    Regs r;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        auto eq = item.find('=');
        std::string a = eq == std::string::npos ? "" : item.substr(eq + 1);
        while (!a.empty() && std::isspace(static_cast<unsigned char>(a.front()))) a.erase(a.begin());
        if (eq == std::string::npos || a.size() < 2 || a[0] != '#') throw Error("expected i=#n, found '" + item + "'");
        try {
            int i = std::stoi(item.substr(0, eq));
            if (r.count(i)) throw Error("register " + std::to_string(i) + " assigned twice");
            r[i] = static_cast<Name>(std::stoul(a.substr(1)));
        } catch (const std::logic_error&) {
            throw Error("expected i=#n, found '" + item + "'");
        }
    }
    return r;
}

// `#0,#1` style name list
inline NameSet parse_names(const std::string& text) {
    NameSet s;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        std::string a;
        for (char c : item)
            if (!std::isspace(static_cast<unsigned char>(c))) a += c;
        if (a.empty()) continue;
        if (a.size() < 2 || a[0] != '#') throw Error("expected a name #n, found '" + item + "'");
        try {
            s.insert(static_cast<Name>(std::stoul(a.substr(1))));
        } catch (const std::logic_error&) {
            throw Error("expected a name #n, found '" + item + "'");
        }
    }
    return s;
}

} // namespace fhml
