#include "hauto/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "hauto/model.hpp"

namespace hauto {

ParseError::ParseError(std::string src, std::size_t l, std::size_t c, const std::string& message)
    : std::runtime_error(src + ":" + std::to_string(l) + ":" + std::to_string(c) + ": " + message),
      source(std::move(src)),
      line(l),
      column(c) {}

namespace {

struct Token {
    enum Kind { Ident, Punct, End } kind = End;
    std::string text;
    std::size_t line = 1, col = 1;
};

std::vector<Token> lex(std::string_view s, const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto adv = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
        } else if (c == '#') {
            while (i < s.size() && s[i] != '\n') adv(1);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            Token t{Token::Ident, "", line, col};
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            t.text = std::string(s.substr(i, j - i));
            adv(j - i);
            out.push_back(t);
        } else {
            Token t{Token::Punct, "", line, col};
            auto two = s.substr(i, 2);
            if (two == "<=" || two == "!=" || two == "->") {
                t.text = std::string(two);
            } else if (std::string_view("(),|;.*:{}=@").find(c) != std::string_view::npos) {
                t.text = std::string(1, c);
            } else {
                throw ParseError(src, line, col, std::string("unexpected character '") + c + "'");
            }
            adv(t.text.size());
            out.push_back(t);
        }
    }
    out.push_back({Token::End, "", line, col});
    return out;
}

struct CallSite {
    std::string pred;
    std::size_t arity, line, col;
};

class Parser {
public:
    Parser(std::string_view text, std::string src, const Sid* known)
        : src_(std::move(src)), toks_(lex(text, src_)), known_(known) {}

    SidDocument run() {
        SidDocument doc;
        while (peek().kind != Token::End) decl(doc);
        for (auto& c : calls_) {
            const Sid* owner = doc.sid.has(c.pred) ? &doc.sid : (known_ && known_->has(c.pred) ? known_ : nullptr);
            if (!owner) throw ParseError(src_, c.line, c.col, "unknown predicate '" + c.pred + "'");
            if (owner->at(c.pred).arity != c.arity)
                throw ParseError(src_, c.line, c.col,
                                 "predicate '" + c.pred + "' expects " + std::to_string(owner->at(c.pred).arity) +
                                     " arguments, got " + std::to_string(c.arity));
        }
        return doc;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(src_, t.line, t.col, msg); }
    bool at(const char* p) const { return peek().kind == Token::Punct && peek().text == p; }
    void expect(const char* p) {
        if (!at(p)) fail(peek(), std::string("expected '") + p + "'" + found());
        ++pos_;
    }
    std::string found() const {
        return peek().kind == Token::End ? ", found end of input" : ", found '" + peek().text + "'";
    }
    const Token& ident(const char* what) {
        if (peek().kind != Token::Ident) fail(peek(), std::string("expected ") + what + found());
        return next();
    }

    void decl(SidDocument& doc) {
        std::set<std::string> marks;
        while (at("@")) {
            ++pos_;
            auto& t = ident("annotation");
            if (t.text != "final" && t.text != "sink" && t.text != "aux") fail(t, "unknown annotation '@" + t.text + "'");
            marks.insert(t.text);
        }
        auto& name = ident("predicate name");
        if (name.text == "nil" || name.text == "emp" || name.text == "ex") fail(name, "reserved word '" + name.text + "'");
        bool query = name.text == "query";
        if (query && !marks.empty()) fail(name, "annotations are not allowed on the query");
        if (query && doc.query) fail(name, "duplicate query");
        expect("(");
        std::map<std::string, Var> scope;
        std::vector<std::string> params;
        if (!at(")")) {
            do {
                auto& p = ident("parameter");
                if (p.text == "nil") fail(p, "nil cannot be a parameter");
                if (scope.count(p.text)) fail(p, "duplicate parameter '" + p.text + "'");
                params.push_back(p.text);
                scope[p.text] = Var::free(static_cast<std::uint32_t>(params.size()));
            } while (at(",") && (++pos_, true));
        }
        expect(")");
        auto arity = static_cast<std::uint32_t>(params.size());
        if (!query && doc.sid.has(name.text) && doc.sid.at(name.text).arity != arity)
            fail(name, "predicate '" + name.text + "' redeclared with a different arity");
        expect("<=");
        std::vector<SymbolicHeap> bodies;
        bodies.push_back(body(scope, arity));
        while (at("|")) {
            ++pos_;
            bodies.push_back(body(scope, arity));
        }
        expect(";");
        if (query) {
            if (bodies.size() != 1) fail(name, "the query must have exactly one body");
            doc.query = bodies.front();
            return;
        }
        doc.sid.declare(name.text, arity);
        for (auto& b : bodies) doc.sid.add_rule(name.text, arity, std::move(b));
        if (!marks.empty()) doc.annotations[name.text].insert(marks.begin(), marks.end());
    }

    SymbolicHeap body(std::map<std::string, Var> scope, std::uint32_t arity) {
        SymbolicHeap h;
        h.free_count = arity;
        if (peek().kind == Token::Ident && peek().text == "ex") {
            ++pos_;
            do {
                auto& b = ident("quantified variable");
                if (b.text == "nil") fail(b, "nil cannot be quantified");
                if (scope.count(b.text) && scope[b.text].is_bound()) fail(b, "duplicate quantified variable '" + b.text + "'");
                scope[b.text] = Var::bound(++h.bound_count);
            } while (peek().kind == Token::Ident);
            expect(".");
        }
        atom(h, scope);
        while (at("*")) {
            ++pos_;
            atom(h, scope);
        }
        if (at(":")) {
            ++pos_;
            expect("{");
            if (!at("}")) {
                do {
                    Var a = term(scope);
                    bool eq = at("=");
                    if (!eq && !at("!=")) fail(peek(), "expected '=' or '!='" + found());
                    ++pos_;
                    Var b = term(scope);
                    h.add_pure(a, b, eq);
                } while (at(",") && (++pos_, true));
            }
            expect("}");
        }
        return h;
    }

    void atom(SymbolicHeap& h, const std::map<std::string, Var>& scope) {
        auto& t = ident("atom");
        if (t.text == "emp") return;
        if (at("->")) {
            ++pos_;
            PointsTo p{resolve(t, scope), {}};
            expect("(");
            if (at(")")) fail(peek(), "points-to needs at least one target");
            p.targets = terms(scope);
            expect(")");
            h.spatial.push_back(std::move(p));
            return;
        }
        if (at("(")) {
            ++pos_;
            PredCall c{t.text, {}};
            if (!at(")")) c.args = terms(scope);
            expect(")");
            calls_.push_back({c.pred, c.args.size(), t.line, t.col});
            h.calls.push_back(std::move(c));
            return;
        }
        fail(peek(), "expected '->' or '(' after '" + t.text + "'" + found());
    }

    std::vector<Var> terms(const std::map<std::string, Var>& scope) {
        std::vector<Var> v{term(scope)};
        while (at(",")) {
            ++pos_;
            v.push_back(term(scope));
        }
        return v;
    }

    Var term(const std::map<std::string, Var>& scope) { return resolve(ident("variable"), scope); }

    Var resolve(const Token& t, const std::map<std::string, Var>& scope) const {
        if (t.text == "nil") return Var::nil();
        auto it = scope.find(t.text);
        if (it == scope.end()) fail(t, "unknown identifier '" + t.text + "'");
        return it->second;
    }

    std::string src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<CallSite> calls_;
    const Sid* known_;
};

std::string params(std::uint32_t n) {
    std::string s = "(";
    for (std::uint32_t i = 1; i <= n; ++i) s += (i > 1 ? ", x" : "x") + std::to_string(i);
    return s + ")";
}

void print_pred(std::ostringstream& os, const std::string& name, const Predicate& p, const std::set<std::string>* marks) {
    if (marks)
        for (auto& m : *marks) os << '@' << m << ' ';
    os << name << params(p.arity) << " <=";
    if (p.rules.empty()) os << " emp : {nil != nil}";
    for (std::size_t i = 0; i < p.rules.size(); ++i) os << (i ? "\n  | " : " ") << to_string(p.rules[i]);
    os << ";\n";
}

}  // namespace

SidDocument parse_document(std::string_view text, const std::string& source, const Sid* known) {
    return Parser(text, source, known).run();
}

SidDocument load_document(const std::string& path, const Sid* known) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, 0, "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_document(ss.str(), path, known);
}

std::string print_document(const SidDocument& doc) {
    std::ostringstream os;
    for (auto& name : doc.sid.order) {
        auto it = doc.annotations.find(name);
        print_pred(os, name, doc.sid.at(name), it == doc.annotations.end() ? nullptr : &it->second);
    }
    if (doc.query) {
        Predicate q{doc.query->free_count, {*doc.query}};
        print_pred(os, "query", q, nullptr);
    }
    return os.str();
}

std::string print_sid(const Sid& sid) {
    SidDocument d;
    d.sid = sid;
    return print_document(d);
}

}  // namespace hauto
