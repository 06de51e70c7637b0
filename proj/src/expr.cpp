#include "nces/expr.hpp"

#include <cstddef>

#include "nces/kb.hpp"

namespace nces {

namespace {

ExprPtr node(ExprKind kind, std::string name, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<ConceptExpr>();
    e->kind = kind;
    e->name = std::move(name);
    e->left = std::move(l);
    e->right = std::move(r);
    return e;
}

// Precedence level: ⊔ < ⊓ < unary < primary.
int level(const ConceptExpr& e) {
    switch (e.kind) {
        case ExprKind::Or: return 0;
        case ExprKind::And: return 1;
        case ExprKind::Not:
        case ExprKind::Exists:
        case ExprKind::Forall: return 2;
        default: return 3;
    }
}

void emit(const ConceptExpr& e, int min_level, std::vector<std::string>& out) {
    if (level(e) < min_level) {
        out.push_back("(");
        emit(e, 0, out);
        out.push_back(")");
        return;
    }
    switch (e.kind) {
        case ExprKind::Top: out.push_back("⊤"); break;
        case ExprKind::Bottom: out.push_back("⊥"); break;
        case ExprKind::Atomic: out.push_back(e.name); break;
        case ExprKind::Not:
            out.push_back("¬");
            emit(*e.left, 2, out);
            break;
        case ExprKind::Exists:
        case ExprKind::Forall:
            out.push_back(e.kind == ExprKind::Exists ? "∃" : "∀");
            out.push_back(" ");
            out.push_back(e.name);
            out.push_back(".");
            emit(*e.left, 2, out);
            break;
        case ExprKind::And:
            emit(*e.left, 1, out);
            out.push_back(" ");
            out.push_back("⊓");
            out.push_back(" ");
            emit(*e.right, 2, out);
            break;
        case ExprKind::Or:
            emit(*e.left, 0, out);
            out.push_back(" ");
            out.push_back("⊔");
            out.push_back(" ");
            emit(*e.right, 1, out);
            break;
    }
}

}  // namespace

ExprPtr make_top() { return node(ExprKind::Top, "", nullptr, nullptr); }
ExprPtr make_bottom() { return node(ExprKind::Bottom, "", nullptr, nullptr); }
ExprPtr make_atomic(std::string name) {
    return node(ExprKind::Atomic, std::move(name), nullptr, nullptr);
}
ExprPtr make_not(ExprPtr child) {
    return node(ExprKind::Not, "", std::move(child), nullptr);
}
ExprPtr make_and(ExprPtr lhs, ExprPtr rhs) {
    return node(ExprKind::And, "", std::move(lhs), std::move(rhs));
}
ExprPtr make_or(ExprPtr lhs, ExprPtr rhs) {
    return node(ExprKind::Or, "", std::move(lhs), std::move(rhs));
}
ExprPtr make_exists(std::string role, ExprPtr child) {
    return node(ExprKind::Exists, std::move(role), std::move(child), nullptr);
}
ExprPtr make_forall(std::string role, ExprPtr child) {
    return node(ExprKind::Forall, std::move(role), std::move(child), nullptr);
}

bool structurally_equal(const ConceptExpr& a, const ConceptExpr& b) {
    if (a.kind != b.kind || a.name != b.name) return false;
    if ((a.left == nullptr) != (b.left == nullptr)) return false;
    if ((a.right == nullptr) != (b.right == nullptr)) return false;
    if (a.left && !structurally_equal(*a.left, *b.left)) return false;
    if (a.right && !structurally_equal(*a.right, *b.right)) return false;
    return true;
}

std::vector<std::string> atom_list(const ConceptExpr& expr) {
    std::vector<std::string> out;
    emit(expr, 0, out);
    return out;
}

std::string render_expression(const ConceptExpr& expr) {
    std::string s;
    for (const auto& a : atom_list(expr)) s += a;
    return s;
}

int expression_length(const ConceptExpr& expr) {
    return static_cast<int>(atom_list(expr).size());
}

// --- parser -----------------------------------------------------------------

namespace {

enum class Tok { Top, Bot, And, Or, Not, Exists, Forall, Dot, LParen, RParen, Name, End };

struct Lexer {
    const std::string& src;
    std::size_t pos = 0;
    Tok tok = Tok::End;
    std::string name;

    explicit Lexer(const std::string& s) : src(s) { advance(); }

    bool starts_with(const char* lit) const {
        return src.compare(pos, std::string::traits_type::length(lit), lit) == 0;
    }

    static bool name_char(char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
               (c >= '0' && c <= '9') || c == '_' || c == '-';
    }

    void advance() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) ++pos;
        if (pos >= src.size()) {
            tok = Tok::End;
            return;
        }
        struct Sym { const char* lit; Tok tok; };
        static const Sym syms[] = {
            {"⊤", Tok::Top},   {"⊥", Tok::Bot},    {"⊓", Tok::And},
            {"⊔", Tok::Or},    {"¬", Tok::Not},    {"∃", Tok::Exists},
            {"∀", Tok::Forall}, {".", Tok::Dot},   {"(", Tok::LParen},
            {")", Tok::RParen},
        };
        for (const auto& s : syms) {
            if (starts_with(s.lit)) {
                pos += std::string::traits_type::length(s.lit);
                tok = s.tok;
                return;
            }
        }
        if (name_char(src[pos])) {
            std::size_t start = pos;
            while (pos < src.size() && name_char(src[pos])) ++pos;
            name = src.substr(start, pos - start);
            tok = Tok::Name;
            return;
        }
        throw ParseError("unexpected character at byte " + std::to_string(pos) +
                         " in expression: " + src);
    }
};

struct Parser {
    Lexer lex;
    const KnowledgeBase& kb;

    Parser(const std::string& s, const KnowledgeBase& k) : lex(s), kb(k) {}

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError(msg + " in expression: " + lex.src);
    }

    ExprPtr expr() {
        ExprPtr e = conj();
        while (lex.tok == Tok::Or) {
            lex.advance();
            e = make_or(e, conj());
        }
        return e;
    }

    ExprPtr conj() {
        ExprPtr e = unary();
        while (lex.tok == Tok::And) {
            lex.advance();
            e = make_and(e, unary());
        }
        return e;
    }

    ExprPtr unary() {
        if (lex.tok == Tok::Not) {
            lex.advance();
            return make_not(unary());
        }
        if (lex.tok == Tok::Exists || lex.tok == Tok::Forall) {
            bool existential = lex.tok == Tok::Exists;
            lex.advance();
            if (lex.tok != Tok::Name) fail("expected role name after quantifier");
            std::string role = lex.name;
            if (!kb.has_role(role)) fail("unknown role '" + role + "'");
            lex.advance();
            if (lex.tok != Tok::Dot) fail("expected '.' after role name");
            lex.advance();
            ExprPtr child = unary();
            return existential ? make_exists(role, child) : make_forall(role, child);
        }
        return primary();
    }

    ExprPtr primary() {
        switch (lex.tok) {
            case Tok::Top: lex.advance(); return make_top();
            case Tok::Bot: lex.advance(); return make_bottom();
            case Tok::Name: {
                std::string n = lex.name;
                if (!kb.has_class(n)) fail("unknown class '" + n + "'");
                lex.advance();
                return make_atomic(n);
            }
            case Tok::LParen: {
                lex.advance();
                ExprPtr e = expr();
                if (lex.tok != Tok::RParen) fail("unbalanced parentheses");
                lex.advance();
                return e;
            }
            case Tok::End: fail("empty operand");
            default: fail("unexpected token");
        }
    }
};

}  // namespace

ExprPtr parse_expression(const std::string& text, const KnowledgeBase& kb) {
    Parser p(text, kb);
    ExprPtr e = p.expr();
    if (p.lex.tok != Tok::End) p.fail("trailing input");
    return e;
}

}  // namespace nces
