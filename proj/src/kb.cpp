#include "nces/kb.hpp"

#include <fstream>
#include <sstream>

namespace nces {

namespace {

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

[[noreturn]] void line_error(const std::string& origin, int line_no, const std::string& msg) {
    throw KbError(origin + ":" + std::to_string(line_no) + ": " + msg);
}

}  // namespace

int KnowledgeBase::add_individual(const std::string& name) {
    auto it = individual_index.find(name);
    if (it != individual_index.end()) return it->second;
    int id = static_cast<int>(individuals.size());
    individuals.push_back(name);
    individual_index.emplace(name, id);
    return id;
}

int KnowledgeBase::add_class(const std::string& name) {
    auto it = class_index.find(name);
    if (it != class_index.end()) return it->second;
    int id = static_cast<int>(classes.size());
    classes.push_back(name);
    class_index.emplace(name, id);
    abox_types.emplace_back();
    return id;
}

int KnowledgeBase::add_role(const std::string& name) {
    auto it = role_index.find(name);
    if (it != role_index.end()) return it->second;
    int id = static_cast<int>(roles.size());
    roles.push_back(name);
    role_index.emplace(name, id);
    abox_roles.emplace_back();
    return id;
}

KnowledgeBase parse_kb(const std::string& text, const std::string& origin) {
    KnowledgeBase kb;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string keyword;
        if (!(ls >> keyword)) continue;  // blank line
        if (keyword[0] == '#') continue;

        auto read_name = [&](const char* what) {
            std::string n;
            if (!(ls >> n) || !valid_name(n))
                line_error(origin, line_no, std::string("expected ") + what);
            return n;
        };
        auto expect_end = [&] {
            std::string rest;
            if (ls >> rest) line_error(origin, line_no, "trailing tokens: '" + rest + "'");
        };

        if (keyword == "class") {
            kb.add_class(read_name("class name"));
            expect_end();
        } else if (keyword == "type") {
            int ind = kb.add_individual(read_name("individual name"));
            int cls = kb.add_class(read_name("class name"));
            expect_end();
            kb.abox_types[cls].push_back(ind);
        } else if (keyword == "role" || keyword == "role_assert") {
            std::string a = read_name("name");
            std::string b, c;
            if (ls >> b) {
                if (!valid_name(b)) line_error(origin, line_no, "bad role name");
                c = read_name("individual name");
                expect_end();
                int s = kb.add_individual(a);
                int r = kb.add_role(b);
                int o = kb.add_individual(c);
                kb.abox_roles[r].emplace_back(s, o);
            } else if (keyword == "role") {
                kb.add_role(a);  // bare declaration
            } else {
                line_error(origin, line_no, "role_assert needs <ind> <role> <ind>");
            }
        } else if (keyword == "sub") {
            std::string rest;
            std::getline(ls, rest);
            // The two expressions are separated by whitespace at paren depth 0;
            // split at the midpoint boundary by parsing the first expression
            // greedily: try each whitespace split point from the left.
            ExprPtr sub_expr, sup_expr;
            bool ok = false;
            for (std::size_t i = 1; i + 1 < rest.size(); ++i) {
                if (rest[i] != ' ') continue;
                try {
                    sub_expr = parse_expression(rest.substr(0, i), kb);
                    sup_expr = parse_expression(rest.substr(i + 1), kb);
                    ok = true;
                    break;
                } catch (const ParseError&) {
                    continue;
                }
            }
            if (!ok)
                line_error(origin, line_no,
                           "cannot parse TBox axiom (undeclared name or bad syntax)");
            kb.tbox.emplace_back(sub_expr, sup_expr);
        } else {
            line_error(origin, line_no, "unknown statement '" + keyword + "'");
        }
    }
    return kb;
}

KnowledgeBase load_kb(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw KbError("cannot open KB file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_kb(buf.str(), path);
}

// --- Vocabulary -------------------------------------------------------------

const std::vector<std::string> kSpecialAtoms = {
    " ", ".", "⊔", "⊓", "∃", "∀", "¬", "(", ")", "⊤", "⊥",
};

int Vocabulary::id_of(const std::string& atom) const {
    auto it = index.find(atom);
    if (it == index.end()) throw KbError("atom not in vocabulary: '" + atom + "'");
    return it->second;
}

std::uint64_t Vocabulary::fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& a : atoms) {
        for (char c : a) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    }
    return h;
}

Vocabulary build_vocabulary(const KnowledgeBase& kb) {
    Vocabulary v;
    v.atoms.reserve(kb.classes.size() + kb.roles.size() + kSpecialAtoms.size());
    for (const auto& c : kb.classes) v.atoms.push_back(c);
    for (const auto& r : kb.roles) v.atoms.push_back(r);
    for (const auto& s : kSpecialAtoms) v.atoms.push_back(s);
    for (int i = 0; i < static_cast<int>(v.atoms.size()); ++i) {
        if (!v.index.emplace(v.atoms[i], i).second)
            throw KbError("duplicate vocabulary atom: '" + v.atoms[i] + "'");
    }
    v.pad_id = static_cast<int>(v.atoms.size());
    return v;
}

std::vector<int> tokenize_expression(const ConceptExpr& expr, const Vocabulary& vocab) {
    std::vector<int> ids;
    for (const auto& a : atom_list(expr)) ids.push_back(vocab.id_of(a));
    return ids;
}

std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab) {
    std::string s;
    for (int id : ids) {
        if (id < 0 || id >= vocab.size())
            throw KbError("token id out of range: " + std::to_string(id));
        s += vocab.atoms[id];
    }
    return s;
}

}  // namespace nces
