#pragma once

// Minimal s-expression reader for the .copp problem format. Atoms are
// whitespace-delimited tokens; `;` starts a comment running to end of line.

#include <string>
#include <vector>

#include "copp/errors.hpp"

namespace copp {

struct SExpr {
    bool is_atom = false;
    std::string atom;
    std::vector<SExpr> children;
    int line = 0;
    int col = 0;

    bool is_list() const { return !is_atom; }
    bool tagged(const std::string &tag) const {
        return is_list() && !children.empty() && children[0].is_atom &&
               children[0].atom == tag;
    }
};

namespace detail {

struct Lexer {
    const std::string &text;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    void advance() {
        if (pos < text.size() && text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void skip_ws() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ';') {
                while (pos < text.size() && text[pos] != '\n')
                    advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
};

inline SExpr parse_node(Lexer &lex) {
    lex.skip_ws();
    if (lex.pos >= lex.text.size())
        throw ParseError("unexpected end of input", lex.line, lex.col);
    int line = lex.line, col = lex.col;
    char c = lex.text[lex.pos];
    if (c == ')')
        throw ParseError("unexpected ')'", line, col);
    if (c == '(') {
        lex.advance();
        SExpr node;
        node.line = line;
        node.col = col;
        while (true) {
            lex.skip_ws();
            if (lex.pos >= lex.text.size())
                throw ParseError("unclosed '('", line, col);
            if (lex.text[lex.pos] == ')') {
                lex.advance();
                break;
            }
            node.children.push_back(parse_node(lex));
        }
        return node;
    }
    SExpr atom;
    atom.is_atom = true;
    atom.line = line;
    atom.col = col;
    while (lex.pos < lex.text.size()) {
        char ch = lex.text[lex.pos];
        if (ch == '(' || ch == ')' || ch == ';' || ch == ' ' || ch == '\t' ||
            ch == '\r' || ch == '\n')
            break;
        atom.atom.push_back(ch);
        lex.advance();
    }
    return atom;
}

} // namespace detail

inline std::vector<SExpr> parse_sexprs(const std::string &text) {
    detail::Lexer lex{text};
    std::vector<SExpr> nodes;
    while (!lex.eof())
        nodes.push_back(detail::parse_node(lex));
    return nodes;
}

} // namespace copp
