#include "fmm/scheme_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "fmm/errors.hpp"

namespace fmm {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

bool is_blank(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

bool is_separator(const std::string& s) {
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '#';
    }
    return false;
}

// Solves nm = a, mp = b, np = c over positive integers; the solution is
// unique whenever it exists (n^2 = a*c/b).
std::optional<Dims> factor_dims(long a, long b, long c) {
    if (a <= 0 || b <= 0 || c <= 0) return std::nullopt;
    if ((a * c) % b != 0) return std::nullopt;
    const long n2 = (a * c) / b;
    const long n = std::lround(std::sqrt(double(n2)));
    if (n < 1 || n * n != n2) return std::nullopt;
    if (a % n != 0 || c % n != 0) return std::nullopt;
    const long m = a / n, p = c / n;
    if (m * p != b) return std::nullopt;
    return Dims{int(n), int(m), int(p)};
}

}  // namespace

BilinearScheme parse_scheme(const std::string& text, std::optional<Dims> dims,
                            std::string name) {
    struct Row {
        std::vector<Rational> vals;
        int line_no;
    };
    std::vector<std::vector<Row>> blocks(1);
    const auto lines = split_lines(text);
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (is_blank(line)) continue;
        if (is_separator(line)) {
            blocks.emplace_back();
            continue;
        }
        Row row;
        row.line_no = int(i) + 1;
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            try {
                Rational v = Rational::from_string(tok);
                if (!v.is_integer()) throw ParseError("");
                row.vals.push_back(v);
            } catch (const ParseError&) {
                throw ParseError("line " + std::to_string(i + 1) + ", token " +
                                 std::to_string(row.vals.size() + 1) + ": '" + tok +
                                 "' is not an integer");
            }
        }
        blocks.back().push_back(std::move(row));
    }
    while (!blocks.empty() && blocks.front().empty()) blocks.erase(blocks.begin());
    while (!blocks.empty() && blocks.back().empty()) blocks.pop_back();
    if (blocks.size() != 3)
        throw ParseError("expected 3 blocks, found " + std::to_string(blocks.size()));
    for (const auto& block : blocks)
        if (block.empty()) throw ParseError("expected 3 blocks, found an empty one");

    int rank = -1;
    for (const auto& block : blocks) {
        const size_t width = block.front().vals.size();
        for (const Row& row : block)
            if (row.vals.size() != width)
                throw ParseError("ragged row at line " + std::to_string(row.line_no) +
                                 ": expected " + std::to_string(width) + " columns, found " +
                                 std::to_string(row.vals.size()));
        if (rank < 0) rank = int(width);
        else if (int(width) != rank)
            throw ParseError("rank mismatch: blocks have " +
                             std::to_string(blocks[0].front().vals.size()) + "/" +
                             std::to_string(blocks[1].front().vals.size()) + "/" +
                             std::to_string(blocks[2].front().vals.size()) + " columns");
    }

    const long ra = long(blocks[0].size()), rb = long(blocks[1].size()),
               rc = long(blocks[2].size());
    Dims d;
    if (dims) {
        d = *dims;
        if (long(d.n) * d.m != ra || long(d.m) * d.p != rb || long(d.n) * d.p != rc)
            throw ParseError("dims " + d.to_string() + " do not match block row counts " +
                             std::to_string(ra) + "/" + std::to_string(rb) + "/" +
                             std::to_string(rc));
    } else {
        auto inferred = factor_dims(ra, rb, rc);
        if (!inferred)
            throw ParseError("cannot infer dims from block row counts " + std::to_string(ra) +
                             "/" + std::to_string(rb) + "/" + std::to_string(rc) +
                             "; pass dims explicitly");
        d = *inferred;
    }

    auto to_matrix = [rank](const std::vector<Row>& block) {
        CoeffMatrix m(int(block.size()), rank);
        for (size_t r = 0; r < block.size(); ++r)
            for (int c = 0; c < rank; ++c) m(int(r), c) = block[r].vals[size_t(c)];
        return m;
    };
    return BilinearScheme(d, to_matrix(blocks[0]), to_matrix(blocks[1]), to_matrix(blocks[2]),
                          std::move(name));
}

std::string serialize_scheme(const BilinearScheme& scheme) {
    if (!scheme.is_integral())
        throw ArgError("cannot serialize: scheme has non-integer coefficients");
    std::string out;
    const CoeffMatrix* mats[3] = {&scheme.u(), &scheme.v(), &scheme.w()};
    for (int b = 0; b < 3; ++b) {
        if (b > 0) out += "#\n";
        const CoeffMatrix& m = *mats[b];
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) {
                if (c > 0) out += ' ';
                out += m(r, c).to_string();
            }
            if (b < 2 || r + 1 < m.rows()) out += '\n';
        }
    }
    return out;
}

// ---------------------------------------------------------------------
// Program grammar

namespace {

struct Token {
    enum class Type { Plus, Minus, Star, LParen, RParen, Number, Name, End } type;
    std::string text;
};

class Lexer {
public:
    Lexer(std::string s, int line_no) : s_(std::move(s)), line_no_(line_no) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("line " + std::to_string(line_no_) + ": " + what);
    }

private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ >= s_.size()) {
            tok_ = {Token::Type::End, ""};
            return;
        }
        const char c = s_[pos_];
        switch (c) {
            case '+': tok_ = {Token::Type::Plus, "+"}; ++pos_; return;
            case '-': tok_ = {Token::Type::Minus, "-"}; ++pos_; return;
            case '*': tok_ = {Token::Type::Star, "*"}; ++pos_; return;
            case '(': tok_ = {Token::Type::LParen, "("}; ++pos_; return;
            case ')': tok_ = {Token::Type::RParen, ")"}; ++pos_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ < s_.size() && s_[pos_] == '/') {
                ++pos_;
                if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    fail("malformed rational number");
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    ++pos_;
            }
            tok_ = {Token::Type::Number, s_.substr(start, pos_ - start)};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            tok_ = {Token::Type::Name, s_.substr(start, pos_ - start)};
            return;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string s_;
    int line_no_;
    size_t pos_ = 0;
    Token tok_{Token::Type::End, ""};
};

// Accepts A3 / A_3 / t12 ... and returns the canonical (underscore-free) name.
std::string canonical_name(const std::string& raw, const Lexer& lex) {
    static const std::string prefixes = "ABtuvMC";
    if (raw.size() < 2 || prefixes.find(raw[0]) == std::string::npos)
        lex.fail("unknown name '" + raw + "' (expected A/B/t/u/v/M/C with an index)");
    size_t i = 1;
    if (raw[i] == '_') ++i;
    if (i >= raw.size()) lex.fail("name '" + raw + "' has no index");
    for (size_t j = i; j < raw.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(raw[j])))
            lex.fail("name '" + raw + "' has a malformed index");
    return raw.substr(0, 1) + raw.substr(i);
}

// term = [sign] [number [*]] name
LineTerm parse_term(Lexer& lex, bool sign_required_context) {
    Rational coef(1);
    if (lex.peek().type == Token::Type::Plus) {
        lex.take();
    } else if (lex.peek().type == Token::Type::Minus) {
        lex.take();
        coef = Rational(-1);
    } else if (sign_required_context) {
        lex.fail("expected '+' or '-'");
    }
    if (lex.peek().type == Token::Type::Number) {
        coef *= Rational::from_string(lex.take().text);
        if (lex.peek().type == Token::Type::Star) lex.take();
        if (coef.is_zero()) lex.fail("zero coefficient");
    }
    if (lex.peek().type != Token::Type::Name) lex.fail("expected a name");
    return {coef, canonical_name(lex.take().text, lex)};
}

std::vector<LineTerm> parse_expr(Lexer& lex) {
    std::vector<LineTerm> terms;
    terms.push_back(parse_term(lex, false));
    while (lex.peek().type == Token::Type::Plus || lex.peek().type == Token::Type::Minus)
        terms.push_back(parse_term(lex, true));
    return terms;
}

// factor = (expr) | term
std::vector<LineTerm> parse_factor(Lexer& lex) {
    if (lex.peek().type == Token::Type::LParen) {
        lex.take();
        auto terms = parse_expr(lex);
        if (lex.peek().type != Token::Type::RParen) lex.fail("expected ')'");
        lex.take();
        return terms;
    }
    return {parse_term(lex, false)};
}

// Detects a product line: a '*' at paren depth 0 that is not a
// coefficient-name separator (i.e. the text before it is a whole factor).
bool looks_like_product(const std::string& rhs) {
    int depth = 0;
    bool seen_name_or_rparen = false;
    for (char c : rhs) {
        if (c == '(') ++depth;
        else if (c == ')') {
            --depth;
            seen_name_or_rparen = true;
        } else if (c == '*' && depth == 0) {
            if (seen_name_or_rparen) return true;
            seen_name_or_rparen = false;  // coefficient separator, keep looking
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            seen_name_or_rparen = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            // digits extend a name or form a coefficient; no state change
        }
    }
    return false;
}

int parse_index(const std::string& name) { return std::stoi(name.substr(1)); }

}  // namespace

Slp parse_slp(const std::string& text, std::optional<Dims> dims) {
    std::vector<SlpLine> parsed;
    const auto raw_lines = split_lines(text);
    for (size_t i = 0; i < raw_lines.size(); ++i) {
        const std::string& raw = raw_lines[i];
        if (is_blank(raw)) continue;
        const auto eq = raw.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(i + 1) + ": expected 'name = ...'");
        const int line_no = int(i) + 1;
        Lexer dst_lex(raw.substr(0, eq), line_no);
        if (dst_lex.peek().type != Token::Type::Name) dst_lex.fail("expected a destination name");
        const std::string dst = canonical_name(dst_lex.take().text, dst_lex);
        if (dst_lex.peek().type != Token::Type::End) dst_lex.fail("junk before '='");

        const std::string rhs = raw.substr(eq + 1);
        SlpLine line;
        line.dst_name = dst;
        Lexer lex(rhs, line_no);
        if (looks_like_product(rhs)) {
            line.op = SlpLine::Op::Product;
            line.a_terms = parse_factor(lex);
            if (lex.peek().type != Token::Type::Star) lex.fail("expected '*'");
            lex.take();
            line.b_terms = parse_factor(lex);
        } else {
            auto terms = parse_expr(lex);
            if (terms.size() >= 2) {
                line.op = SlpLine::Op::Linear;
            } else if (terms[0].coef.is_one()) {
                line.op = SlpLine::Op::Alias;
            } else {
                line.op = SlpLine::Op::Scaled;
            }
            line.terms = std::move(terms);
        }
        if (lex.peek().type != Token::Type::End)
            lex.fail("trailing input '" + lex.peek().text + "'");
        rotate_leading_positive(line.terms);
        rotate_leading_positive(line.a_terms);
        rotate_leading_positive(line.b_terms);
        parsed.push_back(std::move(line));
    }
    if (parsed.empty()) throw ParseError("empty program");

    Dims d;
    if (dims) {
        d = *dims;
    } else {
        long max_a = -1, max_b = -1, max_c = -1;
        auto scan = [&](const std::vector<LineTerm>& ts) {
            for (const LineTerm& t : ts) {
                if (t.name[0] == 'A') max_a = std::max(max_a, long(parse_index(t.name)));
                if (t.name[0] == 'B') max_b = std::max(max_b, long(parse_index(t.name)));
            }
        };
        for (const SlpLine& line : parsed) {
            scan(line.terms);
            scan(line.a_terms);
            scan(line.b_terms);
            if (line.dst_name[0] == 'C') max_c = std::max(max_c, long(parse_index(line.dst_name)));
        }
        auto inferred = factor_dims(max_a + 1, max_b + 1, max_c + 1);
        if (!inferred)
            throw ParseError("cannot infer dims from used indices (A<" + std::to_string(max_a + 1) +
                             ", B<" + std::to_string(max_b + 1) + ", C<" + std::to_string(max_c + 1) +
                             "); pass dims explicitly");
        d = *inferred;
    }
    return build_slp_from_lines(d, parsed);
}

namespace {

void render_terms(std::string& out, const std::vector<LineTerm>& terms) {
    for (size_t i = 0; i < terms.size(); ++i) {
        Rational c = terms[i].coef;
        if (i == 0) {
            if (c.sign() < 0) {
                out += '-';
                c = -c;
            }
        } else {
            out += c.sign() < 0 ? " - " : " + ";
            if (c.sign() < 0) c = -c;
        }
        if (!c.is_one()) {
            out += c.to_string();
            out += ' ';
        }
        out += terms[i].name;
    }
}

}  // namespace

std::string emit_slp(const Slp& slp, EmitStats* stats) {
    std::string out;
    for (SlpLine line : decompose_lines(slp)) {
        auto rotate = [&](std::vector<LineTerm>& terms, const char* side) {
            if (terms.empty()) return;
            if (!rotate_leading_positive(terms) && stats != nullptr)
                stats->negative_leading.push_back(line.dst_name + side);
        };
        rotate(line.terms, "");
        rotate(line.a_terms, ":a");
        rotate(line.b_terms, ":b");
        out += line.dst_name;
        out += " = ";
        if (line.op == SlpLine::Op::Product) {
            auto render_factor = [&](const std::vector<LineTerm>& terms) {
                if (terms.size() == 1 && terms[0].coef.is_one()) {
                    out += terms[0].name;
                } else {
                    out += '(';
                    render_terms(out, terms);
                    out += ')';
                }
            };
            render_factor(line.a_terms);
            out += " * ";
            render_factor(line.b_terms);
        } else {
            render_terms(out, line.terms);
        }
        out += '\n';
    }
    return out;
}

}  // namespace fmm
