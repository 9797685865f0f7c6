#include "heatctrl/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

namespace heatctrl::expr {

namespace {

const std::map<std::string, Ast::Func, std::less<>> kFunctions = {
    {"exp", Ast::Func::Exp},   {"ln", Ast::Func::Ln},
    {"cosh", Ast::Func::Cosh}, {"sinh", Ast::Func::Sinh},
    {"tanh", Ast::Func::Tanh}, {"sqrt", Ast::Func::Sqrt},
    {"abs", Ast::Func::Abs},   {"sgn", Ast::Func::Sgn},
};

const char* func_name(Ast::Func f) {
    switch (f) {
        case Ast::Func::Exp: return "exp";
        case Ast::Func::Ln: return "ln";
        case Ast::Func::Cosh: return "cosh";
        case Ast::Func::Sinh: return "sinh";
        case Ast::Func::Tanh: return "tanh";
        case Ast::Func::Sqrt: return "sqrt";
        case Ast::Func::Abs: return "abs";
        case Ast::Func::Sgn: return "sgn";
    }
    return "?";
}

struct Token {
    enum class Type { Number, Ident, Op, LParen, RParen, End };
    Type type = Type::End;
    double number = 0.0;
    std::string text;
    char op = 0;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }
    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    std::string_view src_;
    std::size_t i_ = 0;
    Token tok_;

    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
            ++i_;
        tok_ = Token{};
        tok_.pos = i_;
        if (i_ >= src_.size()) {
            tok_.type = Token::Type::End;
            return;
        }
        const char c = src_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = i_;
            while (i_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.'))
                ++i_;
            if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
                std::size_t save = i_;
                ++i_;
                if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
                if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
                    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
                        ++i_;
                } else {
                    i_ = save;   // bare 'e' belongs to an identifier, not this number
                }
            }
            const std::string text(src_.substr(start, i_ - start));
            try {
                tok_.number = std::stod(text);
            } catch (const std::exception&) {
                throw ParseError("bad numeric literal '" + text + "'", start, "number");
            }
            tok_.type = Token::Type::Number;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                        src_[i_] == '_'))
                ++i_;
            tok_.type = Token::Type::Ident;
            tok_.text = std::string(src_.substr(start, i_ - start));
            return;
        }
        ++i_;
        switch (c) {
            case '+': case '-': case '*': case '/': case '^':
                tok_.type = Token::Type::Op;
                tok_.op = c;
                return;
            case '(': tok_.type = Token::Type::LParen; return;
            case ')': tok_.type = Token::Type::RParen; return;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", tok_.pos,
                                 "number, identifier, operator or parenthesis");
        }
    }
};

} // namespace

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) {}

    Ast run() {
        Ast ast;
        ast.root_ = parse_sum(ast);
        const Token& t = lex_.peek();
        if (t.type != Token::Type::End)
            throw ParseError("trailing input", t.pos, "end of expression or operator");
        return ast;
    }

private:
    Lexer lex_;

    std::int32_t add(Ast& ast, Ast::Node n) {
        ast.nodes_.push_back(n);
        return static_cast<std::int32_t>(ast.nodes_.size() - 1);
    }

    // sum := product (('+'|'-') product)*
    std::int32_t parse_sum(Ast& ast) {
        std::int32_t lhs = parse_product(ast);
        while (lex_.peek().type == Token::Type::Op &&
               (lex_.peek().op == '+' || lex_.peek().op == '-')) {
            Token t = lex_.take();
            std::int32_t rhs = parse_product(ast);
            Ast::Node n;
            n.kind = Ast::Kind::Binary;
            n.op = t.op;
            n.lhs = lhs;
            n.rhs = rhs;
            n.pos = static_cast<std::uint32_t>(t.pos);
            lhs = add(ast, n);
        }
        return lhs;
    }

    // product := power (('*'|'/') power)*
    std::int32_t parse_product(Ast& ast) {
        std::int32_t lhs = parse_power(ast);
        while (lex_.peek().type == Token::Type::Op &&
               (lex_.peek().op == '*' || lex_.peek().op == '/')) {
            Token t = lex_.take();
            std::int32_t rhs = parse_power(ast);
            Ast::Node n;
            n.kind = Ast::Kind::Binary;
            n.op = t.op;
            n.lhs = lhs;
            n.rhs = rhs;
            n.pos = static_cast<std::uint32_t>(t.pos);
            lhs = add(ast, n);
        }
        return lhs;
    }

    // power := signed ('^' power)?   -- right-associative; the base includes
    // any leading unary minus, so -x^2 parses as (-x)^2.
    std::int32_t parse_power(Ast& ast) {
        std::int32_t base = parse_signed(ast);
        if (lex_.peek().type == Token::Type::Op && lex_.peek().op == '^') {
            Token t = lex_.take();
            std::int32_t expo = parse_power(ast);
            Ast::Node n;
            n.kind = Ast::Kind::Binary;
            n.op = '^';
            n.lhs = base;
            n.rhs = expo;
            n.pos = static_cast<std::uint32_t>(t.pos);
            return add(ast, n);
        }
        return base;
    }

    // signed := '-' signed | primary
    std::int32_t parse_signed(Ast& ast) {
        if (lex_.peek().type == Token::Type::Op && lex_.peek().op == '-') {
            Token t = lex_.take();
            std::int32_t child = parse_signed(ast);
            Ast::Node n;
            n.kind = Ast::Kind::Unary;
            n.op = '-';
            n.lhs = child;
            n.pos = static_cast<std::uint32_t>(t.pos);
            return add(ast, n);
        }
        return parse_primary(ast);
    }

    std::int32_t parse_primary(Ast& ast) {
        Token t = lex_.peek();
        switch (t.type) {
            case Token::Type::Number: {
                lex_.take();
                Ast::Node n;
                n.kind = Ast::Kind::Number;
                n.number = t.number;
                n.pos = static_cast<std::uint32_t>(t.pos);
                return add(ast, n);
            }
            case Token::Type::Ident: {
                lex_.take();
                if (t.text == "x") {
                    Ast::Node n;
                    n.kind = Ast::Kind::Variable;
                    n.pos = static_cast<std::uint32_t>(t.pos);
                    return add(ast, n);
                }
                auto it = kFunctions.find(t.text);
                if (it == kFunctions.end())
                    throw ParseError("unknown identifier '" + t.text + "'", t.pos,
                                     "x or a function name");
                if (lex_.peek().type != Token::Type::LParen)
                    throw ParseError("function '" + t.text + "' needs an argument list",
                                     lex_.peek().pos, "'('");
                lex_.take();
                std::int32_t arg = parse_sum(ast);
                if (lex_.peek().type != Token::Type::RParen)
                    throw ParseError("unclosed argument list", lex_.peek().pos, "')'");
                lex_.take();
                Ast::Node n;
                n.kind = Ast::Kind::Call;
                n.fn = it->second;
                n.lhs = arg;
                n.pos = static_cast<std::uint32_t>(t.pos);
                return add(ast, n);
            }
            case Token::Type::LParen: {
                lex_.take();
                std::int32_t inner = parse_sum(ast);
                if (lex_.peek().type != Token::Type::RParen)
                    throw ParseError("unclosed parenthesis", lex_.peek().pos, "')'");
                lex_.take();
                return inner;
            }
            default:
                throw ParseError("unexpected token", t.pos,
                                 "number, 'x', function or '('");
        }
    }
};

Ast Ast::parse(std::string_view src) {
    return Parser(src).run();
}

double Ast::eval_node(std::int32_t idx, double x) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.kind) {
        case Kind::Number: return n.number;
        case Kind::Variable: return x;
        case Kind::Unary: return -eval_node(n.lhs, x);
        case Kind::Binary: {
            const double a = eval_node(n.lhs, x);
            const double b = eval_node(n.rhs, x);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/':
                    if (b == 0.0)
                        throw EvalError("division by zero", n.pos);
                    return a / b;
                case '^': {
                    const double r = std::pow(a, b);
                    if (!std::isfinite(r) && std::isfinite(a) && std::isfinite(b))
                        throw EvalError("power out of domain", n.pos);
                    return r;
                }
            }
            return 0.0;
        }
        case Kind::Call: {
            const double a = eval_node(n.lhs, x);
            switch (n.fn) {
                case Func::Exp: return std::exp(a);
                case Func::Ln:
                    if (!(a > 0.0))
                        throw EvalError("ln of nonpositive value", n.pos);
                    return std::log(a);
                case Func::Cosh: return std::cosh(a);
                case Func::Sinh: return std::sinh(a);
                case Func::Tanh: return std::tanh(a);
                case Func::Sqrt:
                    if (a < 0.0)
                        throw EvalError("sqrt of negative value", n.pos);
                    return std::sqrt(a);
                case Func::Abs: return std::abs(a);
                case Func::Sgn: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
            }
            return 0.0;
        }
    }
    return 0.0;
}

double Ast::eval(double x) const {
    if (root_ < 0)
        throw Error("empty expression");
    return eval_node(root_, x);
}

namespace {
int node_prec(const Ast::Node& n) {
    switch (n.kind) {
        case Ast::Kind::Binary:
            return (n.op == '+' || n.op == '-') ? 1 : (n.op == '^' ? 3 : 2);
        case Ast::Kind::Unary: return 4;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
} // namespace

void Ast::print_node(std::int32_t idx, int min_prec, std::string& out) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    const int p = node_prec(n);
    const bool parens = p < min_prec;
    if (parens) out += '(';
    switch (n.kind) {
        case Kind::Number: out += format_number(n.number); break;
        case Kind::Variable: out += 'x'; break;
        case Kind::Unary:
            out += '-';
            print_node(n.lhs, 4, out);
            break;
        case Kind::Binary:
            if (n.op == '^') {
                print_node(n.lhs, 4, out);
                out += '^';
                print_node(n.rhs, 3, out);
            } else if (n.op == '+' || n.op == '-') {
                print_node(n.lhs, 1, out);
                out += n.op;
                print_node(n.rhs, 2, out);
            } else {
                print_node(n.lhs, 2, out);
                out += n.op;
                print_node(n.rhs, 3, out);
            }
            break;
        case Kind::Call:
            out += func_name(n.fn);
            out += '(';
            print_node(n.lhs, 0, out);
            out += ')';
            break;
    }
    if (parens) out += ')';
}

std::string Ast::pretty() const {
    if (root_ < 0) return "";
    std::string out;
    print_node(root_, 0, out);
    return out;
}

} // namespace heatctrl::expr
