#include "edslab/expr.hpp"

#include <cctype>
#include <cmath>
#include <utility>

namespace edslab {

enum class ExprKind { Const, Var, Add, Mul, Pow, Div, Exp, Sin, Cos, Sqrt };

struct ExprNode {
    ExprKind kind;
    Rational value;              // Const
    int var = 0;                 // Var
    int exponent = 0;            // Pow
    std::vector<ExprField> args; // children
};

struct ExprBuilder {
    static ExprField make(ExprNode n) {
        return ExprField(std::make_shared<const ExprNode>(std::move(n)));
    }
    static const ExprNode& node(const ExprField& e) { return *e.node_; }
};

namespace {

const ExprNode& nd(const ExprField& e) { return ExprBuilder::node(e); }

ExprField make_const(const Rational& c) {
    ExprNode n{ExprKind::Const, c, 0, 0, {}};
    return ExprBuilder::make(std::move(n));
}

ExprField make_unary(ExprKind k, const ExprField& a) {
    ExprNode n{k, 0, 0, 0, {a}};
    return ExprBuilder::make(std::move(n));
}

bool expr_equal(const ExprField& a, const ExprField& b) {
    const ExprNode &x = nd(a), &y = nd(b);
    if (&x == &y) return true;
    if (x.kind != y.kind || x.var != y.var || x.exponent != y.exponent ||
        x.value != y.value || x.args.size() != y.args.size())
        return false;
    for (std::size_t i = 0; i < x.args.size(); ++i)
        if (!expr_equal(x.args[i], y.args[i])) return false;
    return true;
}

ExprField make_mul(std::vector<ExprField> factors);

// splits a term into (rational coefficient, remaining factor)
std::pair<Rational, ExprField> split_coeff(const ExprField& t) {
    const ExprNode& n = nd(t);
    if (n.kind == ExprKind::Mul && nd(n.args[0]).kind == ExprKind::Const) {
        std::vector<ExprField> rest(n.args.begin() + 1, n.args.end());
        return {nd(n.args[0]).value, make_mul(std::move(rest))};
    }
    return {Rational(1), t};
}

// n-ary sum with flattening, constant folding, and zero removal
ExprField make_add(std::vector<ExprField> terms) {
    std::vector<ExprField> flat;
    Rational c = 0;
    for (auto& t : terms) {
        const ExprNode& n = nd(t);
        if (n.kind == ExprKind::Const) {
            c += n.value;
        } else if (n.kind == ExprKind::Add) {
            for (const auto& a : n.args) {
                if (nd(a).kind == ExprKind::Const)
                    c += nd(a).value;
                else
                    flat.push_back(a);
            }
        } else {
            flat.push_back(std::move(t));
        }
    }
    // combine structurally equal terms so differences cancel exactly
    std::vector<std::pair<Rational, ExprField>> grouped;
    for (const auto& t : flat) {
        auto [coeff, rest] = split_coeff(t);
        bool merged = false;
        for (auto& g : grouped)
            if (expr_equal(g.second, rest)) {
                g.first += coeff;
                merged = true;
                break;
            }
        if (!merged) grouped.emplace_back(coeff, rest);
    }
    std::vector<ExprField> out;
    for (auto& g : grouped) {
        if (g.first == 0) continue;
        out.push_back(g.first == 1 ? g.second : make_mul({make_const(g.first), g.second}));
    }
    if (c != 0) out.push_back(make_const(c));
    if (out.empty()) return make_const(0);
    if (out.size() == 1) return out[0];
    ExprNode n{ExprKind::Add, 0, 0, 0, std::move(out)};
    return ExprBuilder::make(std::move(n));
}

// n-ary product with flattening, constant folding, and annihilation by zero
ExprField make_mul(std::vector<ExprField> factors) {
    std::vector<ExprField> flat;
    Rational c = 1;
    for (auto& f : factors) {
        const ExprNode& n = nd(f);
        if (n.kind == ExprKind::Const) {
            c *= n.value;
        } else if (n.kind == ExprKind::Mul) {
            for (const auto& a : n.args) {
                if (nd(a).kind == ExprKind::Const)
                    c *= nd(a).value;
                else
                    flat.push_back(a);
            }
        } else {
            flat.push_back(std::move(f));
        }
    }
    if (c == 0 || flat.empty()) return make_const(c);
    if (c != 1) flat.insert(flat.begin(), make_const(c));
    if (flat.size() == 1) return flat[0];
    ExprNode n{ExprKind::Mul, 0, 0, 0, std::move(flat)};
    return ExprBuilder::make(std::move(n));
}

Rational rat_pow(const Rational& base, int e) {
    Rational r = 1;
    for (int i = 0; i < (e < 0 ? -e : e); ++i) r *= base;
    if (e < 0) {
        if (r == 0) throw ExprEvalError("zero raised to a negative power");
        r = Rational(1) / r;
    }
    return r;
}

} // namespace

ExprField::ExprField() : ExprField(Rational(0)) {}
ExprField::ExprField(int c) : ExprField(Rational(c)) {}
ExprField::ExprField(const Rational& c) { *this = make_const(c); }

ExprField ExprField::var(int index) {
    ExprNode n{ExprKind::Var, 0, index, 0, {}};
    return ExprBuilder::make(std::move(n));
}

bool ExprField::is_constant() const { return node_->kind == ExprKind::Const; }
bool ExprField::is_zero() const { return is_constant() && node_->value == 0; }

Rational ExprField::constant_value() const {
    if (!is_constant()) throw std::logic_error("expression is not constant");
    return node_->value;
}

ExprField operator+(const ExprField& a, const ExprField& b) { return make_add({a, b}); }
ExprField operator-(const ExprField& a, const ExprField& b) {
    return make_add({a, make_mul({make_const(-1), b})});
}
ExprField operator*(const ExprField& a, const ExprField& b) { return make_mul({a, b}); }
ExprField ExprField::operator-() const { return make_mul({make_const(-1), *this}); }

ExprField operator/(const ExprField& a, const ExprField& b) {
    const ExprNode& d = nd(b);
    if (d.kind == ExprKind::Const) {
        if (d.value == 0) throw ExprEvalError("division by the zero constant");
        return make_mul({make_const(Rational(1) / d.value), a});
    }
    if (nd(a).kind == ExprKind::Const && nd(a).value == 0) return a;
    ExprNode n{ExprKind::Div, 0, 0, 0, {a, b}};
    return ExprBuilder::make(std::move(n));
}

ExprField pow(const ExprField& base, int exponent) {
    const ExprNode& b = nd(base);
    if (exponent == 0) return make_const(1);
    if (exponent == 1) return base;
    if (b.kind == ExprKind::Const) return make_const(rat_pow(b.value, exponent));
    if (b.kind == ExprKind::Pow) return pow(b.args[0], b.exponent * exponent);
    ExprNode n{ExprKind::Pow, 0, 0, exponent, {base}};
    return ExprBuilder::make(std::move(n));
}

ExprField exp(const ExprField& a) {
    if (nd(a).kind == ExprKind::Const && nd(a).value == 0) return ExprField(1);
    return make_unary(ExprKind::Exp, a);
}
ExprField sin(const ExprField& a) {
    if (nd(a).kind == ExprKind::Const && nd(a).value == 0) return ExprField(0);
    return make_unary(ExprKind::Sin, a);
}
ExprField cos(const ExprField& a) {
    if (nd(a).kind == ExprKind::Const && nd(a).value == 0) return ExprField(1);
    return make_unary(ExprKind::Cos, a);
}
ExprField sqrt(const ExprField& a) {
    if (nd(a).kind == ExprKind::Const) {
        const Rational& v = nd(a).value;
        if (v == 0 || v == 1) return a;
        if (v < 0) throw ExprEvalError("square root of a negative constant");
    }
    return make_unary(ExprKind::Sqrt, a);
}

ExprField ExprField::derivative(int index) const {
    const ExprNode& n = *node_;
    switch (n.kind) {
    case ExprKind::Const: return ExprField(0);
    case ExprKind::Var: return ExprField(n.var == index ? 1 : 0);
    case ExprKind::Add: {
        std::vector<ExprField> parts;
        for (const auto& a : n.args) parts.push_back(a.derivative(index));
        return make_add(std::move(parts));
    }
    case ExprKind::Mul: {
        std::vector<ExprField> parts;
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            std::vector<ExprField> factors = n.args;
            factors[i] = n.args[i].derivative(index);
            parts.push_back(make_mul(std::move(factors)));
        }
        return make_add(std::move(parts));
    }
    case ExprKind::Pow:
        return ExprField(n.exponent) * pow(n.args[0], n.exponent - 1) *
               n.args[0].derivative(index);
    case ExprKind::Div: {
        const ExprField &u = n.args[0], &v = n.args[1];
        return (u.derivative(index) * v - u * v.derivative(index)) / (v * v);
    }
    case ExprKind::Exp: return *this * n.args[0].derivative(index);
    case ExprKind::Sin: return cos(n.args[0]) * n.args[0].derivative(index);
    case ExprKind::Cos: return -(sin(n.args[0]) * n.args[0].derivative(index));
    case ExprKind::Sqrt:
        return n.args[0].derivative(index) / (ExprField(2) * *this);
    }
    throw std::logic_error("unreachable expression kind");
}

double ExprField::eval(const std::vector<double>& point) const {
    const ExprNode& n = *node_;
    switch (n.kind) {
    case ExprKind::Const: return to_double(n.value);
    case ExprKind::Var:
        if (n.var < 0 || n.var >= static_cast<int>(point.size()))
            throw ExprEvalError("coordinate index out of range at evaluation");
        return point[static_cast<std::size_t>(n.var)];
    case ExprKind::Add: {
        double s = 0;
        for (const auto& a : n.args) s += a.eval(point);
        return s;
    }
    case ExprKind::Mul: {
        double p = 1;
        for (const auto& a : n.args) p *= a.eval(point);
        return p;
    }
    case ExprKind::Pow: {
        double b = n.args[0].eval(point);
        if (b == 0 && n.exponent < 0) throw ExprEvalError("zero raised to a negative power");
        return std::pow(b, n.exponent);
    }
    case ExprKind::Div: {
        double d = n.args[1].eval(point);
        if (d == 0) throw ExprEvalError("division by zero at evaluation");
        return n.args[0].eval(point) / d;
    }
    case ExprKind::Exp: return std::exp(n.args[0].eval(point));
    case ExprKind::Sin: return std::sin(n.args[0].eval(point));
    case ExprKind::Cos: return std::cos(n.args[0].eval(point));
    case ExprKind::Sqrt: {
        double v = n.args[0].eval(point);
        if (v < 0) throw ExprEvalError("square root of a negative value");
        return std::sqrt(v);
    }
    }
    throw std::logic_error("unreachable expression kind");
}

namespace {

// precedence levels: 0 sum, 1 product, 2 unary minus, 3 power/atom
void print(const ExprNode& n, const std::vector<std::string>& names, int parent,
           std::string& out) {
    auto name_of = [&](int i) {
        if (i >= 0 && i < static_cast<int>(names.size())) return names[static_cast<std::size_t>(i)];
        return "x" + std::to_string(i + 1);
    };
    switch (n.kind) {
    case ExprKind::Const: {
        bool wrap = (n.value < 0 && parent > 0) || (denominator(n.value) != 1 && parent >= 1);
        if (wrap) out += "(";
        out += to_string(n.value);
        if (wrap) out += ")";
        return;
    }
    case ExprKind::Var: out += name_of(n.var); return;
    case ExprKind::Add: {
        if (parent > 0) out += "(";
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            const ExprNode& a = nd(n.args[i]);
            bool negated = (a.kind == ExprKind::Const && a.value < 0) ||
                           (a.kind == ExprKind::Mul && nd(a.args[0]).kind == ExprKind::Const &&
                            nd(a.args[0]).value < 0);
            if (i > 0) out += negated ? " - " : " + ";
            else if (negated) out += "-";
            if (!negated) {
                print(a, names, 1, out);
                continue;
            }
            if (a.kind == ExprKind::Const) {
                ExprNode c{ExprKind::Const, -a.value, 0, 0, {}};
                print(c, names, 1, out);
            } else {
                Rational head = -nd(a.args[0]).value;
                std::vector<ExprField> rest(a.args.begin() + 1, a.args.end());
                print(nd(make_mul([&] {
                          rest.insert(rest.begin(), make_const(head));
                          return rest;
                      }())),
                      names, 1, out);
            }
        }
        if (parent > 0) out += ")";
        return;
    }
    case ExprKind::Mul:
        if (parent > 1) out += "(";
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i > 0) out += "*";
            print(nd(n.args[i]), names, 2, out);
        }
        if (parent > 1) out += ")";
        return;
    case ExprKind::Div:
        if (parent > 1) out += "(";
        print(nd(n.args[0]), names, 2, out);
        out += "/";
        print(nd(n.args[1]), names, 3, out);
        if (parent > 1) out += ")";
        return;
    case ExprKind::Pow:
        print(nd(n.args[0]), names, 3, out);
        out += "^";
        if (n.exponent < 0) out += "(" + std::to_string(n.exponent) + ")";
        else out += std::to_string(n.exponent);
        return;
    case ExprKind::Exp:
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Sqrt: {
        const char* f = n.kind == ExprKind::Exp   ? "exp"
                        : n.kind == ExprKind::Sin ? "sin"
                        : n.kind == ExprKind::Cos ? "cos"
                                                  : "sqrt";
        out += f;
        out += "(";
        print(nd(n.args[0]), names, 0, out);
        out += ")";
        return;
    }
    }
}

} // namespace

std::string ExprField::str(const std::vector<std::string>& names) const {
    std::string out;
    print(*node_, names, 0, out);
    return out;
}

namespace {

struct Parser {
    const std::string& text;
    const std::vector<std::string>& names;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ExprParseError(msg + " at column " + std::to_string(pos + 1) + " in '" + text + "'");
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    ExprField parse() {
        ExprField e = sum();
        skip_ws();
        if (pos != text.size()) fail("unexpected trailing input");
        return e;
    }

    ExprField sum() {
        ExprField e = product();
        for (;;) {
            if (eat('+')) e = e + product();
            else if (eat('-')) e = e - product();
            else return e;
        }
    }

    ExprField product() {
        ExprField e = unary();
        for (;;) {
            if (eat('*')) e = e * unary();
            else if (eat('/')) e = e / unary();
            else return e;
        }
    }

    ExprField unary() {
        if (eat('-')) return -unary();
        return power();
    }

    ExprField power() {
        ExprField base = atom();
        if (!eat('^')) return base;
        bool paren = eat('(');
        bool neg = eat('-');
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail("expected an integer exponent");
        int e = std::stoi(text.substr(start, pos - start));
        if (paren && !eat(')')) fail("expected ')' after exponent");
        return pow(base, neg ? -e : e);
    }

    ExprField atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            ExprField e = sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character");
    }

    ExprField number() {
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        Rational value(text.substr(start, pos - start).empty()
                           ? BigInt(0)
                           : BigInt(text.substr(start, pos - start)));
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            std::size_t fstart = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (fstart == pos && start + 1 == pos) fail("malformed number");
            std::string frac = text.substr(fstart, pos - fstart);
            if (!frac.empty()) {
                BigInt num(frac), den = 1;
                for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
                value += Rational(num, den);
            }
        }
        return ExprField(value);
    }

    ExprField identifier() {
        std::size_t start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == '_' || text[pos] == '\''))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (name == "exp" || name == "sin" || name == "cos" || name == "sqrt") {
            if (!eat('(')) fail("expected '(' after " + name);
            ExprField arg = sum();
            if (!eat(')')) fail("expected ')' after the argument of " + name);
            if (name == "exp") return exp(arg);
            if (name == "sin") return sin(arg);
            if (name == "cos") return cos(arg);
            return sqrt(arg);
        }
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return ExprField::var(static_cast<int>(i));
        fail("undeclared identifier '" + name + "'");
    }
};

} // namespace

ExprField parse_expr(const std::string& text, const std::vector<std::string>& names) {
    Parser p{text, names};
    return p.parse();
}

} // namespace edslab
