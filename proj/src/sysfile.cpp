#include "edslab/sysfile.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace edslab {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw SysParseError("line " + std::to_string(line) + ": " + msg);
}

std::string trimmed(std::string s) {
    auto cut = s.find('#');
    if (cut != std::string::npos) s.erase(cut);
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Token {
    enum Kind { Ident, Number, Op, End } kind = End;
    std::string text;
    Rational value;
};

struct FormParser {
    const CoframeContext& ctx;
    const std::string& text;
    int line;
    std::size_t pos = 0;
    Token tok;

    FormParser(const CoframeContext& c, const std::string& t, int l) : ctx(c), text(t), line(l) {
        advance();
    }

    [[noreturn]] void err(const std::string& msg) const { fail(line, msg); }

    void advance() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) {
            tok = {Token::End, "", 0};
            return;
        }
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            BigInt num(text.substr(start, pos - start));
            BigInt den = 1;
            if (pos < text.size() && text[pos] == '/') {
                ++pos;
                std::size_t ds = pos;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
                if (ds == pos) err("expected a denominator after '/'");
                den = BigInt(text.substr(ds, pos - ds));
            }
            tok = {Token::Number, "", Rational(num, den)};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos;
            while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                         text[pos] == '_'))
                ++pos;
            tok = {Token::Ident, text.substr(start, pos - start), 0};
            return;
        }
        if (std::string("+-*^()").find(c) != std::string::npos) {
            ++pos;
            tok = {Token::Op, std::string(1, c), 0};
            return;
        }
        err(std::string("unexpected character '") + c + "'");
    }

    bool eat_op(const std::string& s) {
        if (tok.kind == Token::Op && tok.text == s) {
            advance();
            return true;
        }
        return false;
    }

    Form parse() {
        Form f = expr();
        if (tok.kind != Token::End) err("unexpected trailing input");
        return f;
    }

    Form expr() {
        Form acc = term();
        for (;;) {
            if (eat_op("+")) acc = add(acc, term());
            else if (eat_op("-")) acc = add(acc, term().scaled(Scalar(-1)));
            else return acc;
        }
    }

    Form add(const Form& a, const Form& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.degree() != b.degree()) err("adding forms of different degrees");
        return a + b;
    }

    Form term() {
        Form acc = factor();
        for (;;) {
            if (eat_op("*") || eat_op("^")) acc = product(acc, factor());
            else return acc;
        }
    }

    Form product(const Form& a, const Form& b) {
        if (a.degree() == 0) return b.scaled(a.coefficient({}));
        if (b.degree() == 0) return a.scaled(b.coefficient({}));
        return wedge(a, b);
    }

    // exponentiation binds tighter than the unary minus: -s^2 reads -(s^2)
    Form factor() {
        if (eat_op("-")) return factor().scaled(Scalar(-1));
        return power();
    }

    Form power() {
        Form acc = primary();
        while (acc.degree() == 0 && tok.kind == Token::Op && tok.text == "^") {
            std::size_t mark = pos;
            Token before = tok;
            advance();
            if (tok.kind != Token::Number) { // a wedge with a scalar factor
                pos = mark;
                tok = before;
                break;
            }
            if (denominator(tok.value) != 1 || tok.value < 0)
                err("exponents must be nonnegative integers");
            int e = numerator(tok.value).convert_to<int>();
            acc = Form::scalar(acc.coefficient({}).pow(e));
            advance();
        }
        return acc;
    }

    Form primary() {
        if (eat_op("(")) {
            Form f = expr();
            if (!eat_op(")")) err("expected ')'");
            return f;
        }
        if (tok.kind == Token::Number) {
            Form f = Form::scalar(Scalar(tok.value));
            advance();
            return f;
        }
        if (tok.kind == Token::Ident) {
            std::string name = tok.text;
            advance();
            if (name == "d" && eat_op("(")) {
                if (tok.kind != Token::Ident) err("expected a generator inside d(...)");
                std::string gen = tok.text;
                advance();
                if (!eat_op(")")) err("expected ')' after d(" + gen + ")");
                if (!ctx.has_generator(gen)) err("undeclared generator '" + gen + "'");
                auto it = ctx.structure.find(ctx.generator(gen));
                if (it == ctx.structure.end())
                    err("generator '" + gen + "' has no structure equation yet");
                return it->second;
            }
            if (ctx.has_generator(name)) return Form::generator(ctx.generator(name));
            int id = SymbolPool::instance().lookup(name);
            if (id >= 0 && ctx.symbols->declared(id)) return Form::scalar(Scalar::variable(id));
            err("undeclared identifier '" + name + "'");
        }
        err("expected a factor");
    }
};

Form parse_form(const CoframeContext& ctx, const std::string& text, int line) {
    FormParser p(ctx, text, line);
    return p.parse();
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

} // namespace

SystemFile parse_system_file(const std::string& text) {
    SystemFile out;
    CoframeContext& ctx = out.system.ctx;

    enum Section { None, Generators, Symbols, Structure, Ideal, Independence, Relations };
    Section sec = None;
    std::map<int, int> structure_lines; // generator id -> defining line

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trimmed(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "malformed section header");
            std::string name = line.substr(1, line.size() - 2);
            if (name == "generators") sec = Generators;
            else if (name == "symbols") sec = Symbols;
            else if (name == "structure") sec = Structure;
            else if (name == "ideal") sec = Ideal;
            else if (name == "independence") sec = Independence;
            else if (name == "relations") sec = Relations;
            else fail(lineno, "unknown section [" + name + "]");
            continue;
        }
        switch (sec) {
        case None: fail(lineno, "content before the first section header");
        case Generators:
            for (const auto& g : split_ws(line)) {
                if (ctx.has_generator(g)) fail(lineno, "duplicate generator '" + g + "'");
                ctx.add_generator(g);
            }
            break;
        case Symbols: {
            auto words = split_ws(line);
            if (words.size() != 2) fail(lineno, "expected 'name kind'");
            SymbolKind kind;
            try {
                kind = symbol_kind_from_string(words[1]);
            } catch (const std::exception& e) {
                fail(lineno, e.what());
            }
            ctx.symbols->declare(words[0], kind);
            break;
        }
        case Structure: {
            auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected '=' in a structure equation");
            auto lhs = split_ws(line.substr(0, eq));
            if (lhs.size() != 2 || lhs[0] != "d")
                fail(lineno, "structure equations read 'd <generator> = <form>'");
            if (!ctx.has_generator(lhs[1])) fail(lineno, "undeclared generator '" + lhs[1] + "'");
            int id = ctx.generator(lhs[1]);
            if (structure_lines.count(id))
                fail(lineno, "generator '" + lhs[1] + "' already has a structure equation on line " +
                                 std::to_string(structure_lines[id]));
            structure_lines[id] = lineno;
            Form rhs = parse_form(ctx, line.substr(eq + 1), lineno);
            if (!rhs.is_zero() && rhs.degree() != 2)
                fail(lineno, "the structure equation of '" + lhs[1] + "' is not a 2-form");
            if (rhs.is_zero()) rhs = Form(2);
            ctx.structure[id] = rhs;
            break;
        }
        case Ideal:
            out.system.generators.push_back(parse_form(ctx, line, lineno));
            break;
        case Independence: {
            if (!out.system.independence.is_zero())
                fail(lineno, "the independence condition was already given");
            out.system.independence = parse_form(ctx, line, lineno);
            break;
        }
        case Relations:
            out.relations.push_back(parse_form(ctx, line, lineno));
            break;
        }
    }

    std::vector<std::string> missing;
    for (const auto& [name, id] : ctx.gen_ids)
        if (!structure_lines.count(id)) missing.push_back(name);
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw SysParseError("generators without a structure equation: " + list);
    }
    return out;
}

ExteriorSystem parse_system(const std::string& text) { return parse_system_file(text).system; }

std::string print_system_file(const SystemFile& f) {
    const CoframeContext& ctx = f.system.ctx;
    std::ostringstream out;
    out << "[generators]\n";
    for (int i = 0; i < ctx.dim(); ++i)
        out << ctx.gen_names[static_cast<std::size_t>(i)] << (i + 1 == ctx.dim() ? "\n" : " ");

    std::vector<std::pair<std::string, SymbolKind>> symbols;
    for (const auto& [id, kind] : ctx.symbols->entries()) symbols.emplace_back(sym_name(id), kind);
    std::sort(symbols.begin(), symbols.end());
    if (!symbols.empty()) {
        out << "\n[symbols]\n";
        for (const auto& [name, kind] : symbols) out << name << " " << to_string(kind) << "\n";
    }

    out << "\n[structure]\n";
    for (int i = 0; i < ctx.dim(); ++i) {
        auto it = ctx.structure.find(i);
        out << "d " << ctx.gen_names[static_cast<std::size_t>(i)] << " = "
            << (it == ctx.structure.end() ? "0" : form_str(it->second, ctx)) << "\n";
    }

    out << "\n[ideal]\n";
    for (const auto& g : f.system.generators) out << form_str(g, ctx) << "\n";

    out << "\n[independence]\n";
    out << form_str(f.system.independence, ctx) << "\n";

    if (!f.relations.empty()) {
        out << "\n[relations]\n";
        for (const auto& r : f.relations) out << form_str(r, ctx) << "\n";
    }
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SysParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SysParseError("cannot write " + path);
    out << text;
}

} // namespace edslab
