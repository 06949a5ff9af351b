#include "edslab/fieldfile.hpp"
#include "edslab/sysfile.hpp" // SysParseError

#include <algorithm>
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

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

struct NPSlot {
    const char* name;
    std::complex<double> NPScalars::*member;
};

constexpr NPSlot np_slots[] = {
    {"rho", &NPScalars::rho},       {"rhop", &NPScalars::rhop},
    {"tau", &NPScalars::tau},       {"taup", &NPScalars::taup},
    {"kappa", &NPScalars::kappa},   {"kappap", &NPScalars::kappap},
    {"sigma", &NPScalars::sigma},   {"sigmap", &NPScalars::sigmap},
    {"Psi2", &NPScalars::Psi2},     {"Phi11", &NPScalars::Phi11},
    {"Lambda", &NPScalars::Lambda},
};

} // namespace

const ExprField& FieldFile::field(const std::string& name) const {
    auto it = fields.find(name);
    if (it == fields.end()) throw SysParseError("the field file declares no field '" + name + "'");
    return it->second;
}

MetricField FieldFile::metric_or_default() const {
    if (metric) return *metric;
    if (coframe) return MetricField::from_coframe(*coframe);
    return MetricField::euclidean(dim());
}

FieldFile parse_field_file(const std::string& text) {
    FieldFile out;
    enum Section { None, Coordinates, Metric, Coframe, Fields, Np };
    Section sec = None;

    auto coord_index = [&](const std::string& name, int lineno) {
        auto it = std::find(out.coordinates.begin(), out.coordinates.end(), name);
        if (it == out.coordinates.end()) fail(lineno, "undeclared coordinate '" + name + "'");
        return static_cast<int>(it - out.coordinates.begin());
    };

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
            if (name == "coordinates") sec = Coordinates;
            else if (name == "metric") sec = Metric;
            else if (name == "coframe") sec = Coframe;
            else if (name == "fields") sec = Fields;
            else if (name == "np") sec = Np;
            else fail(lineno, "unknown section [" + name + "]");
            continue;
        }
        switch (sec) {
        case None: fail(lineno, "content before the first section header");
        case Coordinates:
            for (const auto& c : split_ws(line)) {
                if (std::find(out.coordinates.begin(), out.coordinates.end(), c) !=
                    out.coordinates.end())
                    fail(lineno, "duplicate coordinate '" + c + "'");
                out.coordinates.push_back(c);
            }
            break;
        case Metric: {
            int n = out.dim();
            if (n == 0) fail(lineno, "[coordinates] must precede [metric]");
            if (!out.metric) {
                out.metric.emplace();
                out.metric->dim = n;
                out.metric->g.assign(static_cast<std::size_t>(n),
                                     std::vector<ExprField>(static_cast<std::size_t>(n)));
            }
            auto words = split_ws(line);
            if (words.size() == 2 && words[0] == "signature") {
                if (words[1] == "riemannian") out.metric->signature = Signature::Riemannian;
                else if (words[1] == "lorentzian") out.metric->signature = Signature::Lorentzian;
                else fail(lineno, "unknown signature '" + words[1] + "'");
                break;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected '=' in a metric entry");
            auto lhs = split_ws(line.substr(0, eq));
            if (lhs.size() != 3 || lhs[0] != "g")
                fail(lineno, "metric entries read 'g <coord> <coord> = <expr>'");
            int i = coord_index(lhs[1], lineno), j = coord_index(lhs[2], lineno);
            ExprField e;
            try {
                e = parse_expr(line.substr(eq + 1), out.coordinates);
            } catch (const ExprParseError& ex) {
                fail(lineno, ex.what());
            }
            out.metric->g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = e;
            out.metric->g[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = e;
            break;
        }
        case Coframe: {
            int n = out.dim();
            if (n == 0) fail(lineno, "[coordinates] must precede [coframe]");
            if (!out.coframe) {
                out.coframe.emplace();
                out.coframe->eps.assign(static_cast<std::size_t>(n),
                                        std::vector<ExprField>(static_cast<std::size_t>(n)));
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected '=' in a coframe entry");
            auto lhs = split_ws(line.substr(0, eq));
            if (lhs.size() != 2 || lhs[0].size() < 2 || lhs[0][0] != 'e' || lhs[1].size() < 2 ||
                lhs[1][0] != 'd')
                fail(lineno, "coframe entries read 'e<a> d<coord> = <expr>'");
            int a = 0;
            try {
                a = std::stoi(lhs[0].substr(1));
            } catch (const std::exception&) {
                fail(lineno, "malformed coframe label '" + lhs[0] + "'");
            }
            if (a < 1 || a > n) fail(lineno, "coframe label out of range: " + lhs[0]);
            int mu = coord_index(lhs[1].substr(1), lineno);
            try {
                out.coframe->eps[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(mu)] =
                    parse_expr(line.substr(eq + 1), out.coordinates);
            } catch (const ExprParseError& ex) {
                fail(lineno, ex.what());
            }
            break;
        }
        case Fields: {
            auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected '=' in a field entry");
            auto lhs = split_ws(line.substr(0, eq));
            if (lhs.size() != 1) fail(lineno, "field entries read '<name> = <expr>'");
            try {
                out.fields[lhs[0]] = parse_expr(line.substr(eq + 1), out.coordinates);
            } catch (const ExprParseError& ex) {
                fail(lineno, ex.what());
            }
            break;
        }
        case Np: {
            if (!out.np) out.np.emplace();
            auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected '=' in an np entry");
            auto lhs = split_ws(line.substr(0, eq));
            auto rhs = split_ws(line.substr(eq + 1));
            if (lhs.size() != 1 || rhs.size() != 2)
                fail(lineno, "np entries read '<name> = <re> <im>'");
            double re = 0, im = 0;
            try {
                re = std::stod(rhs[0]);
                im = std::stod(rhs[1]);
            } catch (const std::exception&) {
                fail(lineno, "malformed complex literal");
            }
            bool found = false;
            for (const auto& slot : np_slots)
                if (lhs[0] == slot.name) {
                    (*out.np).*slot.member = {re, im};
                    found = true;
                    break;
                }
            if (!found) fail(lineno, "unknown np scalar '" + lhs[0] + "'");
            break;
        }
        }
    }
    if (out.coordinates.empty() && (out.metric || out.coframe || !out.fields.empty()))
        throw SysParseError("the field file declares no coordinates");
    return out;
}

std::string print_field_file(const FieldFile& f) {
    std::ostringstream out;
    out << "[coordinates]\n";
    for (std::size_t i = 0; i < f.coordinates.size(); ++i)
        out << f.coordinates[i] << (i + 1 == f.coordinates.size() ? "\n" : " ");

    if (f.metric) {
        out << "\n[metric]\n";
        if (f.metric->signature == Signature::Lorentzian) out << "signature lorentzian\n";
        for (int i = 0; i < f.metric->dim; ++i)
            for (int j = 0; j <= i; ++j) {
                const ExprField& e =
                    f.metric->g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (e.is_zero()) continue;
                out << "g " << f.coordinates[static_cast<std::size_t>(j)] << " "
                    << f.coordinates[static_cast<std::size_t>(i)] << " = "
                    << e.str(f.coordinates) << "\n";
            }
    }

    if (f.coframe) {
        out << "\n[coframe]\n";
        for (std::size_t a = 0; a < f.coframe->eps.size(); ++a)
            for (std::size_t mu = 0; mu < f.coframe->eps[a].size(); ++mu) {
                const ExprField& e = f.coframe->eps[a][mu];
                if (e.is_zero()) continue;
                out << "e" << a + 1 << " d" << f.coordinates[mu] << " = " << e.str(f.coordinates)
                    << "\n";
            }
    }

    if (!f.fields.empty()) {
        out << "\n[fields]\n";
        for (const auto& [name, e] : f.fields)
            out << name << " = " << e.str(f.coordinates) << "\n";
    }

    if (f.np) {
        out << "\n[np]\n";
        char buf[80];
        for (const auto& slot : np_slots) {
            std::complex<double> v = (*f.np).*slot.member;
            std::snprintf(buf, sizeof buf, "%s = %.17g %.17g", slot.name, v.real(), v.imag());
            out << buf << "\n";
        }
    }
    return out.str();
}

} // namespace edslab
