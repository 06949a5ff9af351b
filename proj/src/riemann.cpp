#include "edslab/riemann.hpp"

namespace edslab {

RiemannIndex RiemannIndex::canonical(int a, int b, int c, int d) {
    RiemannIndex r;
    if (a == b || c == d) {
        r.sign = 0;
        return r;
    }
    int s = 1;
    if (a > b) {
        std::swap(a, b);
        s = -s;
    }
    if (c > d) {
        std::swap(c, d);
        s = -s;
    }
    if (std::pair{a, b} > std::pair{c, d}) {
        std::swap(a, c);
        std::swap(b, d);
    }
    r.a = a;
    r.b = b;
    r.c = c;
    r.d = d;
    r.sign = s;
    return r;
}

std::string RiemannIndex::symbol_name() const {
    return "R" + std::to_string(a) + std::to_string(b) + std::to_string(c) + std::to_string(d);
}

Scalar RiemannIndex::component(int a, int b, int c, int d) {
    RiemannIndex r = canonical(a, b, c, d);
    if (r.sign == 0) return Scalar();
    Scalar v = Scalar::variable(r.symbol_name());
    return r.sign == 1 ? v : -v;
}

std::optional<RiemannIndex> RiemannIndex::parse(const std::string& name) {
    if (name.size() != 5 || name[0] != 'R') return std::nullopt;
    int idx[4];
    for (int k = 0; k < 4; ++k) {
        char ch = name[static_cast<size_t>(k) + 1];
        if (ch < '1' || ch > '9') return std::nullopt;
        idx[k] = ch - '0';
    }
    RiemannIndex r = RiemannIndex::canonical(idx[0], idx[1], idx[2], idx[3]);
    if (r.sign != 1 || r.a != idx[0] || r.b != idx[1] || r.c != idx[2] || r.d != idx[3])
        return std::nullopt; // only canonical names are valid symbols
    return r;
}

Scalar reduce_first_bianchi(const Scalar& s) {
    int id = SymbolPool::instance().lookup("R1423");
    if (id < 0 || s.degree_in(id) == 0) return s;
    std::map<int, Scalar> sub;
    sub.emplace(id, Scalar::variable("R1324") - Scalar::variable("R1234"));
    return s.substitute(sub);
}

} // namespace edslab
