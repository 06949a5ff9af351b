#include "edslab/symbols.hpp"

namespace edslab {

std::string to_string(SymbolKind k) {
    switch (k) {
    case SymbolKind::Coordinate: return "coordinate";
    case SymbolKind::ConnectionCoefficient: return "connection";
    case SymbolKind::Curvature: return "curvature";
    case SymbolKind::Jet: return "jet";
    case SymbolKind::Auxiliary: return "auxiliary";
    }
    return "?";
}

SymbolKind symbol_kind_from_string(const std::string& s) {
    if (s == "coordinate") return SymbolKind::Coordinate;
    if (s == "connection") return SymbolKind::ConnectionCoefficient;
    if (s == "curvature") return SymbolKind::Curvature;
    if (s == "jet") return SymbolKind::Jet;
    if (s == "auxiliary") return SymbolKind::Auxiliary;
    throw std::runtime_error("unknown symbol kind: " + s);
}

SymbolPool& SymbolPool::instance() {
    static SymbolPool pool;
    return pool;
}

int SymbolPool::intern(const std::string& name) {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
}

const std::string& SymbolPool::name(int id) const {
    std::lock_guard<std::mutex> lk(mu_);
    return names_.at(static_cast<size_t>(id));
}

int SymbolPool::lookup(const std::string& name) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = ids_.find(name);
    return it == ids_.end() ? -1 : it->second;
}

int SymbolTable::declare(const std::string& name, SymbolKind kind) {
    int id = sym(name);
    auto it = kinds_.find(id);
    if (it != kinds_.end()) {
        if (it->second != kind)
            throw std::runtime_error("symbol '" + name + "' redeclared with a different kind");
        return id;
    }
    kinds_.emplace(id, kind);
    return id;
}

SymbolKind SymbolTable::kind(int id) const {
    auto it = kinds_.find(id);
    if (it == kinds_.end())
        throw std::runtime_error("symbol '" + sym_name(id) + "' not declared");
    return it->second;
}

} // namespace edslab
