#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace edslab {

enum class SymbolKind {
    Coordinate,
    ConnectionCoefficient,
    Curvature,
    Jet,
    Auxiliary,
};

std::string to_string(SymbolKind k);
SymbolKind symbol_kind_from_string(const std::string& s);

/// Process-wide interning of symbol names.  Ids are dense and assigned in
/// registration order, which is deterministic for a fixed command sequence;
/// the graded-lex monomial order is defined over these ids.
class SymbolPool {
public:
    static SymbolPool& instance();

    int intern(const std::string& name);
    const std::string& name(int id) const;
    int lookup(const std::string& name) const; // -1 if absent

private:
    mutable std::mutex mu_;
    std::map<std::string, int> ids_;
    std::vector<std::string> names_;
};

inline int sym(const std::string& name) { return SymbolPool::instance().intern(name); }
inline const std::string& sym_name(int id) { return SymbolPool::instance().name(id); }

/// Declared symbols of one context, with their kinds.  Names are unique by
/// construction; Scalars over a context may only reference declared symbols
/// (enforced where the spec of an operation demands it).
class SymbolTable {
public:
    int declare(const std::string& name, SymbolKind kind);
    bool declared(int id) const { return kinds_.count(id) != 0; }
    SymbolKind kind(int id) const;
    const std::map<int, SymbolKind>& entries() const { return kinds_; }

private:
    std::map<int, SymbolKind> kinds_;
};

} // namespace edslab
