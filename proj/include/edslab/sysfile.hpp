#pragma once

#include "edslab/eds.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace edslab {

struct SysParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Line-oriented description of an exterior system: sections [generators],
/// [symbols], [structure], [ideal], [independence], and optionally
/// [relations].  `#` starts a comment.  Structure lines read
/// `d w1 = - w12^w2 - w13^w3 - w14^w4`; every generator must get exactly one
/// structure equation.  Scalar coefficients are rational literals `p/q` and
/// declared symbols; `d(name)` expands to the structure equation of `name`.
struct SystemFile {
    ExteriorSystem system;
    std::vector<Form> relations; // empty unless a [relations] section appears
};

SystemFile parse_system_file(const std::string& text);
ExteriorSystem parse_system(const std::string& text);

/// Canonical form: parse(print(parse(x))) == parse(x) and printing a parsed
/// file reproduces its own print byte-for-byte.
std::string print_system_file(const SystemFile& f);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace edslab
