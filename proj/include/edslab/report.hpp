#pragma once

#include "edslab/rational.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace edslab {

/// Minimal JSON value with deterministic serialisation: object keys sorted,
/// doubles printed with 17 significant digits, rationals as "p/q" strings.
class JsonValue {
public:
    JsonValue() : kind_(Kind::Null) {}
    JsonValue(bool b) : kind_(Kind::Bool), bool_(b) {}
    JsonValue(int i) : kind_(Kind::Int), int_(i) {}
    JsonValue(long long i) : kind_(Kind::Int), int_(i) {}
    JsonValue(double d) : kind_(Kind::Double), double_(d) {}
    JsonValue(const char* s) : kind_(Kind::String), string_(s) {}
    JsonValue(std::string s) : kind_(Kind::String), string_(std::move(s)) {}
    JsonValue(const Rational& r) : kind_(Kind::String), string_(to_string(r)) {}

    static JsonValue array();
    static JsonValue object();

    void push_back(JsonValue v);              // array only
    JsonValue& operator[](const std::string&); // object only
    const JsonValue* find(const std::string&) const;

    bool is_object() const { return kind_ == Kind::Object; }
    const std::string& as_string() const { return string_; }

    std::string dump(int indent = 2) const;

private:
    enum class Kind { Null, Bool, Int, Double, String, Array, Object };
    Kind kind_;
    bool bool_ = false;
    long long int_ = 0;
    double double_ = 0;
    std::string string_;
    std::vector<JsonValue> items_;
    std::map<std::string, JsonValue> members_;

    void write(std::string& out, int indent, int depth) const;
};

/// Report emitted by every command: command name, digest of the input files,
/// seed, results, and per-check pass/fail.  Identical inputs and seed give
/// byte-identical serialisations; the wall time is therefore reported on the
/// text channel only, never inside the JSON body.
struct RunReport {
    std::string command;
    std::string inputs_digest;
    std::uint64_t seed = 0;
    JsonValue results = JsonValue::object();
    std::map<std::string, bool> checks;
    double wall_time_ms = 0;

    bool all_passed() const;
    std::string to_json() const;
    std::string to_text() const; // human-readable, includes the wall time
};

/// FNV-1a hash over the input strings (with a separator between them, so the
/// split into strings matters), as 16 hex digits.
std::string content_digest(const std::vector<std::string>& inputs);

} // namespace edslab
