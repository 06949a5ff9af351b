#include "edslab/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

namespace edslab {

JsonValue JsonValue::array() {
    JsonValue v;
    v.kind_ = Kind::Array;
    return v;
}

JsonValue JsonValue::object() {
    JsonValue v;
    v.kind_ = Kind::Object;
    return v;
}

void JsonValue::push_back(JsonValue v) {
    if (kind_ != Kind::Array) throw std::logic_error("push_back on a non-array json value");
    items_.push_back(std::move(v));
}

JsonValue& JsonValue::operator[](const std::string& key) {
    if (kind_ != Kind::Object) throw std::logic_error("indexing a non-object json value");
    return members_[key];
}

const JsonValue* JsonValue::find(const std::string& key) const {
    if (kind_ != Kind::Object) return nullptr;
    auto it = members_.find(key);
    return it == members_.end() ? nullptr : &it->second;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
}

} // namespace

void JsonValue::write(std::string& out, int indent, int depth) const {
    std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    std::string closepad(static_cast<std::size_t>(indent * depth), ' ');
    switch (kind_) {
    case Kind::Null: out += "null"; break;
    case Kind::Bool: out += bool_ ? "true" : "false"; break;
    case Kind::Int: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", int_);
        out += buf;
        break;
    }
    case Kind::Double: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.17g", double_);
        out += buf;
        break;
    }
    case Kind::String: write_escaped(out, string_); break;
    case Kind::Array: {
        if (items_.empty()) {
            out += "[]";
            break;
        }
        out += "[\n";
        for (std::size_t i = 0; i < items_.size(); ++i) {
            out += pad;
            items_[i].write(out, indent, depth + 1);
            out += (i + 1 == items_.size()) ? "\n" : ",\n";
        }
        out += closepad + "]";
        break;
    }
    case Kind::Object: {
        if (members_.empty()) {
            out += "{}";
            break;
        }
        out += "{\n";
        std::size_t i = 0;
        for (const auto& [k, v] : members_) {
            out += pad;
            write_escaped(out, k);
            out += ": ";
            v.write(out, indent, depth + 1);
            out += (++i == members_.size()) ? "\n" : ",\n";
        }
        out += closepad + "}";
        break;
    }
    }
}

std::string JsonValue::dump(int indent) const {
    std::string out;
    write(out, indent, 0);
    out += "\n";
    return out;
}

bool RunReport::all_passed() const {
    for (const auto& [name, ok] : checks)
        if (!ok) return false;
    return true;
}

std::string RunReport::to_json() const {
    JsonValue root = JsonValue::object();
    root["command"] = JsonValue(command);
    root["inputs_digest"] = JsonValue(inputs_digest);
    root["seed"] = JsonValue(static_cast<long long>(seed));
    root["results"] = results;
    JsonValue ch = JsonValue::object();
    for (const auto& [name, ok] : checks) ch[name] = JsonValue(ok);
    root["checks"] = ch;
    root["passed"] = JsonValue(all_passed());
    return root.dump();
}

std::string RunReport::to_text() const {
    std::ostringstream out;
    out << "command: " << command << "\n";
    out << "inputs:  " << inputs_digest << "\n";
    out << "seed:    " << seed << "\n";
    out << "results:\n" << results.dump(2);
    for (const auto& [name, ok] : checks)
        out << (ok ? "PASS " : "FAIL ") << name << "\n";
    out << (all_passed() ? "verdict: pass" : "verdict: FAIL") << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "wall time: %.1f ms\n", wall_time_ms);
    out << buf;
    return out.str();
}

std::string content_digest(const std::vector<std::string>& inputs) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& s : inputs) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= 0xff; // separator between inputs
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

} // namespace edslab
