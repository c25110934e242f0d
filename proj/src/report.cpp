#include "ccmdp/report.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include <json.hpp>

namespace ccmdp {

std::string format_shortest(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void Report::add(const std::string& key, const std::string& value) {
    Field f;
    f.key = key;
    f.kind = Kind::Text;
    f.str = value;
    fields_.push_back(std::move(f));
}

void Report::add(const std::string& key, const char* value) { add(key, std::string(value)); }

void Report::add(const std::string& key, double value) {
    Field f;
    f.key = key;
    f.kind = Kind::Real;
    f.real = value;
    fields_.push_back(std::move(f));
}

void Report::add(const std::string& key, std::int64_t value) {
    Field f;
    f.key = key;
    f.kind = Kind::Integer;
    f.integer = value;
    fields_.push_back(std::move(f));
}

void Report::add(const std::string& key, bool value) {
    Field f;
    f.key = key;
    f.kind = Kind::Boolean;
    f.boolean = value;
    fields_.push_back(std::move(f));
}

std::string Report::text() const {
    std::string out;
    for (const Field& f : fields_) {
        out += f.key;
        out += ' ';
        switch (f.kind) {
            case Kind::Text: out += f.str; break;
            case Kind::Real: out += format_shortest(f.real); break;
            case Kind::Integer: out += std::to_string(f.integer); break;
            case Kind::Boolean: out += f.boolean ? "true" : "false"; break;
        }
        out += '\n';
    }
    return out;
}

std::string Report::json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const Field& f : fields_) {
        switch (f.kind) {
            case Kind::Text: j[f.key] = f.str; break;
            case Kind::Real: j[f.key] = f.real; break;
            case Kind::Integer: j[f.key] = f.integer; break;
            case Kind::Boolean: j[f.key] = f.boolean; break;
        }
    }
    return j.dump(2) + "\n";
}

}  // namespace ccmdp
