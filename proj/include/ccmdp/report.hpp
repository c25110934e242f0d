#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ccmdp {

// Ordered collection of report fields with two stable renderings: plain
// "key value" lines and a flat JSON object.  Field order is insertion order
// in both, keys are snake_case, and numbers use shortest round-trip
// formatting, so identical runs emit byte-identical output.
class Report {
  public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, const char* value);
    void add(const std::string& key, double value);
    void add(const std::string& key, std::int64_t value);
    void add(const std::string& key, int value) { add(key, static_cast<std::int64_t>(value)); }
    void add(const std::string& key, bool value);

    std::string text() const;
    std::string json() const;

  private:
    enum class Kind { Text, Real, Integer, Boolean };
    struct Field {
        std::string key;
        Kind kind = Kind::Text;
        std::string str;
        double real = 0;
        std::int64_t integer = 0;
        bool boolean = false;
    };
    std::vector<Field> fields_;
};

// Shortest decimal string that parses back to exactly this double.
std::string format_shortest(double value);

}  // namespace ccmdp
