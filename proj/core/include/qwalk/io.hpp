#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qwalk {

/// Fixed 17-significant-digit rendering used for every numeric output.
std::string format_g17(double value);

/// Minimal ordered JSON value: objects keep insertion order and doubles are
/// rendered with format_g17, so reports are byte-deterministic.
class Json {
  public:
    Json() : kind_(Kind::Null) {}
    Json(bool b) : kind_(Kind::Bool), bool_(b) {}
    Json(double d) : kind_(Kind::Double), num_(d) {}
    Json(int i) : kind_(Kind::Int), int_(i) {}
    Json(long long i) : kind_(Kind::Int), int_(i) {}
    Json(const char* s) : kind_(Kind::String), str_(s) {}
    Json(std::string s) : kind_(Kind::String), str_(std::move(s)) {}

    static Json object();
    static Json array();

    Json& set(const std::string& key, Json value);  // object
    Json& push(Json value);                         // array

    std::string dump(int indent = 2) const;

  private:
    enum class Kind { Null, Bool, Int, Double, String, Array, Object };
    Kind kind_;
    bool bool_ = false;
    long long int_ = 0;
    double num_ = 0.0;
    std::string str_;
    std::vector<Json> arr_;
    std::vector<std::pair<std::string, Json>> obj_;

    void dump_to(std::string& out, int indent, int depth) const;
};

/// Writes content to path, creating parent directories as needed.
void write_file(const std::string& path, const std::string& content);

/// Parses a comma-separated list of doubles, e.g. "0.1,0.5,0.9".
std::vector<double> parse_double_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace qwalk
