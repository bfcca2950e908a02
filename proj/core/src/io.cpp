#include "qwalk/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace qwalk {

std::string format_g17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

Json Json::object() {
    Json j;
    j.kind_ = Kind::Object;
    return j;
}

Json Json::array() {
    Json j;
    j.kind_ = Kind::Array;
    return j;
}

Json& Json::set(const std::string& key, Json value) {
    if (kind_ != Kind::Object) throw std::logic_error("Json::set on non-object");
    obj_.emplace_back(key, std::move(value));
    return *this;
}

Json& Json::push(Json value) {
    if (kind_ != Kind::Array) throw std::logic_error("Json::push on non-array");
    arr_.push_back(std::move(value));
    return *this;
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
}

}  // namespace

void Json::dump_to(std::string& out, int indent, int depth) const {
    const bool compact = indent <= 0;
    const std::string pad(compact ? 0 : std::size_t(indent) * std::size_t(depth), ' ');
    const std::string pad_in(compact ? 0 : std::size_t(indent) * std::size_t(depth + 1), ' ');
    switch (kind_) {
        case Kind::Null: out += "null"; break;
        case Kind::Bool: out += bool_ ? "true" : "false"; break;
        case Kind::Int: out += std::to_string(int_); break;
        case Kind::Double: out += format_g17(num_); break;
        case Kind::String: append_escaped(out, str_); break;
        case Kind::Array: {
            if (arr_.empty()) {
                out += "[]";
                break;
            }
            out += compact ? "[" : "[\n";
            for (std::size_t i = 0; i < arr_.size(); ++i) {
                out += pad_in;
                arr_[i].dump_to(out, indent, depth + 1);
                if (i + 1 < arr_.size()) out += compact ? ", " : ",";
                if (!compact) out += '\n';
            }
            out += pad + "]";
            break;
        }
        case Kind::Object: {
            if (obj_.empty()) {
                out += "{}";
                break;
            }
            out += compact ? "{" : "{\n";
            for (std::size_t i = 0; i < obj_.size(); ++i) {
                out += pad_in;
                append_escaped(out, obj_[i].first);
                out += ": ";
                obj_[i].second.dump_to(out, indent, depth + 1);
                if (i + 1 < obj_.size()) out += compact ? ", " : ",";
                if (!compact) out += '\n';
            }
            out += pad + "}";
            break;
        }
    }
}

std::string Json::dump(int indent) const {
    std::string out;
    dump_to(out, indent, 0);
    out += '\n';
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

template <typename T, typename Conv>
std::vector<T> parse_list(const std::string& text, Conv conv) {
    std::vector<T> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(start, comma - start);
        if (!item.empty()) values.push_back(conv(item));
        start = comma + 1;
        if (comma == text.size()) break;
    }
    if (values.empty()) throw std::invalid_argument("empty list: '" + text + "'");
    return values;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    return parse_list<double>(text, [](const std::string& s) {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("bad number: '" + s + "'");
        return v;
    });
}

std::vector<int> parse_int_list(const std::string& text) {
    return parse_list<int>(text, [](const std::string& s) {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("bad integer: '" + s + "'");
        return v;
    });
}

}  // namespace qwalk
