#include "mlab/report.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mlab {

namespace {

std::string format_number(double v) {
    if (!std::isfinite(v)) return v > 0 ? "1e999" : (v < 0 ? "-1e999" : "null");
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write(const nlohmann::json& j, std::string& out, int indent) {
    const std::string pad(indent, ' ');
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + "  \"" + it.key() + "\": ";
            write(it.value(), out, indent + 2);
        }
        out += "\n" + pad + "}";
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[";
        bool first = true;
        for (const auto& v : j) {
            if (!first) out += ", ";
            first = false;
            write(v, out, indent);
        }
        out += "]";
        return;
    }
    case nlohmann::json::value_t::number_float:
        out += format_number(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

} // namespace

std::string emit_json(const nlohmann::json& doc) {
    std::string out;
    write(doc, out, 0);
    out += "\n";
    return out;
}

std::string emit_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i)
            os << format_number(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
    return os.str();
}

} // namespace mlab
