#include "formats.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xover {

std::string fmt12(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

const char* error_code_tag(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "invalid";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::NotPositiveDefinite: return "notpd";
        case ErrorCode::Unsupported: return "unsupported";
        case ErrorCode::Capacity: return "capacity";
        case ErrorCode::Io: return "io";
        case ErrorCode::Internal: return "internal";
    }
    return "internal";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) fail(ErrorCode::Io, "short write to '" + path + "'");
}

} // namespace xover
