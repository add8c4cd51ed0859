#pragma once

#include <string>

#include "errors.hpp"

namespace xover {

// 12 significant digits, '.' decimal point, locale independent.
std::string fmt12(double v);

// Short tag used in CSV error cells and the C API.
const char* error_code_tag(ErrorCode code);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace xover
