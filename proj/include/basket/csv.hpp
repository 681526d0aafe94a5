#pragma once

#include <string>
#include <vector>

namespace basket {

// RFC-4180-style quoting: fields containing comma, quote, or newline get
// quoted, embedded quotes doubled.
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

std::string format_double(double v, int decimals = -1);  // -1: shortest round-trip

}  // namespace basket
