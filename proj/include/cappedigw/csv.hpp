#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cigw::csv {

/// Shortest decimal text that round-trips to the same double.
std::string num(double value);

/// Splits one line on commas. No quoting support; numeric files only.
std::vector<std::string_view> split(std::string_view line);

/// Parses a whole cell as a double; returns false on trailing garbage.
bool parse_double(std::string_view cell, double& out);

}  // namespace cigw::csv
