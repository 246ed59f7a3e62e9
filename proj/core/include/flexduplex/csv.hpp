#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace flexduplex::csv {

/// Splits one unquoted CSV line; surrounding whitespace is trimmed per field.
std::vector<std::string> split(std::string_view line, char sep = ',');

std::string_view trim(std::string_view s);

/// Locale-independent parse of the whole field; throws on trailing garbage.
double to_double(std::string_view s);
long long to_integer(std::string_view s);

}  // namespace flexduplex::csv
