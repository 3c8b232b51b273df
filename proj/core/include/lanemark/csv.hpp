#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lanemark::csv {

/// Quotes a field if it contains a comma, quote, or newline.
std::string escape(const std::string& field);

/// Fixed-precision formatting so emitted files are byte-stable.
std::string format(double value, int decimals);

/// Reads all records (quote-aware). Blank lines are skipped.
std::vector<std::vector<std::string>> read(std::istream& in);

} // namespace lanemark::csv
