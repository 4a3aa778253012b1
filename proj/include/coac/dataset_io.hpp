#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "coac/regression.hpp"

namespace coac {

/// Reads CSV with header `x,y` or `x,y,y_bar`. Decimal parsing is
/// locale-independent; non-finite or malformed rows raise ParseError naming
/// the 1-based line number.
Dataset read_dataset_csv(std::istream& in, std::string_view source = "<stream>");
Dataset load_dataset_csv(const std::filesystem::path& path);

void write_dataset_csv(std::ostream& out, const Dataset& dataset);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

} // namespace coac
