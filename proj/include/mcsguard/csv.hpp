#pragma once

#include <iosfwd>
#include <string>

#include "mcsguard/task.hpp"

namespace mcsguard {

/// Header line of the dataset CSV schema (without the trailing newline).
const std::string& dataset_csv_header();

/// Dataset CSV: header row, comma separated, LF endings, latitude and
/// longitude with 6 decimal places.
std::string dataset_to_csv(const Dataset& dataset);

/// Strict parser for the dataset CSV schema. Validates field types,
/// value ranges, the on_peak/hour invariant, id uniqueness and
/// chronological ordering; throws ParseError naming the offending
/// line and field. The returned dataset has origin `loaded`.
Dataset dataset_from_csv(std::istream& in);
Dataset dataset_from_csv(const std::string& text);

}  // namespace mcsguard
