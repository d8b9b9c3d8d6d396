#pragma once

#include <string>

namespace mcsguard {

/// Whole-file atomic write: writes to `<path>.tmp` and renames over the
/// target. Throws IoError naming the path on failure.
void atomic_write_file(const std::string& path, const std::string& contents);

/// Reads a whole file; throws IoError naming the path.
std::string read_file(const std::string& path);

}  // namespace mcsguard
