#ifndef PGNBSC_TEXTIO_HPP
#define PGNBSC_TEXTIO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace pgnbsc::textio {

/// Shortest decimal that round-trips the exact double value.
std::string format_double(double v);

/// Strict numeric parsing; `origin` (a file path or similar) is prefixed to
/// the MalformedFile message when given.
double parse_double(const std::string& s, const std::string& origin = {});
long parse_long(const std::string& s, const std::string& origin = {});

std::vector<std::string> split(const std::string& line, char sep = ',');
std::string trim(const std::string& s);
std::string lower(const std::string& s);

std::string read_file(const std::string& path);                       // throws IoError
void write_file(const std::string& path, const std::string& content); // throws IoError

/// FNV-1a 64-bit, used for content hashes and deterministic row splits.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ull);
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull);

}  // namespace pgnbsc::textio

#endif
