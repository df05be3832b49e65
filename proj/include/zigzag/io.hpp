#ifndef ZIGZAG_IO_HPP
#define ZIGZAG_IO_HPP

#include <cstdint>
#include <string>

namespace zigzag {

// Deterministic double formatting for CSV artifacts; infinities serialize as
// the "inf" literal.
std::string fmt_double(double v);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

std::uint64_t fnv1a_hash(const std::string& bytes);

}  // namespace zigzag

#endif
