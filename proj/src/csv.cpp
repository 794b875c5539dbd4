#include "shiftconv/csv.hpp"

#include <charconv>
#include <ostream>

#include "shiftconv/version.hpp"

namespace shiftconv::csv {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_provenance(std::ostream& out, std::uint64_t seed,
                      const std::string& command_line) {
  out << "# shiftconv " << kVersion << " seed=" << seed << " cmd=\"" << command_line
      << "\"\n";
}

}  // namespace shiftconv::csv
