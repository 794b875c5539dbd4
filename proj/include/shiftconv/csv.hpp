#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace shiftconv::csv {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// `# shiftconv <version> seed=<seed> cmd="..."` -- every emitted CSV starts
// with this line so a report can be regenerated from its own header.
void write_provenance(std::ostream& out, std::uint64_t seed,
                      const std::string& command_line);

}  // namespace shiftconv::csv
