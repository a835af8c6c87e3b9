#pragma once

#include <string>
#include <utility>

#include "chemred/mechanism.hpp"

namespace chemred {

struct ParseError : MechError {
  ParseError(const std::string& msg, int line)
      : MechError("line " + std::to_string(line) + ": " + msg), line(line) {}
  int line;
};

/// Parse CHEMKIN-II mechanism + NASA-7 thermo text into a Mechanism.
/// Rate parameters are converted to SI (kmol, m3, s, J) here.
Mechanism parse_mechanism(const std::string& mech_text,
                          const std::string& thermo_text);

Mechanism load_mechanism(const std::string& mech_path,
                         const std::string& thermo_path);

/// Regenerate CHEMKIN-II text; round-trips through parse_mechanism with all
/// parameters preserved to better than 1e-9 relative.
std::pair<std::string, std::string> write_mechanism(const Mechanism& m);

/// FNV-1a hash of both emitted files, recorded in reports for provenance.
std::string mechanism_content_hash(const Mechanism& m);

}  // namespace chemred
