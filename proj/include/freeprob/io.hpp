#pragma once

#include <string>
#include <string_view>

#include "freeprob/cumulants.hpp"

namespace freeprob {

// Text tables:
//   alphabet x 1 2        name, arity, letter count (n for arity 2: n² letters)
//   nvars=2               total letters; may stand in for a single alphabet's count
//   degree=4
//   tracial=true          optional
//   table=cumulants       optional, default moments
//   1 = 1                 mandatory
//   x1 x1* = 1/2          unlisted words up to the degree are zero
// '#' starts a comment line. Headers come before the body.
enum class TableKind { moments, cumulants };

struct TableFile {
  TableKind kind = TableKind::moments;
  WordTable table;
  bool tracial = false;
};

TableFile parse_table(std::string_view text);
// ParseError when the file is a cumulant table
MomentFunctional parse_distribution(std::string_view text);
CumulantTable parse_cumulants(std::string_view text);

// canonical form: headers, then nonzero entries in term order
std::string format_table(const WordTable& table, TableKind kind, bool tracial);
std::string format_distribution(const MomentFunctional& phi);
std::string format_cumulants(const CumulantTable& kappa, bool tracial = false);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

// same functional on words of length <= degree
MomentFunctional truncate(const MomentFunctional& phi, int degree);

}  // namespace freeprob
