#ifndef FRONTDOOR_GRAPH_IO_HPP
#define FRONTDOOR_GRAPH_IO_HPP

#include <frontdoor/smcm.hpp>

#include <iosfwd>
#include <string>

namespace frontdoor {

// Line-oriented graph text:
//
//   smcm <n>
//   d <i> <j>          directed edge i -> j
//   b <i> <j>          bidirected edge i <-> j
//   name <i> <label>   optional node label
//   role t <i>
//   role y <i>
//   role b <i>...
//
// Tokens are whitespace-separated and '#' starts a comment. Roles are
// all-or-nothing: t and y must both appear, and b defaults to empty.
Smcm parse_smcm(std::istream& in);
Smcm parse_smcm(const std::string& text);
Smcm read_smcm_file(const std::string& path);

// Canonical form; parse_smcm(write_smcm(g)) == g.
std::string write_smcm(const Smcm& g);

}  // namespace frontdoor

#endif  // FRONTDOOR_GRAPH_IO_HPP
