#ifndef FRONTDOOR_FIXTURES_HPP
#define FRONTDOOR_FIXTURES_HPP

#include <frontdoor/smcm.hpp>

#include <optional>
#include <string>
#include <vector>

namespace frontdoor {

// Graphs compiled in from fixtures/*.smcm, sorted by name.
std::vector<std::string> fixture_names();
std::optional<std::string> fixture_text(const std::string& name);
// Throws std::invalid_argument for unknown names.
Smcm load_fixture(const std::string& name);

// The six random ten-node graphs used for the synthetic ATE experiments.
std::vector<std::string> random_fixture_names();

}  // namespace frontdoor

#endif  // FRONTDOOR_FIXTURES_HPP
