#include <frontdoor/fixtures.hpp>
#include <frontdoor/graph_io.hpp>

#include <map>
#include <stdexcept>

#include "fixture_data.inc"

namespace frontdoor {

namespace {

const std::map<std::string, std::string>& registry() {
    static const std::map<std::string, std::string> r(std::begin(fixture_data), std::end(fixture_data));
    return r;
}

}  // namespace

std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : registry()) out.push_back(name);
    return out;
}

std::optional<std::string> fixture_text(const std::string& name) {
    auto it = registry().find(name);
    if (it == registry().end()) return std::nullopt;
    return it->second;
}

Smcm load_fixture(const std::string& name) {
    auto text = fixture_text(name);
    if (!text) throw std::invalid_argument("unknown fixture '" + name + "'");
    return parse_smcm(*text);
}

std::vector<std::string> random_fixture_names() { return {"rnd1", "rnd2", "rnd3", "rnd4", "rnd5", "rnd6"}; }

}  // namespace frontdoor
