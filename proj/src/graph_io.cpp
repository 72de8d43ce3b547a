#include <frontdoor/graph_io.hpp>

#include <fstream>
#include <sstream>

namespace frontdoor {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw GraphError("line " + std::to_string(line) + ": " + what);
}

NodeId parse_id(const std::string& tok, std::size_t line) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
        fail(line, "expected node index, got '" + tok + "'");
    }
    if (pos != tok.size() || tok.front() == '-') fail(line, "expected node index, got '" + tok + "'");
    return static_cast<NodeId>(v);
}

}  // namespace

Smcm parse_smcm(std::istream& in) {
    std::optional<std::size_t> n;
    std::vector<Edge> directed;
    std::vector<Edge> bidirected;
    std::vector<std::string> names;
    std::optional<NodeId> t;
    std::optional<NodeId> y;
    NodeSet b;
    bool saw_b = false;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string s; ls >> s;) tok.push_back(s);
        if (tok.empty()) continue;

        if (!n) {
            if (tok[0] != "smcm" || tok.size() != 2) fail(line_no, "expected header 'smcm <n>'");
            n = parse_id(tok[1], line_no);
            if (*n > Smcm::max_nodes) fail(line_no, "too many nodes");
            names.resize(*n);
            for (std::size_t i = 0; i < *n; ++i) names[i] = "v" + std::to_string(i);
            continue;
        }
        auto node = [&](const std::string& s) {
            NodeId v = parse_id(s, line_no);
            if (v >= *n) fail(line_no, "node " + s + " out of range");
            return v;
        };
        const auto& kind = tok[0];
        if (kind == "d" || kind == "b") {
            if (tok.size() != 3) fail(line_no, "edge lines take two node indices");
            Edge e{node(tok[1]), node(tok[2])};
            (kind == "d" ? directed : bidirected).push_back(e);
        } else if (kind == "name") {
            if (tok.size() != 3) fail(line_no, "name lines take an index and a label");
            names[node(tok[1])] = tok[2];
        } else if (kind == "role") {
            if (tok.size() < 2) fail(line_no, "role line missing kind");
            if (tok[1] == "t" || tok[1] == "y") {
                if (tok.size() != 3) fail(line_no, "role " + tok[1] + " takes one node");
                (tok[1] == "t" ? t : y) = node(tok[2]);
            } else if (tok[1] == "b") {
                saw_b = true;
                for (std::size_t i = 2; i < tok.size(); ++i) b.insert(node(tok[i]));
            } else {
                fail(line_no, "unknown role '" + tok[1] + "'");
            }
        } else {
            fail(line_no, "unknown record '" + kind + "'");
        }
    }
    if (!n) throw GraphError("missing 'smcm <n>' header");

    Smcm g(*n, directed, bidirected, names);
    if (t || y || saw_b) {
        if (!t || !y) throw GraphError("roles need both 'role t' and 'role y'");
        g = g.with_roles({*t, *y, b});
    }
    return g;
}

Smcm parse_smcm(const std::string& text) {
    std::istringstream in(text);
    return parse_smcm(in);
}

Smcm read_smcm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file " + path);
    return parse_smcm(in);
}

std::string write_smcm(const Smcm& g) {
    std::ostringstream os;
    os << "smcm " << g.size() << '\n';
    for (NodeId v = 0; v < g.size(); ++v)
        if (g.name(v) != "v" + std::to_string(v)) os << "name " << v << ' ' << g.name(v) << '\n';
    for (const auto& e : g.directed_edges()) os << "d " << e.from << ' ' << e.to << '\n';
    for (const auto& e : g.bidirected_edges()) os << "b " << e.from << ' ' << e.to << '\n';
    if (const auto& r = g.roles()) {
        os << "role t " << r->treatment << '\n';
        os << "role y " << r->outcome << '\n';
        os << "role b";
        for (auto v : r->children) os << ' ' << v;
        os << '\n';
    }
    return os.str();
}

}  // namespace frontdoor
