#include <frontdoor/ingest.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>

namespace frontdoor {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& field) {
    const std::string t = trim(field);
    if (t.empty()) return std::nullopt;
    double v = 0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

CsvText read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    char c = 0;
    auto end_field = [&] {
        record.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        // a blank line is not a record
        if (!(record.size() == 1 && record[0].empty())) records.push_back(record);
        record.clear();
    };
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_record();
        } else {
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) throw std::invalid_argument("unterminated quoted field");
    if (!field.empty() || !record.empty()) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        end_record();
    }
    if (records.empty()) throw std::invalid_argument("CSV has no header row");

    CsvText out;
    out.header = records.front();
    for (auto& h : out.header) h = trim(h);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != out.header.size())
            throw std::invalid_argument("CSV record " + std::to_string(r + 1) + " has " +
                                        std::to_string(records[r].size()) + " fields, header has " +
                                        std::to_string(out.header.size()));
        out.rows.push_back(std::move(records[r]));
    }
    return out;
}

CsvText read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_csv(in);
}

bool is_missing(const std::string& field) {
    const std::string t = trim(field);
    return t.empty() || t == "?" || t == "NA";
}

double BinarizeRule::apply(const std::string& field) const {
    switch (kind) {
        case Kind::none: {
            const auto v = parse_number(field);
            if (!v) throw std::invalid_argument("'" + field + "' is not numeric");
            return *v;
        }
        case Kind::threshold: {
            const auto v = parse_number(field);
            if (!v) throw std::invalid_argument("'" + field + "' cannot be thresholded");
            return *v >= threshold ? 1.0 : 0.0;
        }
        case Kind::positive_label: return trim(field) == label ? 1.0 : 0.0;
    }
    return 0;
}

void AuditManifest::validate() const {
    if (treatment.column.empty() || outcome.column.empty()) throw std::invalid_argument("treatment and outcome are required");
    if (children.empty()) throw std::invalid_argument("children must not be empty");
    std::set<std::string> seen{treatment.column};
    if (!seen.insert(outcome.column).second) throw std::invalid_argument("treatment and outcome coincide");
    for (const auto& c : children)
        if (!seen.insert(c).second) throw std::invalid_argument("column '" + c + "' has two roles");
    for (const auto& d : drop)
        if (seen.count(d)) throw std::invalid_argument("role column '" + d + "' is also dropped");
}

namespace {

BinarizeRule parse_rule(const nlohmann::json& j) {
    BinarizeRule r;
    if (j.contains("threshold") && j.contains("positive"))
        throw std::invalid_argument("give either threshold or positive, not both");
    if (j.contains("threshold")) {
        r.kind = BinarizeRule::Kind::threshold;
        r.threshold = j.at("threshold").get<double>();
    } else if (j.contains("positive")) {
        r.kind = BinarizeRule::Kind::positive_label;
        r.label = j.at("positive").get<std::string>();
    }
    return r;
}

RoleColumn parse_role(const nlohmann::json& j) {
    if (j.is_string()) return {j.get<std::string>(), {}};
    return {j.at("column").get<std::string>(), parse_rule(j)};
}

nlohmann::json role_json(const RoleColumn& r) {
    nlohmann::json j;
    j["column"] = r.column;
    if (r.rule.kind == BinarizeRule::Kind::threshold) j["threshold"] = r.rule.threshold;
    if (r.rule.kind == BinarizeRule::Kind::positive_label) j["positive"] = r.rule.label;
    return j;
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) return {};
    return j.at(key).get<std::vector<std::string>>();
}

}  // namespace

AuditManifest parse_audit_manifest(const std::string& json_text) {
    AuditManifest m;
    try {
        const auto j = nlohmann::json::parse(json_text);
        m.csv_path = j.value("csv_path", "");
        m.treatment = parse_role(j.at("treatment"));
        m.outcome = parse_role(j.at("outcome"));
        m.children = string_list(j, "children");
        m.categorical = string_list(j, "categorical");
        m.drop = string_list(j, "drop");
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad audit manifest: ") + e.what());
    }
    m.validate();
    return m;
}

std::string to_json(const AuditManifest& m) {
    nlohmann::ordered_json j;
    j["csv_path"] = m.csv_path;
    j["treatment"] = role_json(m.treatment);
    j["outcome"] = role_json(m.outcome);
    j["children"] = m.children;
    j["categorical"] = m.categorical;
    j["drop"] = m.drop;
    return j.dump(2);
}

IngestResult ingest(const CsvText& csv, const AuditManifest& m) {
    m.validate();
    auto index_of = [&](const std::string& name) {
        auto it = std::find(csv.header.begin(), csv.header.end(), name);
        if (it == csv.header.end()) throw std::invalid_argument("column '" + name + "' not in CSV header");
        return static_cast<std::size_t>(it - csv.header.begin());
    };
    for (const auto& name : m.drop) index_of(name);
    for (const auto& name : m.categorical) index_of(name);
    index_of(m.treatment.column);
    index_of(m.outcome.column);
    for (const auto& c : m.children) index_of(c);

    std::vector<std::size_t> keep_cols;
    for (std::size_t c = 0; c < csv.header.size(); ++c)
        if (!contains(m.drop, csv.header[c])) keep_cols.push_back(c);

    IngestResult out;
    out.rows_read = csv.rows.size();
    std::vector<const std::vector<std::string>*> rows;
    for (const auto& row : csv.rows) {
        const bool missing = std::any_of(keep_cols.begin(), keep_cols.end(), [&](auto c) { return is_missing(row[c]); });
        if (missing)
            ++out.rows_dropped;
        else
            rows.push_back(&row);
    }
    if (rows.empty()) throw std::invalid_argument("no complete rows after dropping missing values");

    std::vector<std::vector<double>> columns;
    std::vector<std::string> names;
    std::vector<Variable> variables;
    for (auto c : keep_cols) {
        const std::string& name = csv.header[c];
        const bool is_t = name == m.treatment.column;
        const bool is_y = name == m.outcome.column;
        const BinarizeRule rule = is_t ? m.treatment.rule : is_y ? m.outcome.rule : BinarizeRule{};
        if (is_t && rule.kind == BinarizeRule::Kind::none) {
            // A numeric 0/1 column needs no rule.
            for (auto* row : rows) {
                const auto v = parse_number((*row)[c]);
                if (!v || (*v != 0.0 && *v != 1.0))
                    throw std::invalid_argument("treatment '" + name + "' is not binary; give a threshold or positive label");
            }
        }
        bool numeric = !contains(m.categorical, name);
        if (numeric && rule.kind != BinarizeRule::Kind::positive_label)
            for (auto* row : rows)
                if (!parse_number((*row)[c])) {
                    numeric = false;
                    break;
                }
        if (rule.kind == BinarizeRule::Kind::positive_label) numeric = true;
        if ((is_t || is_y) && !numeric)
            throw std::invalid_argument("role column '" + name + "' is categorical; give a positive label");

        Variable var;
        var.name = name;
        if (numeric) {
            std::vector<double> col;
            for (auto* row : rows) col.push_back(rule.apply((*row)[c]));
            var.columns.push_back(columns.size());
            var.provenance = rule.kind == BinarizeRule::Kind::threshold        ? "threshold(" + name + ")"
                             : rule.kind == BinarizeRule::Kind::positive_label ? "indicator(" + name + ")"
                                                                               : "numeric";
            columns.push_back(std::move(col));
            names.push_back(name);
        } else {
            std::set<std::string> level_set;
            for (auto* row : rows) level_set.insert(trim((*row)[c]));
            CategoricalEncoding enc{name, {level_set.begin(), level_set.end()}, variables.size()};
            if (enc.levels.size() < 2) continue;  // a constant column carries nothing
            var.provenance = "onehot(" + name + ")";
            for (std::size_t l = 1; l < enc.levels.size(); ++l) {
                std::vector<double> col;
                for (auto* row : rows) col.push_back(trim((*row)[c]) == enc.levels[l] ? 1.0 : 0.0);
                var.columns.push_back(columns.size());
                columns.push_back(std::move(col));
                names.push_back(name + "=" + enc.levels[l]);
            }
            out.encodings.push_back(std::move(enc));
        }
        variables.push_back(std::move(var));
    }

    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (std::size_t r = 0; r < rows.size(); ++r)
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = columns[c][r];
    out.table = DataTable(std::move(values), std::move(names), std::move(variables));

    out.roles.treatment = out.table.require_variable(m.treatment.column);
    out.roles.outcome = out.table.require_variable(m.outcome.column);
    for (const auto& ch : m.children) {
        const auto v = out.table.find_variable(ch);
        if (!v) throw std::invalid_argument("child column '" + ch + "' is constant after ingestion");
        out.roles.children.insert(*v);
    }
    return out;
}

std::string decode_category(const IngestResult& r, std::size_t variable, std::size_t row) {
    for (const auto& enc : r.encodings) {
        if (enc.variable != variable) continue;
        const auto& cols = r.table.variable(variable).columns;
        for (std::size_t l = 0; l < cols.size(); ++l)
            if (r.table.column(cols[l])(static_cast<Eigen::Index>(row)) == 1.0) return enc.levels[l + 1];
        return enc.levels.front();
    }
    throw std::invalid_argument("variable is not one-hot encoded");
}

}  // namespace frontdoor
