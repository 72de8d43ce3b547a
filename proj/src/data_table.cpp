#include <frontdoor/data_table.hpp>

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace frontdoor {

DataTable::DataTable(Eigen::MatrixXd values, std::vector<std::string> column_names)
    : values_(std::move(values)), column_names_(std::move(column_names)) {
    if (column_names_.size() != cols()) throw std::invalid_argument("column name count does not match data");
    for (std::size_t c = 0; c < cols(); ++c) variables_.push_back({column_names_[c], {c}, "numeric"});
}

DataTable::DataTable(Eigen::MatrixXd values, std::vector<std::string> column_names, std::vector<Variable> variables)
    : values_(std::move(values)), column_names_(std::move(column_names)), variables_(std::move(variables)) {
    if (column_names_.size() != cols()) throw std::invalid_argument("column name count does not match data");
    if (variables_.size() > NodeSet::capacity) throw std::invalid_argument("too many variables");
    std::vector<int> owner(cols(), 0);
    for (const auto& v : variables_) {
        if (v.columns.empty()) throw std::invalid_argument("variable '" + v.name + "' has no columns");
        for (auto c : v.columns) {
            if (c >= cols()) throw std::invalid_argument("variable '" + v.name + "' references a missing column");
            ++owner[c];
        }
    }
    if (std::any_of(owner.begin(), owner.end(), [](int k) { return k != 1; }))
        throw std::invalid_argument("every column must belong to exactly one variable");
}

std::optional<std::size_t> DataTable::find_variable(const std::string& name) const {
    for (std::size_t v = 0; v < variables_.size(); ++v)
        if (variables_[v].name == name) return v;
    return std::nullopt;
}

std::size_t DataTable::require_variable(const std::string& name) const {
    if (auto v = find_variable(name)) return *v;
    throw std::invalid_argument("no variable named '" + name + "'");
}

ColumnList DataTable::columns_of(NodeSet vars) const {
    ColumnList out;
    for (auto v : vars) {
        const auto& cs = variables_.at(v).columns;
        out.insert(out.end(), cs.begin(), cs.end());
    }
    return out;
}

Eigen::MatrixXd DataTable::select(const ColumnList& cols) const {
    Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = column(cols[k]);
    return out;
}

DataTable DataTable::take_rows(const std::vector<std::size_t>& rows) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= this->rows()) throw std::out_of_range("row index out of range");
        out.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(rows[r]));
    }
    return DataTable(std::move(out), column_names_, variables_);
}

void DataTable::write_csv(std::ostream& out) const {
    for (std::size_t c = 0; c < cols(); ++c) out << (c ? "," : "") << column_names_[c];
    out << '\n';
    std::string line;
    for (Eigen::Index r = 0; r < values_.rows(); ++r) {
        line.clear();
        for (Eigen::Index c = 0; c < values_.cols(); ++c) {
            if (c) line += ',';
            line += fmt::format("{}", values_(r, c));
        }
        out << line << '\n';
    }
}

}  // namespace frontdoor
