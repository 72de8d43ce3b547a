#ifndef FRONTDOOR_DATA_TABLE_HPP
#define FRONTDOOR_DATA_TABLE_HPP

#include <frontdoor/node_set.hpp>

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace frontdoor {

using ColumnList = std::vector<std::size_t>;

// A named group of columns treated as one variable by the search. A numeric
// variable has one column; a one-hot encoded categorical has levels-1.
struct Variable {
    std::string name;
    ColumnList columns;
    // How the columns were derived, e.g. "numeric" or "onehot(purpose)".
    std::string provenance = "numeric";
};

// Immutable rectangular numeric sample matrix with column names and variable
// groups. Every column belongs to exactly one variable.
class DataTable {
public:
    DataTable() = default;
    // One single-column variable per column.
    DataTable(Eigen::MatrixXd values, std::vector<std::string> column_names);
    DataTable(Eigen::MatrixXd values, std::vector<std::string> column_names, std::vector<Variable> variables);

    std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
    const Eigen::MatrixXd& values() const { return values_; }
    auto column(std::size_t c) const { return values_.col(static_cast<Eigen::Index>(c)); }
    const std::string& column_name(std::size_t c) const { return column_names_.at(c); }
    const std::vector<std::string>& column_names() const { return column_names_; }

    const std::vector<Variable>& variables() const { return variables_; }
    const Variable& variable(std::size_t v) const { return variables_.at(v); }
    std::optional<std::size_t> find_variable(const std::string& name) const;
    std::size_t require_variable(const std::string& name) const;

    // Concatenated columns of the variables in `vars`, in variable order.
    ColumnList columns_of(NodeSet vars) const;
    Eigen::MatrixXd select(const ColumnList& cols) const;

    DataTable take_rows(const std::vector<std::size_t>& rows) const;

    // Header row of column names, then one row per sample; values are written
    // in shortest round-trip form.
    void write_csv(std::ostream& out) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> column_names_;
    std::vector<Variable> variables_;
};

}  // namespace frontdoor

#endif  // FRONTDOOR_DATA_TABLE_HPP
