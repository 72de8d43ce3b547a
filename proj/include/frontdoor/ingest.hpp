#ifndef FRONTDOOR_INGEST_HPP
#define FRONTDOOR_INGEST_HPP

#include <frontdoor/data_table.hpp>
#include <frontdoor/smcm.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace frontdoor {

// Comma-separated text with a header row. Fields may be double-quoted, with
// "" standing for a literal quote; quoted fields may span lines.
struct CsvText {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvText read_csv(std::istream& in);
CsvText read_csv_file(const std::string& path);

// "", "?" and "NA" (after trimming spaces).
bool is_missing(const std::string& field);

// Maps a raw column to {0, 1}.
struct BinarizeRule {
    enum class Kind { none, threshold, positive_label };
    Kind kind = Kind::none;
    // value >= threshold maps to 1
    double threshold = 0;
    // field == label maps to 1
    std::string label;

    double apply(const std::string& field) const;
};

struct RoleColumn {
    std::string column;
    BinarizeRule rule;
};

// Role mapping for a tabular dataset; serialized as JSON (see README).
struct AuditManifest {
    std::string csv_path;
    RoleColumn treatment;
    RoleColumn outcome;
    std::vector<std::string> children;
    std::vector<std::string> categorical;
    std::vector<std::string> drop;

    // Throws std::invalid_argument on overlapping roles or a missing rule on
    // the treatment.
    void validate() const;
};

AuditManifest parse_audit_manifest(const std::string& json_text);
std::string to_json(const AuditManifest& m);

// One categorical column's encoding: levels in sorted order, the first is the
// reference level and gets no indicator column.
struct CategoricalEncoding {
    std::string column;
    std::vector<std::string> levels;
    std::size_t variable = 0;
};

struct IngestResult {
    DataTable table;
    Roles roles;
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    std::vector<CategoricalEncoding> encodings;
};

// Drops the `drop` columns and then every row with a missing field. Listed
// categoricals and every column that does not parse as a number are one-hot
// encoded into levels-1 indicator columns named "column=level". Treatment and
// outcome get their binarization rule, if any. Each source column becomes
// one variable, in CSV order.
IngestResult ingest(const CsvText& csv, const AuditManifest& m);

// Category of a one-hot variable in one row.
std::string decode_category(const IngestResult& r, std::size_t variable, std::size_t row);

}  // namespace frontdoor

#endif  // FRONTDOOR_INGEST_HPP
