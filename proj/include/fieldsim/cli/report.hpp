#pragma once

#include <fstream>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fieldsim/cli/sweep.hpp"

namespace fieldsim::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCsvHeader =
    "schema_version,arm_length_mm,ratio,pitch_mm,method,probability,wilson_lower,wilson_upper,seed";

enum class Format { Csv, Ndjson };

Format parse_format(const std::string& name);

// 12 significant digits, shortest form.
std::string format_number(double value);

std::string csv_line(const ResultRow& row);
std::string ndjson_line(const ResultRow& row);

// Streams rows to a file (or a caller-owned stream), flushing after each row
// so an interrupted run keeps what it finished.
class RowWriter {
public:
    RowWriter(std::ostream& out, Format format);
    static std::unique_ptr<RowWriter> open(const std::string& path, Format format);

    void write(const ResultRow& row);

private:
    RowWriter(std::unique_ptr<std::ofstream> file, Format format);

    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_;
    Format format_;
};

// Header-indexed CSV without quoting. Throws InvalidParameter on ragged rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of the first header among `names`; -1 when none is present.
    int column(std::initializer_list<const char*> names) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

// Parses rows written by csv_line. Throws InvalidParameter naming a missing column.
std::vector<ResultRow> rows_from_csv(const CsvTable& table);

// Min-max scaling to [0, 1]; a constant series maps to all zeros.
std::vector<double> min_max_normalize(std::span<const double> values);

// Ranks with ties sharing their average rank, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks. Throws ZeroVariance when either
// series is constant.
double spearman(std::span<const double> a, std::span<const double> b);

struct ValidationPoint {
    double arm;
    double ratio;
    double pitch;
    double mc_probability;
    double analytic_raw;
    double mc_normalized;
    double analytic_normalized;
    // mc_normalized - analytic_normalized
    double residual;
};

struct ValidationReport {
    std::vector<ValidationPoint> points;
    double residual_mean = 0.0;
    // Population variance over the sweep.
    double residual_variance = 0.0;
    double rank_correlation = 0.0;
};

inline constexpr std::size_t kMinValidationPoints = 3;

// Pairs rows by point index. Throws InvalidParameter for mismatched lengths.
ValidationReport build_validation(std::span<const ResultRow> mc, std::span<const ResultRow> analytic);

void write_validation_csv(std::ostream& out, const ValidationReport& report);

}  // namespace fieldsim::cli
