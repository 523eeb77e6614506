#include "fieldsim/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fieldsim/errors.hpp"

namespace fieldsim::cli {

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_double(const std::string& text, const std::string& column)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw InvalidParameter("column '" + column + "': '" + text + "' is not a number");
    }
    return v;
}

}  // namespace

Format parse_format(const std::string& name)
{
    if (name == "csv") {
        return Format::Csv;
    }
    if (name == "ndjson") {
        return Format::Ndjson;
    }
    throw InvalidParameter("unknown format '" + name + "' (expected csv or ndjson)");
}

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string csv_line(const ResultRow& row)
{
    std::string line = std::to_string(kSchemaVersion);
    for (const double v : {row.arm, row.ratio, row.pitch}) {
        line += ',' + format_number(v);
    }
    line += ',';
    line += to_string(row.method);
    line += ',' + format_number(row.probability);
    line += ',' + (row.wilson_lower ? format_number(*row.wilson_lower) : std::string());
    line += ',' + (row.wilson_upper ? format_number(*row.wilson_upper) : std::string());
    line += ',' + std::to_string(row.seed);
    return line;
}

std::string ndjson_line(const ResultRow& row)
{
    // Numbers go through format_number so both formats carry the same digits.
    auto num = [](double v) { return nlohmann::json::parse(format_number(v)); };
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["arm_length_mm"] = num(row.arm);
    j["ratio"] = num(row.ratio);
    j["pitch_mm"] = num(row.pitch);
    j["method"] = to_string(row.method);
    j["probability"] = num(row.probability);
    j["wilson_lower"] = row.wilson_lower ? num(*row.wilson_lower) : nlohmann::json(nullptr);
    j["wilson_upper"] = row.wilson_upper ? num(*row.wilson_upper) : nlohmann::json(nullptr);
    j["seed"] = row.seed;
    return j.dump();
}

RowWriter::RowWriter(std::ostream& out, Format format) : out_(&out), format_(format)
{
    if (format_ == Format::Csv) {
        *out_ << kCsvHeader << '\n' << std::flush;
    }
}

RowWriter::RowWriter(std::unique_ptr<std::ofstream> file, Format format) : RowWriter(*file, format)
{
    file_ = std::move(file);
}

std::unique_ptr<RowWriter> RowWriter::open(const std::string& path, Format format)
{
    auto file = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file) {
        throw InvalidParameter("cannot open '" + path + "' for writing");
    }
    return std::unique_ptr<RowWriter>(new RowWriter(std::move(file), format));
}

void RowWriter::write(const ResultRow& row)
{
    *out_ << (format_ == Format::Csv ? csv_line(row) : ndjson_line(row)) << '\n' << std::flush;
}

int CsvTable::column(std::initializer_list<const char*> names) const
{
    for (const char* name : names) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it != header.end()) {
            return static_cast<int>(it - header.begin());
        }
    }
    return -1;
}

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells = split(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw InvalidParameter("line " + std::to_string(line_no) + " has " + std::to_string(cells.size())
                                   + " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) {
        throw InvalidParameter("CSV input is empty");
    }
    return table;
}

CsvTable read_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw InvalidParameter("cannot read '" + path + "'");
    }
    return read_csv(in);
}

std::vector<ResultRow> rows_from_csv(const CsvTable& table)
{
    auto need = [&](std::initializer_list<const char*> names) {
        const int c = table.column(names);
        if (c < 0) {
            throw InvalidParameter(std::string("missing column '") + *names.begin() + "'");
        }
        return static_cast<std::size_t>(c);
    };
    const std::size_t arm = need({"arm_length_mm", "arm_length"});
    const std::size_t ratio = need({"ratio"});
    const std::size_t pitch = need({"pitch_mm", "pitch"});
    const std::size_t method = need({"method"});
    const std::size_t prob = need({"probability"});
    const int lower = table.column({"wilson_lower"});
    const int upper = table.column({"wilson_upper"});
    const int seed = table.column({"seed"});

    std::vector<ResultRow> rows;
    for (const auto& cells : table.rows) {
        ResultRow row;
        row.arm = parse_double(cells[arm], table.header[arm]);
        row.ratio = parse_double(cells[ratio], table.header[ratio]);
        row.pitch = parse_double(cells[pitch], table.header[pitch]);
        row.method = parse_method(cells[method]);
        row.probability = parse_double(cells[prob], table.header[prob]);
        if (lower >= 0 && !cells[static_cast<std::size_t>(lower)].empty()) {
            row.wilson_lower = parse_double(cells[static_cast<std::size_t>(lower)], "wilson_lower");
        }
        if (upper >= 0 && !cells[static_cast<std::size_t>(upper)].empty()) {
            row.wilson_upper = parse_double(cells[static_cast<std::size_t>(upper)], "wilson_upper");
        }
        if (seed >= 0) {
            row.seed = std::stoull(cells[static_cast<std::size_t>(seed)]);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> min_max_normalize(std::span<const double> values)
{
    std::vector<double> out(values.size(), 0.0);
    if (values.empty()) {
        return out;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double span = *hi - *lo;
    if (span > 0.0) {
        for (std::size_t k = 0; k < values.size(); ++k) {
            out[k] = (values[k] - *lo) / span;
        }
    }
    return out;
}

std::vector<double> average_ranks(std::span<const double> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start + 1;
        while (end < order.size() && values[order[end]] == values[order[start]]) {
            ++end;
        }
        const double rank = 0.5 * static_cast<double>(start + end - 1) + 1.0;
        for (std::size_t k = start; k < end; ++k) {
            ranks[order[k]] = rank;
        }
        start = end;
    }
    return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw InvalidParameter("rank correlation needs series of equal length");
    }
    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k) {
        sab += (ra[k] - ma) * (rb[k] - mb);
        saa += (ra[k] - ma) * (ra[k] - ma);
        sbb += (rb[k] - mb) * (rb[k] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw ZeroVariance("rank correlation is undefined for a constant series");
    }
    return sab / std::sqrt(saa * sbb);
}

ValidationReport build_validation(std::span<const ResultRow> mc, std::span<const ResultRow> analytic)
{
    if (mc.size() != analytic.size()) {
        throw InvalidParameter("validation needs one analytic row per Monte Carlo row");
    }
    std::vector<double> p_mc;
    std::vector<double> p_an;
    for (std::size_t k = 0; k < mc.size(); ++k) {
        p_mc.push_back(mc[k].probability);
        p_an.push_back(analytic[k].probability);
    }
    const std::vector<double> n_mc = min_max_normalize(p_mc);
    const std::vector<double> n_an = min_max_normalize(p_an);

    ValidationReport report;
    for (std::size_t k = 0; k < mc.size(); ++k) {
        report.points.push_back(
            {mc[k].arm, mc[k].ratio, mc[k].pitch, p_mc[k], p_an[k], n_mc[k], n_an[k], n_mc[k] - n_an[k]});
    }
    if (report.points.empty()) {
        return report;
    }
    const double n = static_cast<double>(report.points.size());
    for (const ValidationPoint& p : report.points) {
        report.residual_mean += p.residual;
    }
    report.residual_mean /= n;
    for (const ValidationPoint& p : report.points) {
        report.residual_variance += (p.residual - report.residual_mean) * (p.residual - report.residual_mean);
    }
    report.residual_variance /= n;
    report.rank_correlation = spearman(p_mc, p_an);
    return report;
}

void write_validation_csv(std::ostream& out, const ValidationReport& report)
{
    out << "arm_length_mm,ratio,pitch_mm,mc_probability,analytic_raw,mc_normalized,analytic_normalized,residual\n";
    for (const ValidationPoint& p : report.points) {
        out << format_number(p.arm) << ',' << format_number(p.ratio) << ',' << format_number(p.pitch) << ','
            << format_number(p.mc_probability) << ',' << format_number(p.analytic_raw) << ','
            << format_number(p.mc_normalized) << ',' << format_number(p.analytic_normalized) << ','
            << format_number(p.residual) << '\n';
    }
}

}  // namespace fieldsim::cli
