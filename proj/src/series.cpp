#include "minar/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace minar {

void MultiCountSeries::validate() const {
    if (n <= 0) throw std::invalid_argument("series: dimension must be positive");
    if (counts.size() % n != 0)
        throw std::invalid_argument("series: count block is not a multiple of n");
    for (long c : counts)
        if (c < 0) throw std::domain_error("series: negative count");
    const int p = covariate_count();
    if (p > 0 && covariates.size() != static_cast<size_t>(length()) * p)
        throw std::invalid_argument("series: covariate rows do not align with counts");
    if (p == 0 && !covariates.empty())
        throw std::invalid_argument("series: covariates present without names");
}

MultiCountSeries MultiCountSeries::slice(int first, int nrows) const {
    if (first < 0 || nrows < 0 || first + nrows > length())
        throw std::out_of_range("series slice out of range");
    MultiCountSeries s;
    s.n = n;
    s.origin = origin + first;
    s.counts.assign(counts.begin() + static_cast<size_t>(first) * n,
                    counts.begin() + static_cast<size_t>(first + nrows) * n);
    s.covariate_names = covariate_names;
    const int p = covariate_count();
    if (p > 0)
        s.covariates.assign(covariates.begin() + static_cast<size_t>(first) * p,
                            covariates.begin() + static_cast<size_t>(first + nrows) * p);
    return s;
}

static std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

static double parse_double(const std::string& s, int line_no) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                 ": cannot parse number '" + s + "'");
    }
}

static long parse_count(const std::string& s, int line_no) {
    const double v = parse_double(s, line_no);
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 || r < 0)
        throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                 ": count must be a non-negative integer, got '" + s + "'");
    return static_cast<long>(r);
}

MultiCountSeries read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV: empty input");
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "t")
        throw std::runtime_error("CSV: header must start with column 't'");

    // Count columns are the leading run of x1, x2, ...; anything after is a
    // covariate column.
    int n = 0;
    size_t col = 1;
    while (col < header.size()) {
        const std::string expected = "x" + std::to_string(n + 1);
        if (header[col] == expected) {
            ++n;
            ++col;
        } else {
            break;
        }
    }
    if (n == 0) throw std::runtime_error("CSV: no count columns x1,... found");

    MultiCountSeries s;
    s.n = n;
    for (; col < header.size(); ++col) s.covariate_names.push_back(header[col]);
    const int p = s.covariate_count();

    int line_no = 1;
    bool have_origin = false;
    int prev_t = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != 1 + n + p)
            throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(1 + n + p) + " fields, got " +
                                     std::to_string(fields.size()));
        const double traw = parse_double(fields[0], line_no);
        const int t = static_cast<int>(std::llround(traw));
        if (!have_origin) {
            s.origin = t;
            have_origin = true;
        } else if (t != prev_t + 1) {
            throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                     ": time index must increase by 1");
        }
        prev_t = t;
        for (int i = 0; i < n; ++i) s.counts.push_back(parse_count(fields[1 + i], line_no));
        for (int k = 0; k < p; ++k) s.covariates.push_back(parse_double(fields[1 + n + k], line_no));
    }
    if (s.counts.empty()) throw std::runtime_error("CSV: no data rows");
    s.validate();
    return s;
}

MultiCountSeries read_series_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_series_csv(in);
}

void write_series_csv(const MultiCountSeries& s, std::ostream& out) {
    out << "t";
    for (int i = 0; i < s.n; ++i) out << ",x" << (i + 1);
    for (const auto& name : s.covariate_names) out << "," << name;
    out << "\n";
    std::ostringstream num;
    num.precision(17);
    for (int r = 0; r < s.length(); ++r) {
        out << s.time_at(r);
        for (int i = 0; i < s.n; ++i) out << "," << s.count(r, i);
        for (int k = 0; k < s.covariate_count(); ++k) {
            num.str("");
            num << s.covariate_row(r)[k];
            out << "," << num.str();
        }
        out << "\n";
    }
}

} // namespace minar
