#ifndef MINAR_SERIES_HPP
#define MINAR_SERIES_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace minar {

// A T x n block of non-negative counts plus optional covariate columns,
// aligned row-for-row. Row r corresponds to time value origin + r.
struct MultiCountSeries {
    int n = 0;
    int origin = 1;
    std::vector<long> counts;                 // row-major, length T*n
    std::vector<std::string> covariate_names; // p names
    std::vector<double> covariates;           // row-major, length T*p (or empty)

    int length() const { return n > 0 ? static_cast<int>(counts.size()) / n : 0; }
    int covariate_count() const { return static_cast<int>(covariate_names.size()); }

    long count(int row, int i) const { return counts[static_cast<size_t>(row) * n + i]; }
    long& count(int row, int i) { return counts[static_cast<size_t>(row) * n + i]; }

    std::span<const long> row(int r) const {
        return {counts.data() + static_cast<size_t>(r) * n, static_cast<size_t>(n)};
    }
    std::span<const double> covariate_row(int r) const {
        const int p = covariate_count();
        if (p == 0) return {};
        return {covariates.data() + static_cast<size_t>(r) * p, static_cast<size_t>(p)};
    }

    int time_at(int row) const { return origin + row; }
    int row_of_time(int t) const { return t - origin; }

    // Throws when counts are negative or covariate rows do not align.
    void validate() const;

    // Rows [first, first + nrows), keeping covariates and shifting the origin.
    MultiCountSeries slice(int first, int nrows) const;
};

// CSV layout: header "t,x1,...,xn[,cov1,...,covp]", one row per step.
MultiCountSeries read_series_csv(std::istream& in);
MultiCountSeries read_series_csv_file(const std::string& path);
void write_series_csv(const MultiCountSeries& s, std::ostream& out);

} // namespace minar

#endif
