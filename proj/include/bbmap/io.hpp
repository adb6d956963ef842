#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bbmap::io {

// 17 significant digits, shortest exponent form.
std::string num(double v);

struct CsvTable {
    std::vector<std::string> comments;  // without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(std::istream& in);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& comments, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);

private:
    std::ostream& out_;
    std::size_t width_;
};

struct SvgSeries {
    std::vector<double> x, y;
    std::string color = "#1f3b73";
    double radius = 0.8;
};

struct SvgLine {
    double x = 0;
    std::string color = "#c0392b";
};

struct SvgPlot {
    double width = 1600, height = 900;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool log_y = false;
    std::string title, x_label, y_label;
    std::vector<SvgSeries> series;
    std::vector<SvgLine> vlines;

    // Fits the ranges to the data when they are left equal.
    void autoscale();
    std::string render() const;
};

}  // namespace bbmap::io
