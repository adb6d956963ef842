#include "bbmap/io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace bbmap::io {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    return fmt::format("{:.17g}", v);
}

int CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string c = line.substr(1);
            if (!c.empty() && c[0] == ' ') c.erase(0, 1);
            t.comments.push_back(c);
            continue;
        }
        if (!have_header) {
            t.header = split(line);
            have_header = true;
            continue;
        }
        auto cells = split(line);
        if (cells.size() != t.header.size())
            throw std::runtime_error("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& comments,
                     const std::vector<std::string>& header)
    : out_(out), width_(header.size()) {
    for (const auto& c : comments) out_ << "# " << c << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("csv row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
}

void SvgPlot::autoscale() {
    auto fit = [&](bool use_x, double& lo, double& hi) {
        if (lo != hi) return;
        lo = std::numeric_limits<double>::infinity();
        hi = -lo;
        for (const auto& s : series)
            for (double v : use_x ? s.x : s.y) {
                if (!std::isfinite(v) || (!use_x && log_y && v <= 0)) continue;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        if (!std::isfinite(lo)) lo = 0, hi = 1;
        if (lo == hi) lo -= 0.5, hi += 0.5;
    };
    fit(true, x_min, x_max);
    fit(false, y_min, y_max);
}

std::string SvgPlot::render() const {
    const double ml = 90, mr = 30, mt = 50, mb = 70;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const bool ly = log_y && y_min > 0 && y_max > 0;
    auto ty = [&](double y) { return ly ? std::log10(y) : y; };
    const double y0 = ty(y_min), y1 = ty(y_max);
    auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    auto sy = [&](double y) { return mt + (1 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}">)",
                     width, height)
      << '\n';
    o << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
    o << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", ml, mt, pw, ph)
      << '\n';
    for (int k = 0; k <= 5; ++k) {
        const double xv = x_min + (x_max - x_min) * k / 5;
        const double px = ml + pw * k / 5;
        o << fmt::format(R"(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>)", px, mt + ph, mt + ph + 6)
          << fmt::format(R"(<text x="{}" y="{}" font-size="16" text-anchor="middle">{:.6g}</text>)", px,
                         mt + ph + 26, xv)
          << '\n';
        const double yt = y0 + (y1 - y0) * k / 5;
        const double py = mt + ph * (1 - k / 5.0);
        o << fmt::format(R"(<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/>)", ml - 6, py, ml)
          << fmt::format(R"(<text x="{}" y="{}" font-size="16" text-anchor="end">{:.6g}</text>)", ml - 10, py + 5,
                         ly ? std::pow(10.0, yt) : yt)
          << '\n';
    }
    if (!title.empty())
        o << fmt::format(R"(<text x="{}" y="30" font-size="20" text-anchor="middle">{}</text>)", width / 2, title)
          << '\n';
    if (!x_label.empty())
        o << fmt::format(R"(<text x="{}" y="{}" font-size="18" text-anchor="middle">{}</text>)", ml + pw / 2,
                         height - 15, x_label)
          << '\n';
    if (!y_label.empty())
        o << fmt::format(R"svg(<text x="20" y="{0}" font-size="18" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>)svg",
                         mt + ph / 2, y_label)
          << '\n';
    for (const auto& l : vlines) {
        if (l.x < x_min || l.x > x_max) continue;
        o << fmt::format(R"(<line x1="{0:.3f}" y1="{1}" x2="{0:.3f}" y2="{2}" stroke="{3}" stroke-width="1"/>)",
                         sx(l.x), mt, mt + ph, l.color)
          << '\n';
    }
    for (const auto& s : series) {
        o << fmt::format(R"(<g fill="{}">)", s.color) << '\n';
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const double x = s.x[i], y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y) || (ly && y <= 0)) continue;
            if (x < x_min || x > x_max || ty(y) < std::min(y0, y1) || ty(y) > std::max(y0, y1)) continue;
            o << fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="{}"/>)", sx(x), sy(y), s.radius) << '\n';
        }
        o << "</g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace bbmap::io
