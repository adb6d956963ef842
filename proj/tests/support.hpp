#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "bbmap/io.hpp"

namespace bbmap::testdata {

inline std::string path(const std::string& name) { return std::string(BBMAP_TEST_DATA) + "/" + name; }

// n -> ascending coefficients of the developed polynomial.
inline std::map<int, std::vector<mpq_class>> developed_table() {
    std::ifstream in(path("q_poly_developed.txt"));
    if (!in) throw std::runtime_error("missing q_poly_developed.txt");
    std::map<int, std::vector<mpq_class>> t;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        int n = 0;
        if (!(ss >> n)) continue;
        std::string c;
        while (ss >> c) {
            mpq_class q(c);
            q.canonicalize();
            t[n].push_back(q);
        }
    }
    return t;
}

struct FactorRow {
    mpq_class scale;
    std::string kind;  // rp1: (r+1)^2, r2m1: (r^2-1)^2
    std::vector<mpq_class> inner;
};

inline std::map<int, FactorRow> factor_table() {
    std::ifstream in(path("q_poly_factor.txt"));
    if (!in) throw std::runtime_error("missing q_poly_factor.txt");
    std::map<int, FactorRow> t;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        int n = 0;
        std::string scale;
        FactorRow row;
        if (!(ss >> n >> scale >> row.kind)) continue;
        row.scale = mpq_class(scale);
        row.scale.canonicalize();
        std::string c;
        while (ss >> c) row.inner.emplace_back(c);
        t[n] = row;
    }
    return t;
}

struct BoundRow {
    std::string lower, upper;
};

inline std::map<int, BoundRow> bounds_table() {
    std::ifstream in(path("window_bounds.csv"));
    if (!in) throw std::runtime_error("missing window_bounds.csv");
    const io::CsvTable t = io::read_csv(in);
    std::map<int, BoundRow> m;
    for (const auto& row : t.rows) m[std::stoi(row[0])] = {row[1], row[2]};
    return m;
}

}  // namespace bbmap::testdata
