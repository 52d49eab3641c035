#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "rkstab/dg/advection.hpp"
#include "rkstab/error.hpp"

namespace rkstab::dg {

/// Shortest round-trip decimal representation, locale independent.
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Rows "element,mode,coefficient".
inline void write_modal_csv(std::ostream& os, const ModalState& u) {
    os << "element,mode,coefficient\n";
    for (int e = 0; e < u.elements(); ++e) {
        for (int n = 0; n <= u.degree(); ++n) {
            os << e << ',' << n << ',' << format_double(u(e, n)) << '\n';
        }
    }
}

inline ModalState read_modal_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "element,mode,coefficient") {
        throw Error(ErrorCode::ParseError, "modal CSV: missing header");
    }
    std::vector<std::tuple<int, int, double>> rows;
    int max_e = -1;
    int max_n = -1;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        int e = 0;
        int n = 0;
        double c = 0.0;
        char comma1 = 0;
        char comma2 = 0;
        if (!(ls >> e >> comma1 >> n >> comma2 >> c) || comma1 != ',' || comma2 != ',' || e < 0 || n < 0) {
            throw Error(ErrorCode::ParseError, "modal CSV: bad row '" + line + "'");
        }
        rows.emplace_back(e, n, c);
        max_e = std::max(max_e, e);
        max_n = std::max(max_n, n);
    }
    if (max_e < 0) {
        throw Error(ErrorCode::ParseError, "modal CSV: no rows");
    }
    if (rows.size() != static_cast<std::size_t>((max_e + 1) * (max_n + 1))) {
        throw Error(ErrorCode::ParseError, "modal CSV: incomplete coefficient table");
    }
    ModalState u(max_e + 1, max_n);
    for (const auto& [e, n, c] : rows) {
        u(e, n) = c;
    }
    return u;
}

/// Rows "x,u" at `per_element` uniform points per element, element endpoints included.
inline void write_sampled_csv(std::ostream& os, const ModalState& u, const Mesh1D& mesh, int per_element = 20) {
    os << "x,u\n";
    for (int e = 0; e < u.elements(); ++e) {
        for (int j = 0; j < per_element; ++j) {
            const double xi = per_element == 1 ? 0.0 : -1.0 + 2.0 * j / (per_element - 1);
            const double x = mesh.element_center(e) + 0.5 * mesh.dx() * xi;
            os << format_double(x) << ',' << format_double(u.evaluate(e, xi)) << '\n';
        }
    }
}

}  // namespace rkstab::dg
