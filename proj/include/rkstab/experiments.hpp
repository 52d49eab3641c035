#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "rkstab/butcher.hpp"
#include "rkstab/defect.hpp"
#include "rkstab/dg/io.hpp"
#include "rkstab/energy/cert_json.hpp"
#include "rkstab/energy/certify.hpp"
#include "rkstab/error.hpp"
#include "rkstab/rational.hpp"
#include "rkstab/stability_polynomial.hpp"
#include "rkstab/time/simulation.hpp"

namespace rkstab::experiments {

struct NamedPolynomial {
    std::string name;
    StabilityPolynomial poly;
};

/// Accepts builtin explicit names, "<builtin>x<n>" for n composed steps, and "rk4family:a5,a6".
inline NamedPolynomial resolve_method_polynomial(const std::string& name) {
    constexpr std::string_view family = "rk4family:";
    if (name.rfind(family, 0) == 0) {
        const std::string args = name.substr(family.size());
        const auto comma = args.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorCode::ParseError, "expected rk4family:a5,a6, got '" + name + "'");
        }
        const Rational a5 = parse_rational(args.substr(0, comma));
        const Rational a6 = parse_rational(args.substr(comma + 1));
        return {name, rk4_family_polynomial(a5, a6)};
    }
    if (auto m = parse_builtin_method(name)) {
        return {name, stability_polynomial(builtin_tableau(*m))};
    }
    const auto x = name.rfind('x');
    if (x != std::string::npos && x + 1 < name.size()) {
        const std::string count = name.substr(x + 1);
        if (count.find_first_not_of("0123456789") == std::string::npos) {
            if (auto m = parse_builtin_method(name.substr(0, x))) {
                const int n = std::stoi(count);
                if (n < 1) {
                    throw Error(ErrorCode::InvalidArgument, "composition count must be >= 1");
                }
                return {name, compose_polynomial(stability_polynomial(builtin_tableau(*m)), n)};
            }
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

inline nlohmann::json certificate_json(const std::string& method, energy::BoundMode mode, double tol) {
    const NamedPolynomial np = resolve_method_polynomial(method);
    return energy::to_json(energy::certify(np.poly, mode, tol), np.name, mode);
}

inline nlohmann::json builtin_tableaux_json() {
    nlohmann::json out = nlohmann::json::array();
    for (auto m : all_builtin_methods) {
        out.push_back(to_json(builtin_tableau(m)));
    }
    return out;
}

inline constexpr double ivp104_final_time = 1000.0;

struct Ivp104Result {
    int steps = 0;
    double dt_norm = 0.0;
    double max_energy = 0.0;
    time::EnergyTrace trace;
};

/// The 3x3 rotation generator with a fixed third component.
inline dg::Matrix ivp104_operator() {
    dg::Matrix op = dg::Matrix::Zero(3, 3);
    op(0, 1) = 1.0;
    op(1, 0) = -1.0;
    return op;
}

inline Ivp104Result run_ivp104(int steps) {
    if (steps < 1) {
        throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
    }
    const dg::Matrix op = ivp104_operator();
    const dg::Vector u0 = dg::Vector::Ones(3);
    const auto ip = time::DiagonalInner::identity(3);
    const auto tableau = time::NumericTableau::from(builtin_tableau(BuiltinMethod::ssprk104));
    Ivp104Result r;
    r.steps = steps;
    r.dt_norm = ivp104_final_time / steps * dg::operator_norm(op, ip.weights);
    r.trace = time::run_linear_ivp(tableau, op, u0, ivp104_final_time, steps, ip);
    r.max_energy = time::max_energy(r.trace);
    return r;
}

struct Rk2Report {
    Rational mean;
    Rational minimax;
    ScanResult mean_scan;
    ScanResult minimax_scan;
};

inline Rk2Report rk2_report() {
    return {optimize_rk2_mean(), optimize_rk2_minimax(), scan_objective(rk2_mean_objective),
            scan_objective(rk2_minimax_objective)};
}

inline void write_rk2_objective_csv(std::ostream& os, const Rk2Report& r) {
    os << "b2,mean,minimax\n";
    for (std::size_t i = 0; i < r.mean_scan.b2.size(); ++i) {
        os << dg::format_double(r.mean_scan.b2[i]) << ',' << dg::format_double(r.mean_scan.value[i]) << ','
           << dg::format_double(r.minimax_scan.value[i]) << '\n';
    }
}

/// Matplotlib script that redraws energies and solutions from the CSV files next to it.
inline std::string advect_plot_script(const time::SimulationConfig& c) {
    std::ostringstream os;
    os << "#!/usr/bin/env python3\n"
       << "# " << c.method << ", filter " << time::to_string(c.filter) << ", ic " << time::to_string(c.ic) << ", "
       << c.steps << " steps, T = " << dg::format_double(c.final_time) << ", N = " << c.elements
       << ", p = " << c.degree << "\n"
       << "import csv\n"
       << "import os\n"
       << "import matplotlib\n"
       << "matplotlib.use(\"Agg\")\n"
       << "import matplotlib.pyplot as plt\n\n"
       << "here = os.path.dirname(os.path.abspath(__file__))\n\n\n"
       << "def columns(name):\n"
       << "    with open(os.path.join(here, name)) as f:\n"
       << "        rows = list(csv.DictReader(f))\n"
       << "    return {k: [float(r[k]) for r in rows] for k in rows[0]}\n\n\n"
       << "energy = columns(\"energy.csv\")\n"
       << "solution = columns(\"solution.csv\")\n"
       << "reference = columns(\"reference.csv\")\n\n"
       << "fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4))\n"
       << "left.plot(reference[\"x\"], reference[\"u\"], color=\"green\", label=\"matrix exponential\")\n"
       << "left.plot(solution[\"x\"], solution[\"u\"], \"--\", color=\"magenta\", label=\"" << c.method << "\")\n"
       << "left.set_xlabel(\"x\")\n"
       << "left.set_ylabel(\"u\")\n"
       << "left.legend()\n"
       << "right.plot(energy[\"t\"], energy[\"energy\"], color=\"blue\")\n"
       << "right.set_xlabel(\"t\")\n"
       << "right.set_ylabel(\"energy\")\n"
       << "fig.tight_layout()\n"
       << "fig.savefig(os.path.join(here, \"advect.png\"), dpi=150)\n";
    return os.str();
}

inline std::string ivp104_plot_script() {
    return "#!/usr/bin/env python3\n"
           "import csv\n"
           "import glob\n"
           "import os\n"
           "import matplotlib\n"
           "matplotlib.use(\"Agg\")\n"
           "import matplotlib.pyplot as plt\n\n"
           "here = os.path.dirname(os.path.abspath(__file__))\n"
           "for path in sorted(glob.glob(os.path.join(here, \"ivp104_*.csv\"))):\n"
           "    with open(path) as f:\n"
           "        rows = list(csv.DictReader(f))\n"
           "    label = os.path.basename(path)[len(\"ivp104_\"):-len(\".csv\")] + \" steps\"\n"
           "    plt.plot([float(r[\"t\"]) for r in rows], [float(r[\"energy\"]) for r in rows], label=label)\n"
           "plt.axhline(3.0, color=\"grey\", linewidth=0.5)\n"
           "plt.xlabel(\"t\")\n"
           "plt.ylabel(\"energy\")\n"
           "plt.legend()\n"
           "plt.savefig(os.path.join(here, \"ivp104.png\"), dpi=150)\n";
}

struct AdvectSummary {
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double max_energy = 0.0;
    double reference_distance = 0.0;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    os << contents;
    if (!os) {
        throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    }
}

/// Runs `c` and writes energy.csv, solution.csv, reference.csv and plot.py into `dir`.
inline AdvectSummary run_advect(const time::SimulationConfig& c, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const time::SimulationResult r = time::run_simulation(c);
    const dg::ModalState ref = time::reference_solution(c);

    std::ostringstream energy;
    time::write_energy_csv(energy, r.trace);
    std::ostringstream solution;
    dg::write_sampled_csv(solution, r.final_state, r.mesh);
    std::ostringstream reference;
    dg::write_sampled_csv(reference, ref, r.mesh);

    write_text_file(dir / "energy.csv", energy.str());
    write_text_file(dir / "solution.csv", solution.str());
    write_text_file(dir / "reference.csv", reference.str());
    write_text_file(dir / "plot.py", advect_plot_script(c));

    return {r.trace.front().energy, r.trace.back().energy, time::max_energy(r.trace),
            time::m_distance(r.final_state, ref, r.norm)};
}

}  // namespace rkstab::experiments
