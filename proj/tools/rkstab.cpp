#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "rkstab/experiments.hpp"

namespace fs = std::filesystem;
using namespace rkstab;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_cert_failure = 2;

void write_json(const nlohmann::json& j, const std::string& out_dir, const std::string& file) {
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        experiments::write_text_file(fs::path(out_dir) / file, text);
    }
}

struct AdvectOptions {
    std::string config_file;
    std::string method;
    std::vector<std::string> filters;
    std::string ic;
    std::string strength;
    int elements = 0;
    int degree = -1;
    int steps = 0;
    double final_time = 0.0;
    int filter_order = 0;
    int jobs = 1;
};

/// Config file first, then flags given on the command line.
time::SimulationConfig build_config(const AdvectOptions& o, const CLI::App& cmd) {
    time::SimulationConfig c;
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in) {
            throw Error(ErrorCode::InvalidArgument, "cannot read config file " + o.config_file);
        }
        for (const auto& [k, v] : time::parse_key_values(in)) {
            time::apply_setting(c, k, v);
        }
    }
    const auto given = [&](const char* name) { return cmd.count(name) > 0; };
    if (given("--method")) c.method = o.method;
    if (given("--ic")) c.ic = time::parse_initial_condition(o.ic);
    if (given("--strength")) c.strength = time::parse_strength_rule(o.strength);
    if (given("--elements")) c.elements = o.elements;
    if (given("--degree")) c.degree = o.degree;
    if (given("--steps")) c.steps = o.steps;
    if (given("--final-time")) c.final_time = o.final_time;
    if (given("--filter-order")) c.filter_order = o.filter_order;
    c.validate();
    return c;
}

int run_advect(const AdvectOptions& o, const CLI::App& cmd, const std::string& out_dir) {
    const time::SimulationConfig base = build_config(o, cmd);
    std::vector<time::SimulationConfig> runs;
    if (o.filters.empty()) {
        runs.push_back(base);
    }
    for (const auto& f : o.filters) {
        runs.push_back(base);
        runs.back().filter = time::parse_filter_mode(f);
    }
    const bool nested = runs.size() > 1;
    std::vector<experiments::AdvectSummary> summaries(runs.size());
    std::vector<std::string> errors(runs.size());
    std::vector<fs::path> dirs;
    for (const auto& r : runs) {
        dirs.push_back(nested ? fs::path(out_dir) / time::to_string(r.filter) : fs::path(out_dir));
    }

    const auto work = [&](std::size_t i) {
        try {
            summaries[i] = experiments::run_advect(runs[i], dirs[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min<std::size_t>(o.jobs, runs.size()));
    std::mutex next_mutex;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = 0;
                {
                    std::lock_guard lock(next_mutex);
                    if (next == runs.size()) {
                        return;
                    }
                    i = next++;
                }
                work(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }

    int code = exit_ok;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        if (!errors[i].empty()) {
            std::cerr << "advect " << time::to_string(r.filter) << ": " << errors[i] << "\n";
            code = exit_usage;
            continue;
        }
        const auto& s = summaries[i];
        std::cout << "method=" << r.method << " filter=" << time::to_string(r.filter)
                  << " ic=" << time::to_string(r.ic) << " steps=" << r.steps
                  << " initial_energy=" << dg::format_double(s.initial_energy)
                  << " final_energy=" << dg::format_double(s.final_energy)
                  << " max_energy=" << dg::format_double(s.max_energy)
                  << " reference_distance=" << dg::format_double(s.reference_distance) << " dir=" << dirs[i].string()
                  << "\n";
    }
    return code;
}

int run_ivp104(const std::vector<int>& steps, const std::string& out_dir) {
    fs::create_directories(out_dir);
    for (int n : steps) {
        const auto r = experiments::run_ivp104(n);
        std::ostringstream csv;
        time::write_energy_csv(csv, r.trace);
        experiments::write_text_file(fs::path(out_dir) / ("ivp104_" + std::to_string(n) + ".csv"), csv.str());
        std::cout << "steps=" << n << " dt_norm=" << dg::format_double(r.dt_norm)
                  << " max_energy=" << dg::format_double(r.max_energy)
                  << " bounded=" << (r.max_energy <= 3.0 + 1e-9 ? "yes" : "no") << "\n";
    }
    experiments::write_text_file(fs::path(out_dir) / "plot_ivp104.py", experiments::ivp104_plot_script());
    return exit_ok;
}

int run_optimize_rk2(const std::string& out_dir) {
    const auto r = experiments::rk2_report();
    std::cout << "mean_b2=" << to_string(r.mean) << " scan_argmin=" << dg::format_double(r.mean_scan.argmin) << "\n"
              << "minimax_b2=" << to_string(r.minimax) << " scan_argmin=" << dg::format_double(r.minimax_scan.argmin)
              << "\n";
    fs::create_directories(out_dir);
    std::ostringstream csv;
    experiments::write_rk2_objective_csv(csv, r);
    experiments::write_text_file(fs::path(out_dir) / "rk2_objective.csv", csv.str());
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-stability certificates and experiments for explicit Runge-Kutta methods"};
    app.require_subcommand(1);

    std::string method;
    std::string mode = "general";
    double tol = energy::default_root_tolerance;
    std::string cert_out;
    auto* certify = app.add_subcommand("certify", "Certify strong stability of a method and print the certificate");
    certify->add_option("method", method, "builtin name, <name>x<n>, or rk4family:a5,a6")->required();
    certify->add_option("--mode", mode, "general or skew")->check(CLI::IsMember({"general", "skew"}));
    certify->add_option("--tol", tol, "root isolation width")->check(CLI::PositiveNumber);
    certify->add_option("--out-dir", cert_out, "also write certificate.json here");

    AdvectOptions adv;
    std::string adv_out = ".";
    auto* advect = app.add_subcommand("advect", "Run the DG advection experiment and write CSV artifacts");
    advect->add_option("--config", adv.config_file, "key=value config file (flags win)");
    advect->add_option("--method", adv.method, "explicit builtin tableau or implicit_euler");
    advect->add_option("--filter", adv.filters, "none, filter, project, mimic_implicit (repeatable)")
        ->check(CLI::IsMember({"none", "filter", "project", "mimic_implicit"}));
    advect->add_option("--ic", adv.ic, "gaussian, box, sine")->check(CLI::IsMember({"gaussian", "box", "sine"}));
    advect->add_option("--strength", adv.strength, "filter strength rule: exact or linearized")
        ->check(CLI::IsMember({"exact", "linearized"}));
    advect->add_option("--elements,-N", adv.elements, "number of elements")->check(CLI::PositiveNumber);
    advect->add_option("--degree,-p", adv.degree, "polynomial degree")->check(CLI::NonNegativeNumber);
    advect->add_option("--steps", adv.steps, "number of time steps")->check(CLI::PositiveNumber);
    advect->add_option("--final-time,-T", adv.final_time, "final time")->check(CLI::PositiveNumber);
    advect->add_option("--filter-order", adv.filter_order, "filter exponent sf")->check(CLI::PositiveNumber);
    advect->add_option("--jobs", adv.jobs, "worker threads for multiple --filter runs")->check(CLI::PositiveNumber);
    advect->add_option("--out-dir", adv_out, "output directory");

    std::vector<int> ivp_steps{203, 204};
    std::string ivp_out = ".";
    auto* ivp = app.add_subcommand("ivp104", "SSPRK(10,4) on the 3x3 skew system over [0, 1000]");
    ivp->add_option("steps", ivp_steps, "step counts (default 203 204)")->check(CLI::PositiveNumber);
    ivp->add_option("--out-dir", ivp_out, "output directory");

    std::string rk2_out = ".";
    auto* rk2 = app.add_subcommand("optimize-rk2", "Optimal b2 for the two-stage second order family");
    rk2->add_option("--out-dir", rk2_out, "output directory");

    std::string tab_out;
    auto* tableaux = app.add_subcommand("tableaux", "List the builtin Butcher tableaux as JSON");
    tableaux->add_option("--out-dir", tab_out, "also write tableaux.json here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*certify) {
            const auto bound_mode = mode == "skew" ? energy::BoundMode::skew : energy::BoundMode::general;
            const auto j = experiments::certificate_json(method, bound_mode, tol);
            write_json(j, cert_out, "certificate.json");
            return j.at("status") == "certified" ? exit_ok : exit_cert_failure;
        }
        if (*advect) {
            return run_advect(adv, *advect, adv_out);
        }
        if (*ivp) {
            return run_ivp104(ivp_steps, ivp_out);
        }
        if (*rk2) {
            return run_optimize_rk2(rk2_out);
        }
        if (*tableaux) {
            write_json(experiments::builtin_tableaux_json(), tab_out, "tableaux.json");
            return exit_ok;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::InvalidArgument) {
            std::cerr << app.help();
        }
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
