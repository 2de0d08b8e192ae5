// mslab command line: run seeded experiments, export operator matrices and
// frames, summarize report files.

#include "mslab/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

using namespace mslab;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// symbol grammar: `u:<blaschke>; v:<blaschke>` (either side may be empty,
// meaning the constant 1) or `laurent:<c>,...,<c>` (odd count, centered at
// degree zero).
SymbolSpec parse_symbol_text(const std::string& text) {
    const std::string s = detail::strip_spaces(text);
    if (s.rfind("laurent:", 0) == 0) {
        std::vector<Complex> coeffs;
        const std::string list = s.substr(8);
        size_t q = 0;
        while (q < list.size()) {
            size_t comma = list.find(',', q);
            if (comma == std::string::npos) comma = list.size();
            coeffs.push_back(detail::parse_complex(list.substr(q, comma - q)));
            q = comma + 1;
        }
        if (coeffs.empty() || coeffs.size() % 2 == 0)
            throw std::invalid_argument("laurent symbol needs an odd, centered coefficient list");
        return symbol_laurent(-static_cast<int>(coeffs.size() / 2), std::move(coeffs));
    }
    if (s.rfind("u:", 0) == 0) {
        const size_t vpos = s.find(";v:");
        if (vpos == std::string::npos)
            throw std::invalid_argument("symbol must look like 'u:<product>; v:<product>'");
        const BlaschkeProduct u = parse_blaschke(s.substr(2, vpos - 2));
        const BlaschkeProduct v = parse_blaschke(s.substr(vpos + 3));
        return symbol_uv(u, v);
    }
    throw std::invalid_argument("unrecognized symbol '" + text + "'");
}

void write_matrix_csv(const CMat& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ",";
            out << fmt(m(i, j).real()) << "," << fmt(m(i, j).imag());
        }
        out << "\n";
    }
}

void write_frame_csv(const Frame& f, const CircleGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    for (int n = 0; n < grid.size; ++n) {
        out << fmt(grid.nodes[n].real()) << "," << fmt(grid.nodes[n].imag());
        for (int k = 0; k < f.dimension(); ++k)
            out << "," << fmt(f.basis(k, n).real()) << "," << fmt(f.basis(k, n).imag());
        out << "\n";
    }
}

int cmd_list() {
    for (const Experiment& e : experiment_registry())
        std::printf("%-4s %s\n", e.id.c_str(), e.description.c_str());
    return 0;
}

int cmd_run(const std::string& id, ExperimentConfig cfg, bool trials_set,
            const std::vector<std::string>& tols, const std::string& out_path) {
    cfg.experiment_id = id;
    const Experiment& exp = find_experiment(id);
    if (!trials_set) cfg.trials = exp.default_trials;
    for (const std::string& t : tols) {
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--tol", "expected <name>=<value>");
        cfg.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    }

    const Report report = run_experiment(cfg);
    std::printf("%s: trials=%d pass=%d fail=%d skip=%d", id.c_str(), cfg.trials,
                report.summary.pass, report.summary.fail, report.summary.skip);
    if (report.summary.min_margin) std::printf(" min_margin=%.3e", *report.summary.min_margin);
    if (report.summary.max_defect) std::printf(" max_defect=%.3e", *report.summary.max_defect);
    std::printf(" wall=%ldms\n", report.summary.wall_ms);
    int shown = 0;
    for (const TrialRecord& t : report.trials) {
        if (t.verdict != "fail") continue;
        if (shown++ == 10) {
            std::printf("  ... more failures omitted; see the report file\n");
            break;
        }
        std::printf("  FAIL trial %d seed %llu margin %.3e%s%s\n", t.trial,
                    static_cast<unsigned long long>(t.seed), t.margin,
                    t.note.empty() ? "" : " note=", t.note.c_str());
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << report_to_string(report);
        std::printf("report written to %s\n", out_path.c_str());
    }
    return report.summary.fail == 0 ? 0 : 1;
}

int cmd_matrix(const std::string& theta_text, const std::string& symbol_text,
               const std::string& op, int window, int grid_size, const std::string& matrix_path,
               const std::string& frame_path) {
    const SymbolSpec phi = parse_symbol_text(symbol_text);
    int symbol_degree = 0;
    if (const auto* uv = std::get_if<UvBarSymbol>(&phi.form()))
        symbol_degree = uv->u.degree() + uv->v.degree();

    OperatorMatrix result;
    Frame domain;
    if (op == "toeplitz" || op == "hankel") {
        const CircleGrid grid(grid_size > 0 ? grid_size
                                            : auto_grid_size(symbol_degree + window, window, window));
        result = op == "toeplitz" ? toeplitz(phi, window, grid) : hankel(phi, window, window, grid);
        domain = analytic_section(window, grid);
        if (!frame_path.empty()) write_frame_csv(domain, grid, frame_path);
    } else {
        const BlaschkeProduct theta = parse_blaschke(theta_text);
        if (theta.degree() < 1)
            throw CLI::ValidationError("--theta", "model-space operators need deg(theta) >= 1");
        const int pos = window + theta.degree() + symbol_degree;
        const bool needs_window = op == "dtto" || op == "tho" || op == "dtho" || op == "block";
        const CircleGrid grid(grid_size > 0
                                  ? grid_size
                                  : auto_grid_size(theta.degree() + symbol_degree,
                                                   needs_window ? pos : 0, needs_window ? pos : 0));
        if (op == "tto") result = tto(phi, theta, grid);
        else if (op == "dtto") result = dtto(phi, theta, pos, pos, grid);
        else if (op == "tho") result = tho(phi, theta, pos, pos, grid);
        else if (op == "dtho") result = dtho(phi, theta, pos, pos, grid);
        else if (op == "block") result = block_assemble(phi, theta, pos, pos, grid);
        else throw CLI::ValidationError("--op", "unknown operator " + op);
        domain = op == "dtto" || op == "dtho" ? dual_frame(theta, pos, pos, grid)
                                              : model_basis(theta, grid);
        if (!frame_path.empty()) write_frame_csv(domain, grid, frame_path);
    }
    std::printf("%s: %d x %d, norm %.12g\n", op.c_str(), result.rows(), result.cols(),
                operator_norm(result.m));
    if (!matrix_path.empty()) {
        write_matrix_csv(result.m, matrix_path);
        std::printf("matrix written to %s\n", matrix_path.c_str());
    }
    return 0;
}

int cmd_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "cannot open %s\n", path.c_str());
        return 2;
    }
    nlohmann::json j;
    try {
        in >> j;
        if (j.at("schema_version") != "1") throw std::runtime_error("unsupported schema version");
        const auto& s = j.at("summary");
        std::printf("%s: trials=%zu pass=%d fail=%d skip=%d\n",
                    j.at("experiment").get<std::string>().c_str(), j.at("trials").size(),
                    s.at("pass").get<int>(), s.at("fail").get<int>(), s.at("skip").get<int>());
        if (s.at("min_margin").is_number())
            std::printf("  min_margin=%.3e\n", s.at("min_margin").get<double>());
        if (s.at("max_defect").is_number())
            std::printf("  max_defect=%.3e\n", s.at("max_defect").get<double>());
        for (const auto& t : j.at("trials"))
            if (t.at("verdict") == "fail")
                std::printf("  FAIL trial %d seed %llu\n", t.at("trial").get<int>(),
                            t.at("seed").get<unsigned long long>());
        return s.at("fail").get<int>() == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "malformed report %s: %s\n", path.c_str(), e.what());
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for truncated and dual truncated Toeplitz operators"};
    app.require_subcommand(1);

    app.add_subcommand("list", "list registered experiments");

    auto* run = app.add_subcommand("run", "run a registered experiment");
    std::string run_id;
    mslab::ExperimentConfig cfg;
    std::vector<std::string> tols;
    std::string out_path;
    run->add_option("id", run_id, "experiment id (E1..E11)")->required();
    auto* trials_opt = run->add_option("--trials", cfg.trials, "trial count");
    run->add_option("--seed", cfg.seed, "master seed");
    run->add_option("--max-degree", cfg.max_degree, "degree cap for theta");
    run->add_option("--radius", cfg.radius_cap, "radius cap for random zeros");
    run->add_option("--window", cfg.window, "truncation window");
    run->add_option("--grid", cfg.grid_size, "grid size override (power of two)");
    run->add_option("--tol", tols, "tolerance override <name>=<value>");
    run->add_option("--out", out_path, "write the JSON report here");

    auto* matrix = app.add_subcommand("matrix", "compress one symbol and export the matrix");
    std::string theta_text, symbol_text, op_name = "tto", matrix_path, frame_path;
    int m_window = 104, m_grid = 0;
    matrix->add_option("--theta", theta_text, "inner function, e.g. \"zeros=0,0\"");
    matrix->add_option("--symbol", symbol_text, "symbol, e.g. \"u:zeros=0.5; v:\"")->required();
    matrix->add_option("--op", op_name, "tto|dtto|tho|dtho|block|toeplitz|hankel");
    matrix->add_option("--window", m_window, "truncation window / section size");
    matrix->add_option("--grid", m_grid, "grid size override (power of two)");
    matrix->add_option("--emit-matrix", matrix_path, "write the matrix as CSV (re,im pairs)");
    matrix->add_option("--emit-frame", frame_path, "write the domain frame samples as CSV");

    auto* report = app.add_subcommand("report", "summarize a report file");
    std::string report_path;
    report->add_option("path", report_path, "report JSON path")->required();

    try {
        app.parse(argc, argv);
        if (app.got_subcommand("list")) return cmd_list();
        if (app.got_subcommand("run"))
            return cmd_run(run_id, cfg, trials_opt->count() > 0, tols, out_path);
        if (app.got_subcommand("matrix"))
            return cmd_matrix(theta_text, symbol_text, op_name, m_window, m_grid, matrix_path,
                              frame_path);
        if (app.got_subcommand("report")) return cmd_report(report_path);
        return 2;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << e.what() << "\n" << app.help() << std::flush;
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
