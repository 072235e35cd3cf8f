#include "cli/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cssd/cssd.hpp"

namespace cssd {
namespace cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& token, std::size_t row) {
    const std::string t = trim(token);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) {
        throw Error(errc::invalid_argument, "cannot parse number '" + t + "'", row);
    }
    return v;
}

}  // namespace

ParsedCsv read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(errc::empty_input, "input has no header row");
    const auto header = split_line(line);
    std::ptrdiff_t x_col = -1, delta_col = -1;
    std::vector<std::pair<std::size_t, std::ptrdiff_t>> y_cols;  // (dimension, column)
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name == "x") {
            if (x_col >= 0) throw Error(errc::invalid_argument, "duplicate 'x' column");
            x_col = static_cast<std::ptrdiff_t>(c);
        } else if (name == "delta") {
            if (delta_col >= 0) throw Error(errc::invalid_argument, "duplicate 'delta' column");
            delta_col = static_cast<std::ptrdiff_t>(c);
        } else if (name == "y") {
            y_cols.emplace_back(0, static_cast<std::ptrdiff_t>(c));
        } else if (name.size() > 1 && name[0] == 'y' &&
                   name.find_first_not_of("0123456789", 1) == std::string::npos) {
            y_cols.emplace_back(std::stoul(name.substr(1)) - 1,
                                static_cast<std::ptrdiff_t>(c));
        } else {
            throw Error(errc::invalid_argument, "unknown CSV column '" + name + "'");
        }
    }
    if (x_col < 0) throw Error(errc::invalid_argument, "CSV needs an 'x' column");
    if (y_cols.empty()) throw Error(errc::invalid_argument, "CSV needs 'y' or 'y1..yD' columns");
    std::sort(y_cols.begin(), y_cols.end());
    for (std::size_t d = 0; d < y_cols.size(); ++d) {
        if (y_cols[d].first != d) {
            throw Error(errc::invalid_argument, "y columns must be y or a contiguous y1..yD");
        }
    }

    ParsedCsv out;
    out.dims = y_cols.size();
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size()) {
            throw Error(errc::invalid_argument, "row has wrong number of fields", row);
        }
        out.xs.push_back(parse_number(fields[static_cast<std::size_t>(x_col)], row));
        std::vector<double> y(out.dims);
        for (std::size_t d = 0; d < out.dims; ++d) {
            y[d] = parse_number(fields[static_cast<std::size_t>(y_cols[d].second)], row);
        }
        out.rows.push_back(std::move(y));
        if (delta_col >= 0) {
            out.deltas.push_back(parse_number(fields[static_cast<std::size_t>(delta_col)], row));
        }
    }
    if (out.xs.empty()) throw Error(errc::empty_input, "input has no data rows");
    return out;
}

namespace {

ordered_json gamma_to_json(const Gamma& gamma) {
    if (gamma.is_infinite()) return "inf";
    return gamma.value();
}

ordered_json solution_json(const CssdSolution& solution) {
    ordered_json doc;
    doc["schema"] = 1;
    doc["params"] = {{"p", solution.params().p()},
                     {"gamma", gamma_to_json(solution.params().gamma())}};
    doc["objective"] = solution.objective();
    ordered_json jumps = ordered_json::array();
    const auto& disc = solution.discontinuities();
    for (std::size_t k = 0; k < disc.count(); ++k) {
        jumps.push_back({{"gap_index", disc.gaps()[k]}, {"location", disc.locations()[k]}});
    }
    doc["discontinuities"] = std::move(jumps);
    ordered_json segments = ordered_json::array();
    for (std::size_t j = 0; j < solution.segments().size(); ++j) {
        const SegmentSpline& seg = solution.segments()[j];
        ordered_json s;
        s["domain"] = {seg.domain().a, seg.domain().b};
        s["knots"] = std::vector<double>(seg.knots().begin(), seg.knots().end());
        ordered_json values = ordered_json::array(), derivs = ordered_json::array();
        for (std::size_t i = 0; i < seg.knot_count(); ++i) {
            ordered_json v = ordered_json::array(), w = ordered_json::array();
            for (std::size_t d = 0; d < seg.dims(); ++d) {
                v.push_back(seg.value(i, d));
                w.push_back(seg.deriv(i, d));
            }
            values.push_back(std::move(v));
            derivs.push_back(std::move(w));
        }
        s["values"] = std::move(values);
        s["derivs"] = std::move(derivs);
        ordered_json pieces = ordered_json::array();
        for (const CubicPiece& piece : seg.pieces()) {
            ordered_json coeffs = ordered_json::array();
            for (std::size_t d = 0; d < seg.dims(); ++d) {
                coeffs.push_back({piece.coeffs[4 * d], piece.coeffs[4 * d + 1],
                                  piece.coeffs[4 * d + 2], piece.coeffs[4 * d + 3]});
            }
            pieces.push_back({{"x0", piece.x0}, {"coeffs", std::move(coeffs)}});
        }
        s["pieces"] = std::move(pieces);
        s["energy"] = solution.segment_energies()[j];
        segments.push_back(std::move(s));
    }
    doc["segments"] = std::move(segments);
    return doc;
}

void write_atomically(const std::string& path, const std::string& content,
                      std::ostream& out) {
    if (path == "-") {
        out << content;
        out.flush();
        return;
    }
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(errc::invalid_argument, "cannot open output file " + tmp.string());
        f << content;
    }
    std::filesystem::rename(tmp, target);
}

Gamma parse_gamma(const std::string& text) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "inf" || t == "infinity") return Gamma::infinite();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) {
        throw Error(errc::invalid_gamma, "gamma must be a positive number or 'inf'");
    }
    return Gamma(v);
}

struct IoOptions {
    std::string input;
    std::string output = "-";
    std::size_t grid = 0;
    std::string grid_output;
    bool bin = false;
    double mesh_threshold = kDefaultMeshRatioWarnThreshold;
};

DataSeries load_series(const IoOptions& io, std::ostream& err) {
    ParsedCsv csv;
    if (io.input == "-") {
        csv = read_csv(std::cin);
    } else {
        std::ifstream f(io.input);
        if (!f) throw Error(errc::invalid_argument, "cannot open input file " + io.input);
        csv = read_csv(f);
    }
    std::vector<RawPoint> raw(csv.xs.size());
    for (std::size_t i = 0; i < csv.xs.size(); ++i) {
        raw[i].x = csv.xs[i];
        raw[i].y = csv.rows[i];
        if (!csv.deltas.empty()) raw[i].delta = csv.deltas[i];
    }
    DataSeries series = validate_and_sort(std::move(raw));
    if (series.size() < csv.xs.size()) {
        err << "note: merged " << csv.xs.size() - series.size()
            << " coincident site(s) by weighted averaging\n";
    }
    if (series.size() >= 2) {
        const double ratio = mesh_ratio(series);
        if (io.bin && ratio > io.mesh_threshold) {
            series = bin_to_mesh_ratio(series, io.mesh_threshold);
            err << "note: binned to " << series.size()
                << " site(s) to reach mesh ratio " << io.mesh_threshold << "\n";
        } else if (ratio > io.mesh_threshold) {
            err << "warning: mesh ratio " << ratio << " exceeds " << io.mesh_threshold
                << "; the fitting system may be ill-conditioned (consider --bin)\n";
        }
    }
    return series;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_grid_csv(const CssdSolution& solution, const DataSeries& series,
                    std::size_t grid, const std::string& path, std::ostream& out) {
    std::ostringstream csv;
    csv << "x";
    if (solution.dims() == 1) {
        csv << ",y";
    } else {
        for (std::size_t d = 1; d <= solution.dims(); ++d) csv << ",y" << d;
    }
    csv << "\n";
    const double a = series.x(0), b = series.x(series.size() - 1);
    for (std::size_t j = 0; j < grid; ++j) {
        const double t = grid == 1 ? a
                                   : a + (b - a) * static_cast<double>(j) /
                                             static_cast<double>(grid - 1);
        csv << format_number(t);
        for (double v : solution.evaluate(t)) csv << "," << format_number(v);
        csv << "\n";
    }
    write_atomically(path, csv.str(), out);
}

void emit_solution(const CssdSolution& solution, const DataSeries& series,
                   const IoOptions& io, ordered_json extra, std::ostream& out) {
    ordered_json doc = solution_json(solution);
    for (auto& [key, value] : extra.items()) doc[key] = value;
    write_atomically(io.output, doc.dump(2) + "\n", out);
    if (io.grid > 0) write_grid_csv(solution, series, io.grid, io.grid_output, out);
}

int cmd_fit(const IoOptions& io, double p, const std::string& gamma_text,
            std::ostream& out, std::ostream& err) {
    const DataSeries series = load_series(io, err);
    const Hyperparams params(p, parse_gamma(gamma_text));
    const CssdSolution solution = solve_cssd(series, params);
    emit_solution(solution, series, io, ordered_json::object(), out);
    return kExitOk;
}

// Alternative starting points for --restarts, cycled deterministically.
const std::vector<std::pair<double, double>> kRestartStarts = {
    {0.9999, 10.0}, {0.9, 0.1}, {0.999, 100.0}, {0.5, 1.0},
    {0.99, 0.01},   {0.9999, 0.1}, {0.9, 10.0}, {0.999, 1e-3},
};

int cmd_auto(const IoOptions& io, std::size_t folds, std::uint64_t seed,
             std::size_t budget, std::size_t restarts, double p0,
             const std::string& gamma0_text, std::ostream& out, std::ostream& err) {
    const DataSeries series = load_series(io, err);
    SelectionResult best = select_params(series, folds, seed,
                                         Hyperparams(p0, parse_gamma(gamma0_text)), budget);
    std::size_t evaluations = best.evaluations;
    for (std::size_t r = 0; r < restarts; ++r) {
        const auto& [p_alt, g_alt] = kRestartStarts[r % kRestartStarts.size()];
        SelectionResult next = select_params(series, folds, seed,
                                             Hyperparams(p_alt, Gamma(g_alt)), budget);
        evaluations += next.evaluations;
        if (next.score < best.score) best = next;
    }
    const CssdSolution solution = solve_cssd(series, best.params);
    ordered_json extra;
    extra["cv_score"] = best.score;
    extra["folds"] = folds;
    extra["seed"] = seed;
    extra["evaluations_used"] = evaluations;
    emit_solution(solution, series, io, std::move(extra), out);
    return kExitOk;
}

int cmd_gen(const std::string& signal, std::size_t n, double sigma, std::uint64_t seed,
            const std::string& sites, const std::string& output, std::ostream& out) {
    double (*fn)(double) = nullptr;
    if (signal == "heavisine") {
        fn = synthetic::heavisine;
    } else if (signal == "bessel") {
        fn = synthetic::bessel_ramp;
    } else {
        throw Error(errc::invalid_argument, "unknown signal '" + signal + "'");
    }
    const auto layout = sites == "uniform" ? synthetic::SiteLayout::uniform_random
                                           : synthetic::SiteLayout::equidistant;
    const DataSeries series = synthetic::sample_signal(fn, n, sigma, seed, layout);
    std::ostringstream csv;
    csv << "x,y,delta\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        csv << format_number(series.x(i)) << "," << format_number(series.y(i, 0)) << ","
            << format_number(series.delta(i)) << "\n";
    }
    write_atomically(output, csv.str(), out);
    return kExitOk;
}

int cmd_bench(const std::vector<std::size_t>& sizes, std::size_t runs, double p,
              double gamma, double sigma, std::ostream& out) {
    const Hyperparams params(p, Gamma(gamma));
    auto median_time = [&](const DataSeries& series) {
        std::vector<double> times;
        (void)solve_cssd(series, params);  // warmup
        for (std::size_t run = 0; run < runs; ++run) {
            const auto t0 = std::chrono::steady_clock::now();
            const CssdSolution sol = solve_cssd(series, params);
            const auto t1 = std::chrono::steady_clock::now();
            (void)sol;
            times.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        std::sort(times.begin(), times.end());
        return times[times.size() / 2];
    };
    out << "HeaviSine scenarios, p=" << p << " gamma=" << gamma << " sigma=" << sigma
        << " (median of " << runs << " runs)\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%8s  %16s %6s  %16s %6s\n", "N", "densified [s]",
                  "jumps", "repeated [s]", "jumps");
    out << buf;
    for (std::size_t n : sizes) {
        const DataSeries dens = synthetic::sample_signal(
            synthetic::heavisine, n, sigma, 123, synthetic::SiteLayout::equidistant);
        const DataSeries reps = synthetic::sample_signal_periodic(
            synthetic::heavisine, n, sigma, 123, std::max<std::size_t>(1, n / 200));
        const std::size_t jd = solve_cssd(dens, params).discontinuities().count();
        const std::size_t jr = solve_cssd(reps, params).discontinuities().count();
        std::snprintf(buf, sizeof buf, "%8zu  %16.4f %6zu  %16.4f %6zu\n", n,
                      median_time(dens), jd, median_time(reps), jr);
        out << buf;
    }
    return kExitOk;
}

void add_io_options(CLI::App* cmd, IoOptions& io) {
    cmd->add_option("input", io.input, "input CSV file ('-' for stdin)")->required();
    cmd->add_option("-o,--output", io.output, "output JSON path ('-' for stdout)");
    auto* grid = cmd->add_option("--grid", io.grid,
                                 "emit an evaluation grid CSV with this many points");
    auto* grid_out = cmd->add_option("--grid-output", io.grid_output,
                                     "path of the evaluation grid CSV");
    grid->needs(grid_out);
    grid_out->needs(grid);
    cmd->add_flag("--bin", io.bin, "bin closest sites until the mesh ratio is acceptable");
    cmd->add_option("--mesh-threshold", io.mesh_threshold,
                    "mesh-ratio threshold for the conditioning warning / --bin");
}

}  // namespace

std::string solution_to_json(const CssdSolution& solution) {
    return solution_json(solution).dump(2) + "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"cubic smoothing splines with discontinuities"};
    app.require_subcommand(1);

    IoOptions fit_io;
    double fit_p = 0.999;
    std::string fit_gamma = "inf";
    CLI::App* fit = app.add_subcommand("fit", "solve with fixed hyperparameters");
    add_io_options(fit, fit_io);
    fit->add_option("--p", fit_p, "smoothing weight in (0, 1)")->required();
    fit->add_option("--gamma", fit_gamma, "jump penalty (> 0) or 'inf'")->required();

    IoOptions auto_io;
    std::size_t folds = 5, budget = 60, restarts = 0;
    std::uint64_t seed = 0;
    double p0 = 0.99;
    std::string gamma0 = "1";
    CLI::App* auto_cmd = app.add_subcommand("auto", "select (p, gamma) by K-fold CV, then fit");
    add_io_options(auto_cmd, auto_io);
    auto_cmd->add_option("--folds", folds, "number of CV folds");
    auto_cmd->add_option("--seed", seed, "fold-assignment seed");
    auto_cmd->add_option("--budget", budget, "CV evaluation budget per start");
    auto_cmd->add_option("--restarts", restarts, "additional searches from alternative starts");
    auto_cmd->add_option("--p0", p0, "starting smoothing weight");
    auto_cmd->add_option("--gamma0", gamma0, "starting jump penalty");

    std::string gen_signal = "heavisine", gen_sites = "equidistant", gen_output = "-";
    std::size_t gen_n = 200;
    double gen_sigma = 0.0;
    std::uint64_t gen_seed = 0;
    CLI::App* gen = app.add_subcommand("gen", "emit a synthetic test signal as CSV");
    gen->add_option("--signal", gen_signal, "heavisine or bessel")->required();
    gen->add_option("--n", gen_n, "number of samples")->required();
    gen->add_option("--sigma", gen_sigma, "noise standard deviation (delta column = sigma)");
    gen->add_option("--seed", gen_seed, "noise/site seed");
    gen->add_option("--sites", gen_sites, "equidistant or uniform");
    gen->add_option("-o,--output", gen_output, "output CSV path ('-' for stdout)");

    std::vector<std::size_t> bench_sizes = {200, 400, 800, 1600, 3200, 6400};
    std::size_t bench_runs = 5;
    double bench_p = 0.9999, bench_gamma = 20.0, bench_sigma = 0.02;
    CLI::App* bench = app.add_subcommand("bench", "runtime scaling table");
    bench->add_option("--sizes", bench_sizes, "signal lengths");
    bench->add_option("--runs", bench_runs, "timing runs per size (median reported)");
    bench->add_option("--p", bench_p, "smoothing weight");
    bench->add_option("--gamma", bench_gamma, "jump penalty");
    bench->add_option("--sigma", bench_sigma, "noise standard deviation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << R"({"error":{"code":"usage","message":)" << ordered_json(e.what()).dump()
            << "}}\n";
        return kExitUsage;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_io, fit_p, fit_gamma, out, err);
        if (auto_cmd->parsed()) {
            return cmd_auto(auto_io, folds, seed, budget, restarts, p0, gamma0, out, err);
        }
        if (gen->parsed()) {
            return cmd_gen(gen_signal, gen_n, gen_sigma, gen_seed, gen_sites, gen_output, out);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_sizes, bench_runs, bench_p, bench_gamma, bench_sigma, out);
        }
        return kExitUsage;
    } catch (const Error& e) {
        err << R"({"error":{"code":")" << errc_name(e.code()) << R"(","message":)"
            << ordered_json(e.what()).dump() << "}}\n";
        return is_data_error(e.code()) ? kExitDataError : kExitNumericalError;
    } catch (const std::exception& e) {
        err << R"({"error":{"code":"numerical_failure","message":)"
            << ordered_json(e.what()).dump() << "}}\n";
        return kExitNumericalError;
    }
}

}  // namespace cli
}  // namespace cssd
