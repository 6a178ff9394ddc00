#include "coherent/cli.hpp"

#include "coherent/bounds.hpp"
#include "coherent/certificate.hpp"
#include "coherent/lp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace coherent::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitSolver = 3;

std::string fmt_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v); // shortest round-trip form
    return std::string(buf, end);
}

enum class Format { Human, Json, Csv };

Format parse_format(const std::string& name)
{
    if (name == "human")
        return Format::Human;
    if (name == "json")
        return Format::Json;
    if (name == "csv")
        return Format::Csv;
    throw CLI::ValidationError("--format", "expected human, json or csv");
}

Format default_format()
{
    if (const char* env = std::getenv("COHERENT_FORMAT")) {
        try {
            return parse_format(env);
        } catch (...) {
            return Format::Human;
        }
    }
    return Format::Human;
}

struct OutputSink {
    std::ostream* stream;
    std::optional<std::string> path;

    void write(const std::string& text) const
    {
        if (path) {
            std::ofstream file(*path);
            if (!file)
                throw std::runtime_error("cannot open output file " + *path);
            file << text;
        } else {
            *stream << text;
        }
    }
};

// csv rendering: one header line, one line per row; scalar reports have a
// single row
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << "\n";
    }
    return out.str();
}

struct Rendered {
    std::string human;
    ordered_json json;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;

    std::string render(Format format) const
    {
        switch (format) {
        case Format::Human:
            return human;
        case Format::Json:
            return json.dump(2) + "\n";
        case Format::Csv:
            return to_csv(csv_header, csv_rows);
        }
        return human;
    }
};

Rat require_probability(const std::string& text, const char* what)
{
    Rat p = parse_rat(text);
    if (!(p > 0 && p < 1))
        throw CLI::ValidationError(what, "must lie strictly between 0 and 1");
    return p;
}

std::vector<double> parse_atom_list(const std::string& text)
{
    std::vector<double> atoms;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            atoms.push_back(to_double(parse_rat(item)));
    return atoms;
}

ordered_json ladder_json(const LadderDistribution& ladder, bool rational_output)
{
    ordered_json points = ordered_json::array();
    for (const auto& pt : ladder.points) {
        ordered_json entry;
        if (rational_output) {
            entry["x1"] = format_rat(pt.x1);
            entry["x2"] = format_rat(pt.x2);
            entry["mass"] = format_rat(pt.mass);
        } else {
            entry["x1"] = to_double(pt.x1);
            entry["x2"] = to_double(pt.x2);
            entry["mass"] = to_double(pt.mass);
        }
        entry["x"] = pt.x_value;
        points.push_back(std::move(entry));
    }
    return points;
}

struct ObjectiveSpec {
    ObjectiveFn fn;
    std::string name;
    std::optional<double> closed_form; // the matching tight bound, when one exists
    std::vector<double> witness_atoms; // atoms that put the closed form on the grid
};

ObjectiveSpec make_objective(const std::string& spec, const Rat& p)
{
    if (spec == "cov") {
        ObjectiveSpec s{ObjectiveFn::neg_centered_product(p), "cov", std::nullopt, {}};
        s.closed_form = -cov_bound(to_double(p));
        for (const auto& atom : cov_witness(p).atoms)
            s.witness_atoms.push_back(to_double(atom));
        return s;
    }
    if (spec.rfind("abspow:", 0) == 0) {
        const double exponent = std::stod(spec.substr(7));
        ObjectiveSpec s{ObjectiveFn::abs_power(exponent), spec, std::nullopt, {}};
        if (p == Rat(1, 2)) {
            s.closed_form = abspow_bound(exponent);
            for (const auto& atom : abspow_witness(exponent).atoms)
                s.witness_atoms.push_back(atom);
        }
        return s;
    }
    if (spec.rfind("quad:", 0) == 0) {
        const auto body = spec.substr(5);
        const auto comma = body.find(',');
        if (comma == std::string::npos)
            throw CLI::ValidationError("--f", "quad objective needs quad:<alpha>,<beta>");
        const Rat alpha = parse_rat(body.substr(0, comma));
        const Rat beta = parse_rat(body.substr(comma + 1));
        ObjectiveSpec s{ObjectiveFn::quadratic_form(alpha, beta, p), spec, std::nullopt, {}};
        const auto bound = quad_bound(p, {alpha, beta});
        if (bound.tight) {
            s.closed_form = to_double(bound.value);
            if (bound.witness) {
                for (const auto& atom : to_table(*bound.witness, Rat(1, 2)).atoms)
                    s.witness_atoms.push_back(to_double(atom));
            } else if (bound.degenerate_witness) {
                for (const auto& atom : bound.degenerate_witness->atoms)
                    s.witness_atoms.push_back(to_double(atom));
            }
        }
        return s;
    }
    throw CLI::ValidationError("--f", "expected cov, abspow:<exp> or quad:<alpha>,<beta>");
}

// ---------------------------------------------------------------- bound --

int cmd_bound_cov(const std::string& p_text, Format format, const OutputSink& sink)
{
    const Rat p = require_probability(p_text, "--p");
    const Rat value = cov_bound_exact(p);
    const char* branch = p < Rat(1, 3) ? "p<1/3" : p <= Rat(2, 3) ? "1/3<=p<=2/3" : "p>2/3";

    Rendered r;
    r.json["command"] = "bound";
    r.json["objective"] = "cov";
    r.json["p"] = format_rat(p);
    r.json["value"] = format_rat(value);
    r.json["value_decimal"] = to_double(value);
    r.json["branch"] = branch;
    std::ostringstream human;
    human << "min cov(X1,X2) over coherent laws with E[X] = " << format_rat(p) << ":\n"
          << "  " << format_rat(value) << " = " << fmt_double(to_double(value))
          << "   [branch " << branch << "]\n";
    r.human = human.str();
    r.csv_header = {"p", "value", "value_decimal", "branch"};
    r.csv_rows = {{format_rat(p), format_rat(value), fmt_double(to_double(value)), branch}};
    sink.write(r.render(format));
    return kExitOk;
}

int cmd_bound_quad(const std::string& p_text, const std::string& alpha_text,
                   const std::string& beta_text, Format format, const OutputSink& sink)
{
    const Rat p = require_probability(p_text, "--p");
    const Rat alpha = parse_rat(alpha_text);
    const Rat beta = parse_rat(beta_text);
    const auto bound = quad_bound(p, {alpha, beta});

    Rendered r;
    r.json["command"] = "bound";
    r.json["objective"] = "quad";
    r.json["p"] = format_rat(p);
    r.json["alpha"] = format_rat(alpha);
    r.json["beta"] = format_rat(beta);
    r.json["value"] = format_rat(bound.value);
    r.json["value_decimal"] = to_double(bound.value);
    r.json["tight"] = bound.tight;
    std::ostringstream human;
    human << "max E f over coherent laws, f = " << format_rat(alpha) << "*(x1-x2)^2 + "
          << format_rat(beta) << "*(x1+x2-2p)^2, p = " << format_rat(p) << ":\n"
          << "  value " << format_rat(bound.value) << " = " << fmt_double(to_double(bound.value))
          << (bound.tight ? "  (tight)" : "  (upper bound, not attained)") << "\n";
    if (bound.spec) {
        const auto& spec = *bound.spec;
        r.json["a"] = format_rat(spec.step);
        r.json["case"] = ladder_geometry_name(spec.geometry);
        r.json["subcase"] = ladder_subcase_name(spec.subcase);
        r.json["N"] = spec.steps;
        r.json["condition"] = spec.condition;
        human << "  a = " << format_rat(spec.step) << ", case " << ladder_geometry_name(spec.geometry);
        if (spec.subcase != LadderSubcase::None)
            human << "/" << ladder_subcase_name(spec.subcase);
        human << ", N = " << spec.steps << " (condition " << spec.condition << ")\n";
    } else if (alpha > 0 && alpha >= 2 * beta) {
        const Rat a = alpha / (alpha - beta);
        r.json["a"] = format_rat(a);
        r.json["case"] = nullptr;
        human << "  a = " << format_rat(a) << ", no attainment condition holds\n";
    }
    if (bound.witness) {
        r.json["witness_points"] = bound.witness->first.points.size();
        r.json["witness_ladders"] = bound.witness->second ? 2 : 1;
    } else if (bound.degenerate_witness) {
        r.json["witness_points"] = bound.degenerate_witness->atoms.size();
        r.json["witness_ladders"] = 0;
    }
    r.human = human.str();
    r.csv_header = {"p", "alpha", "beta", "value", "value_decimal", "tight", "case", "N"};
    r.csv_rows = {{format_rat(p), format_rat(alpha), format_rat(beta), format_rat(bound.value),
                   fmt_double(to_double(bound.value)), bound.tight ? "true" : "false",
                   bound.spec ? ladder_geometry_name(bound.spec->geometry) : "",
                   bound.spec ? std::to_string(bound.spec->steps) : ""}};
    sink.write(r.render(format));
    return kExitOk;
}

int cmd_bound_abspow(double exponent, Format format, const OutputSink& sink)
{
    const double value = abspow_bound(exponent);
    const double a0 = alpha0();
    const bool first_branch = exponent <= a0;

    Rendered r;
    r.json["command"] = "bound";
    r.json["objective"] = "abspow";
    r.json["alpha"] = exponent;
    r.json["alpha0"] = a0;
    r.json["branch"] = first_branch ? "two_point" : "six_point";
    r.json["value"] = value;
    if (!first_branch)
        r.json["a_opt"] = abspow_a_opt(exponent);
    std::ostringstream human;
    human << "max E|X1-X2|^" << fmt_double(exponent) << " at p = 1/2:\n"
          << "  " << fmt_double(value) << "   [" << (first_branch ? "2^-alpha branch" : "six-point branch")
          << ", alpha0 = " << fmt_double(a0) << "]\n";
    r.human = human.str();
    r.csv_header = {"alpha", "value", "branch", "alpha0"};
    r.csv_rows = {{fmt_double(exponent), fmt_double(value),
                   first_branch ? "two_point" : "six_point", fmt_double(a0)}};
    sink.write(r.render(format));
    return kExitOk;
}

// --------------------------------------------------------------- ladder --

int cmd_ladder(const std::string& p_text, const std::string& a_text, const std::string& lambda_text,
               bool points_only, bool rational_output, const std::optional<std::string>& table_out,
               Format format, const OutputSink& sink, std::ostream& err)
{
    const Rat p = require_probability(p_text, "--p");
    const Rat a = parse_rat(a_text);
    const Rat lambda = parse_rat(lambda_text);
    const auto spec = classify(p, a);
    if (!spec) {
        err << "not tight: no attainment condition holds for p = " << format_rat(p)
            << ", a = " << format_rat(a) << "\n";
        return kExitVerification;
    }
    const auto witness = build_ladder(*spec);

    if (table_out) {
        std::ofstream file(*table_out);
        if (!file)
            throw std::runtime_error("cannot open " + *table_out);
        file << table_to_text(to_table(witness, lambda));
    }

    Rendered r;
    r.json["command"] = "ladder";
    r.json["p"] = format_rat(p);
    r.json["a"] = format_rat(a);
    r.json["case"] = ladder_geometry_name(spec->geometry);
    r.json["subcase"] = ladder_subcase_name(spec->subcase);
    r.json["N"] = spec->steps;
    r.json["condition"] = spec->condition;
    ordered_json ladders = ordered_json::array();
    ladders.push_back(ladder_json(witness.first, rational_output));
    if (witness.second)
        ladders.push_back(ladder_json(*witness.second, rational_output));
    r.json["ladders"] = std::move(ladders);
    if (witness.second)
        r.json["lambda"] = format_rat(lambda);

    std::ostringstream human;
    auto emit_points = [&](const LadderDistribution& ladder) {
        for (const auto& pt : ladder.points) {
            if (points_only) {
                human << format_rat(pt.x1) << " " << format_rat(pt.x2) << "\n";
            } else if (rational_output) {
                human << "  (" << format_rat(pt.x1) << ", " << format_rat(pt.x2) << ")  X="
                      << pt.x_value << "  mass " << format_rat(pt.mass) << "\n";
            } else {
                human << "  (" << fmt_double(to_double(pt.x1)) << ", " << fmt_double(to_double(pt.x2))
                      << ")  X=" << pt.x_value << "  mass " << fmt_double(to_double(pt.mass)) << "\n";
            }
        }
    };
    if (!points_only) {
        human << "ladder witness for p = " << format_rat(p) << ", a = " << format_rat(a) << ": case "
              << ladder_geometry_name(spec->geometry);
        if (spec->subcase != LadderSubcase::None)
            human << "/" << ladder_subcase_name(spec->subcase);
        human << ", N = " << spec->steps << "\n";
    }
    emit_points(witness.first);
    if (witness.second) {
        if (!points_only)
            human << "second ladder (any convex mix attains the bound; lambda = "
                  << format_rat(lambda) << "):\n";
        emit_points(*witness.second);
    }
    r.human = human.str();

    r.csv_header = {"ladder", "x1", "x2", "x", "mass"};
    auto csv_points = [&](const LadderDistribution& ladder, int index) {
        for (const auto& pt : ladder.points)
            r.csv_rows.push_back({std::to_string(index), format_rat(pt.x1), format_rat(pt.x2),
                                  std::to_string(pt.x_value), format_rat(pt.mass)});
    };
    csv_points(witness.first, 0);
    if (witness.second)
        csv_points(*witness.second, 1);
    sink.write(r.render(format));
    return kExitOk;
}

// ------------------------------------------------------------------- lp --

int cmd_lp(const std::string& p_text, const std::string& f_spec, const std::string& grid_text,
           int uniform_n, const std::string& extra_text, const std::string& refine_text,
           bool with_dual, const std::optional<std::string>& dump_lp,
           const std::optional<std::string>& witness_out, Format format, const OutputSink& sink,
           std::ostream& err)
{
    const Rat p_exact = require_probability(p_text, "--p");
    const double p = to_double(p_exact);
    const auto objective = make_objective(f_spec, p_exact);

    std::vector<double> extra;
    if (extra_text == "auto")
        extra = objective.witness_atoms;
    else if (!extra_text.empty())
        extra = parse_atom_list(extra_text);

    try {
        Rendered r;
        r.json["command"] = "lp";
        r.json["p"] = format_rat(p_exact);
        r.json["objective"] = objective.name;

        if (!refine_text.empty()) {
            std::vector<int> sizes;
            for (double v : parse_atom_list(refine_text))
                sizes.push_back(int(v));
            const auto result = refine(p, objective.fn, sizes, extra);
            ordered_json rows = ordered_json::array();
            std::ostringstream human;
            human << "grid refinement, p = " << format_rat(p_exact) << ", f = " << objective.name << "\n";
            r.csv_header = {"n", "grid_size", "value"};
            for (const auto& row : result.rows) {
                rows.push_back({{"n", row.n}, {"grid_size", row.grid_size}, {"value", row.value}});
                human << "  n = " << row.n << "  atoms = " << row.grid_size << "  optimum = "
                      << fmt_double(row.value) << "\n";
                r.csv_rows.push_back({std::to_string(row.n), std::to_string(row.grid_size),
                                      fmt_double(row.value)});
            }
            r.json["rows"] = std::move(rows);
            r.json["best_value"] = result.best_value;
            human << "best " << fmt_double(result.best_value) << "\n";
            if (objective.closed_form) {
                r.json["closed_form"] = *objective.closed_form;
                human << "closed form " << fmt_double(*objective.closed_form) << "\n";
            }
            if (witness_out) {
                std::ofstream file(*witness_out);
                file << table_to_text(result.best_table);
            }
            r.human = human.str();
            sink.write(r.render(format));
            return kExitOk;
        }

        std::vector<double> grid;
        if (!grid_text.empty())
            grid = merge_grid(parse_atom_list(grid_text), extra);
        else
            grid = merge_grid(uniform_grid(uniform_n), extra);

        const auto primal_lp = build_primal(p, objective.fn, grid);
        if (dump_lp) {
            std::ofstream file(*dump_lp);
            file << lp_to_text(primal_lp);
        }
        const auto sol = solve(primal_lp);
        if (sol.status != LpStatus::Optimal) {
            err << "solver failure: primal status " << lp_status_name(sol.status) << "\n";
            return kExitSolver;
        }

        ordered_json grid_json = ordered_json::array();
        for (double a : grid)
            grid_json.push_back(a);
        r.json["grid"] = std::move(grid_json);
        r.json["value"] = sol.value;
        r.json["iterations"] = sol.iterations;
        r.json["feasibility_residual"] = sol.feasibility_residual;

        std::ostringstream human;
        human << "primal LP, p = " << format_rat(p_exact) << ", f = " << objective.name << ", "
              << grid.size() << " atoms\n  optimum " << fmt_double(sol.value) << "  ("
              << sol.iterations << " simplex iterations)\n";

        if (with_dual) {
            const auto dual_sol = solve(build_dual(p, objective.fn, grid));
            if (dual_sol.status != LpStatus::Optimal) {
                err << "solver failure: dual status " << lp_status_name(dual_sol.status) << "\n";
                return kExitSolver;
            }
            r.json["dual_value"] = dual_sol.value;
            r.json["gap"] = std::abs(sol.value - dual_sol.value);
            human << "  dual optimum " << fmt_double(dual_sol.value) << "  gap "
                  << fmt_double(std::abs(sol.value - dual_sol.value)) << "\n";
        }
        if (objective.closed_form) {
            r.json["closed_form"] = *objective.closed_form;
            r.json["closed_form_error"] = std::abs(sol.value - *objective.closed_form);
            human << "  closed form " << fmt_double(*objective.closed_form) << "  |diff| "
                  << fmt_double(std::abs(sol.value - *objective.closed_form)) << "\n";
        }
        const auto witness = solution_to_table(p, grid, sol.primal);
        const auto report = validate_coherence<double>(witness, 1e-8);
        r.json["witness_coherent"] = report.pass;
        human << "  witness coherence at 1e-8: " << (report.pass ? "pass" : "FAIL") << "\n";
        if (witness_out) {
            std::ofstream file(*witness_out);
            file << table_to_text(witness);
        }
        r.human = human.str();
        r.csv_header = {"p", "objective", "atoms", "value", "iterations"};
        r.csv_rows = {{format_rat(p_exact), objective.name, std::to_string(grid.size()),
                       fmt_double(sol.value), std::to_string(sol.iterations)}};
        sink.write(r.render(format));
        return kExitOk;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
}

// -------------------------------------------------------------- certify --

int cmd_certify(const std::string& kind, const std::string& p_text, double exponent,
                double perturb, const SearchConfig& config, Format format, const OutputSink& sink,
                std::ostream& err)
{
    DualCertificate cert{PiecewiseCertificate(CertRole::G, {{0.0, 1.0, PieceExpr::constant_zero()}}),
                         PiecewiseCertificate(CertRole::G, {{0.0, 1.0, PieceExpr::constant_zero()}}),
                         0.0, 0.0};
    ObjectiveFn f = ObjectiveFn::abs_power(1.0);
    double p = 0.5;
    double closed_form = 0.0;
    ordered_json params;

    if (kind == "cov") {
        const Rat p_exact = require_probability(p_text, "--p");
        p = to_double(p_exact);
        auto [c, cparams] = cov_certificate(p);
        cert = c;
        params["delta"] = cparams.delta;
        params["gamma"] = cparams.gamma;
        params["x0"] = cparams.x0;
        f = ObjectiveFn::neg_centered_product(p_exact);
        closed_form = -cov_bound(p);
    } else if (kind == "abspow") {
        auto [c, ap] = abspow_certificate(exponent);
        cert = c;
        params["alpha"] = ap.alpha;
        params["opt"] = ap.opt;
        params["y0"] = ap.y0;
        f = ObjectiveFn::abs_power(exponent);
        closed_form = ap.opt;
    } else {
        throw CLI::ValidationError("certify", "expected cov or abspow");
    }

    const double target = cert.claimed_value(p);
    if (perturb != 1.0)
        cert = cert.perturbed(perturb);
    const auto report = verify_certificate(cert, f, p, target, config);
    const auto value = dual_value(cert, f, p, config);

    Rendered r;
    r.json["command"] = "certify";
    r.json["kind"] = kind;
    if (kind == "cov")
        r.json["p"] = p;
    else
        r.json["alpha"] = exponent;
    r.json["params"] = params;
    r.json["perturb"] = perturb;
    r.json["pass"] = report.pass;
    r.json["max_violation_1"] = report.max_violation_1;
    r.json["max_violation_2"] = report.max_violation_2;
    r.json["argmax_1"] = {report.argmax_1.x, report.argmax_1.y};
    r.json["argmax_2"] = {report.argmax_2.x, report.argmax_2.y};
    r.json["dual_value"] = value;
    r.json["closed_form"] = closed_form;
    r.json["abs_error"] = std::abs(value - closed_form);

    std::ostringstream human;
    human << "certificate " << kind << (kind == "cov" ? " p = " + p_text : " alpha = " + fmt_double(exponent));
    if (perturb != 1.0)
        human << "  (perturbed x" << fmt_double(perturb) << ")";
    human << "\n  " << (report.pass ? "PASS" : "FAIL") << "  violations: "
          << fmt_double(report.max_violation_1) << " at (" << fmt_double(report.argmax_1.x) << ", "
          << fmt_double(report.argmax_1.y) << "); " << fmt_double(report.max_violation_2) << " at ("
          << fmt_double(report.argmax_2.x) << ", " << fmt_double(report.argmax_2.y) << ")\n"
          << "  dual value " << fmt_double(value) << "  closed form " << fmt_double(closed_form)
          << "  |diff| " << fmt_double(std::abs(value - closed_form)) << "\n";
    r.human = human.str();
    r.csv_header = {"kind", "parameter", "pass", "max_violation_1", "max_violation_2",
                    "dual_value", "closed_form"};
    r.csv_rows = {{kind, kind == "cov" ? p_text : fmt_double(exponent),
                   report.pass ? "true" : "false", fmt_double(report.max_violation_1),
                   fmt_double(report.max_violation_2), fmt_double(value), fmt_double(closed_form)}};
    sink.write(r.render(format));
    if (!report.pass) {
        err << "certificate verification failed\n";
        return kExitVerification;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- asymp --

int cmd_asymp(const std::string& alphas_text, double from, double to, int points,
              bool include_alpha0, Format format, const OutputSink& sink)
{
    std::vector<double> alphas;
    if (!alphas_text.empty()) {
        alphas = parse_atom_list(alphas_text);
    } else {
        if (!(from > 0 && to > from) || points < 2)
            throw CLI::ValidationError("--from/--to", "need 0 < from < to and points >= 2");
        for (int k = 0; k < points; ++k)
            alphas.push_back(from * std::pow(to / from, double(k) / (points - 1)));
    }
    const double a0 = alpha0();
    if (include_alpha0)
        alphas.insert(alphas.begin(), a0);
    const double limit = 2.0 / std::exp(1.0);

    Rendered r;
    r.json["command"] = "asymp";
    r.json["limit"] = limit;
    ordered_json rows = ordered_json::array();
    std::ostringstream human;
    human << "alpha * max E|X1-X2|^alpha -> 2/e = " << fmt_double(limit) << "\n";
    r.csv_header = {"alpha", "alpha_times_bound", "deviation", "branch"};
    for (double alpha : alphas) {
        if (alpha < a0)
            throw CLI::ValidationError("--alphas", "asymptotics need alpha >= alpha0");
        const double scaled = asymptotic_check(alpha);
        const double deviation = std::abs(scaled - limit);
        const bool crossover = alpha == a0;
        rows.push_back({{"alpha", alpha},
                        {"alpha_times_bound", scaled},
                        {"deviation", deviation},
                        {"branch", crossover ? "alpha0 (branch crossover)" : "six_point"}});
        human << "  alpha = " << fmt_double(alpha) << "  alpha*bound = " << fmt_double(scaled)
              << "  |dev| = " << fmt_double(deviation)
              << (crossover ? "  <- alpha0, branch crossover" : "") << "\n";
        r.csv_rows.push_back({fmt_double(alpha), fmt_double(scaled), fmt_double(deviation),
                              crossover ? "alpha0" : "six_point"});
    }
    r.json["rows"] = std::move(rows);
    r.human = human.str();
    sink.write(r.render(format));
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"tight bounds, witness distributions, LPs and dual certificates for "
                 "joint laws of two conditional expectations of a Bernoulli variable"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format_name;
    app.add_option("--format", format_name, "output format: human, json or csv");
    std::optional<std::string> output_path;
    app.add_option("--output", output_path, "write the report to a file instead of stdout");

    // bound
    auto* bound = app.add_subcommand("bound", "closed-form tight bounds");
    bound->require_subcommand(1);
    std::string bound_p = "1/2", quad_alpha = "1", quad_beta = "0";
    double bound_exponent = 1.0;
    auto* bound_cov = bound->add_subcommand("cov", "minimal covariance");
    bound_cov->add_option("--p", bound_p, "prior probability (rational or decimal)")->required();
    auto* bound_quad = bound->add_subcommand("quad", "quadratic objective");
    bound_quad->add_option("--p", bound_p, "prior probability")->required();
    bound_quad->add_option("--alpha", quad_alpha, "coefficient of (x1-x2)^2")->required();
    bound_quad->add_option("--beta", quad_beta, "coefficient of (x1+x2-2p)^2")->required();
    auto* bound_abspow = bound->add_subcommand("abspow", "|x1-x2|^alpha at p = 1/2");
    bound_abspow->add_option("--alpha", bound_exponent, "exponent")->required()
        ->check(CLI::PositiveNumber);

    // ladder
    auto* ladder = app.add_subcommand("ladder", "extremal staircase witnesses");
    std::string ladder_p, ladder_a, ladder_lambda = "1/2";
    bool points_only = false, float_output = false;
    std::optional<std::string> ladder_out;
    ladder->add_option("--p", ladder_p, "prior probability")->required();
    ladder->add_option("--a", ladder_a, "step a in (X1-p)+(X2-p) = a(X-p)")->required();
    ladder->add_option("--lambda", ladder_lambda, "mixing weight for the two-ladder case");
    ladder->add_flag("--points-only", points_only, "print bare coordinates for plotting");
    ladder->add_flag("--float", float_output, "decimal output instead of rationals");
    ladder->add_option("--out", ladder_out, "write the witness table to a file");

    // lp
    auto* lp = app.add_subcommand("lp", "discretized primal/dual programs");
    std::string lp_p, lp_f = "cov", lp_grid, lp_extra, lp_refine;
    int lp_n = 20;
    bool lp_dual = false;
    std::optional<std::string> lp_dump, lp_witness;
    lp->add_option("--p", lp_p, "prior probability")->required();
    lp->add_option("--f", lp_f, "objective: cov, abspow:<exp> or quad:<a>,<b>");
    lp->add_option("--grid", lp_grid, "comma list of atoms (rationals or decimals)");
    lp->add_option("--n", lp_n, "uniform grid {k/n}")->check(CLI::PositiveNumber);
    lp->add_option("--extra-atoms", lp_extra, "'auto' injects known witness atoms, or a comma list");
    lp->add_option("--refine", lp_refine, "comma list of n; runs the refinement trace");
    lp->add_flag("--dual", lp_dual, "also solve the dual and report the gap");
    lp->add_option("--dump-lp", lp_dump, "write the primal LP in text form");
    lp->add_option("--witness-out", lp_witness, "write the optimal table");

    // certify
    auto* certify = app.add_subcommand("certify", "verify dual certificates numerically");
    certify->require_subcommand(1);
    std::string certify_p = "1/4";
    double certify_alpha = 4.0, perturb = 1.0;
    SearchConfig config;
    auto* certify_cov = certify->add_subcommand("cov", "covariance certificate, p in (0,1/3]");
    certify_cov->add_option("--p", certify_p, "prior probability")->required();
    auto* certify_abspow = certify->add_subcommand("abspow", "|x1-x2|^alpha certificate");
    certify_abspow->add_option("--alpha", certify_alpha, "exponent")->required()
        ->check(CLI::PositiveNumber);
    for (auto* sub : {certify_cov, certify_abspow}) {
        sub->add_option("--perturb", perturb, "scale the certificate to demonstrate failure");
        sub->add_option("--grid-n", config.grid_n, "sweep resolution per axis");
        sub->add_option("--refine-cells", config.refine_cells, "best cells refined");
        sub->add_option("--refine-steps", config.refine_steps, "refinement budget per cell");
        sub->add_option("--tol", config.tol, "violation tolerance");
    }

    // asymp
    auto* asymp = app.add_subcommand("asymp", "large-exponent behaviour of the abspow bound");
    std::string asymp_alphas;
    double asymp_from = 1e2, asymp_to = 1e6;
    int asymp_points = 5;
    bool no_alpha0 = false;
    asymp->add_option("--alphas", asymp_alphas, "explicit comma list of exponents");
    asymp->add_option("--from", asymp_from, "range start (log-spaced)");
    asymp->add_option("--to", asymp_to, "range end");
    asymp->add_option("--points", asymp_points, "number of range points");
    asymp->add_flag("--no-alpha0", no_alpha0, "omit the alpha0 crossover row");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.push_back("coherent");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_storage)
        argv.push_back(s.c_str());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return kExitOk;
        }
        err << e.what() << "\n";
        return kExitUsage;
    }

    const Format format = format_name.empty() ? default_format() : parse_format(format_name);
    OutputSink sink{&out, output_path};

    try {
        if (bound_cov->parsed())
            return cmd_bound_cov(bound_p, format, sink);
        if (bound_quad->parsed())
            return cmd_bound_quad(bound_p, quad_alpha, quad_beta, format, sink);
        if (bound_abspow->parsed())
            return cmd_bound_abspow(bound_exponent, format, sink);
        if (ladder->parsed())
            return cmd_ladder(ladder_p, ladder_a, ladder_lambda, points_only, !float_output,
                              ladder_out, format, sink, err);
        if (lp->parsed())
            return cmd_lp(lp_p, lp_f, lp_grid, lp_n, lp_extra, lp_refine, lp_dual, lp_dump,
                          lp_witness, format, sink, err);
        if (certify_cov->parsed())
            return cmd_certify("cov", certify_p, 0.0, perturb, config, format, sink, err);
        if (certify_abspow->parsed())
            return cmd_certify("abspow", "", certify_alpha, perturb, config, format, sink, err);
        if (asymp->parsed())
            return cmd_asymp(asymp_alphas, asymp_from, asymp_to, asymp_points, !no_alpha0, format,
                             sink);
        err << "no subcommand given\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        err << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "invalid arguments: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const LadderConstructionError& e) {
        err << "construction failure: " << e.what() << "\n";
        return kExitVerification;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}

} // namespace coherent::cli
