#include "mdshap/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>

#include <CLI11.hpp>

#include "mdshap/distributions.hpp"
#include "mdshap/error.hpp"
#include "mdshap/estimation.hpp"
#include "mdshap/io.hpp"
#include "mdshap/report.hpp"

namespace mdshap::cli {
namespace {

using nlohmann::json;

struct Prepared {
    std::vector<std::string> columns;
    Matrix raw;
    Matrix work;  // after log transforms and standardization
    std::vector<char> log_flags;
    std::optional<StandardizationPlan> plan;
    std::optional<LocationScatter> model;
};

bool row_complete(const Matrix& m, Eigen::Index i) { return m.row(i).allFinite(); }

Matrix complete_rows(const Matrix& m) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (row_complete(m, i)) keep.push_back(i);
    }
    Matrix out(static_cast<Eigen::Index>(keep.size()), m.cols());
    for (std::size_t r = 0; r < keep.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(keep[r]);
    return out;
}

Prepared prepare(const RunConfig& config) {
    Prepared prep;
    NumericTable table = read_numeric_csv(config.input, HeaderMode::Required);
    prep.columns = table.header;
    prep.raw = table.values;
    prep.work = table.values;
    prep.log_flags.assign(prep.columns.size(), 0);
    for (const std::string& name : config.log_columns) {
        const auto it = std::find(prep.columns.begin(), prep.columns.end(), name);
        if (it == prep.columns.end()) throw Error(ErrorCode::InvalidArgument, "unknown column '" + name + "' in --log");
        const auto j = static_cast<Eigen::Index>(it - prep.columns.begin());
        prep.log_flags[static_cast<std::size_t>(j)] = 1;
        for (Eigen::Index i = 0; i < prep.work.rows(); ++i) {
            const double v = prep.work(i, j);
            prep.work(i, j) = v > 0.0 ? std::log(v) : std::numeric_limits<double>::quiet_NaN();
        }
    }
    if (prep.work.rows() == 0) return prep;

    if (config.mu_path) {
        prep.model = load_model(*config.mu_path, *config.sigma_path);
        if (prep.model->dim() != static_cast<std::size_t>(prep.work.cols()))
            throw Error(ErrorCode::DimensionMismatch, "model dimension " + std::to_string(prep.model->dim()) +
                                                          " does not match " + std::to_string(prep.work.cols()) +
                                                          " data columns");
    } else if (*config.estimate == Estimate::Sample) {
        const Matrix complete = complete_rows(prep.work);
        prep.model = LocationScatter::build(column_means(complete), sample_covariance(complete));
    } else {
        const Matrix complete = complete_rows(prep.work);
        auto [standardized, plan] = robust_standardize(complete);
        prep.work = apply_standardization(prep.work, plan);
        prep.plan = plan;
        prep.model = LocationScatter::build(Vector::Zero(prep.work.cols()), sample_covariance(standardized));
    }
    return prep;
}

// Working scale back to the input scale.
Vector to_input_scale(const Prepared& prep, const Vector& v) {
    Vector out = prep.plan ? unstandardize_row(v, *prep.plan) : v;
    for (std::size_t j = 0; j < prep.log_flags.size(); ++j) {
        if (prep.log_flags[j]) out(static_cast<Eigen::Index>(j)) = std::exp(out(static_cast<Eigen::Index>(j)));
    }
    return out;
}

json header_json(const RunConfig& config, const Prepared& prep, const char* kind) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = kind;
    doc["columns"] = prep.columns;
    doc["level"] = config.detect.level;
    json transforms = json::array();
    for (std::size_t j = 0; j < prep.columns.size(); ++j) transforms.push_back(prep.log_flags[j] ? "log" : "none");
    doc["transforms"] = transforms;
    if (config.mu_path) doc["model_source"] = "files";
    else doc["model_source"] = (*config.estimate == Estimate::Sample) ? "sample" : "standardize";
    if (prep.model) doc["model"] = {{"mu", to_json(prep.model->mu())}, {"sigma", to_json(prep.model->sigma())}};
    if (prep.plan) doc["standardization"] = {{"medians", to_json(prep.plan->medians)}, {"mads", to_json(prep.plan->mads)}};
    return doc;
}

json failure_json(std::size_t row, const RowFailure& f) {
    return {{"row", row}, {"error", f.message}, {"error_code", std::string(to_string(f.code))}};
}

std::vector<IndexSet> read_cells(const std::filesystem::path& path, const Prepared& prep) {
    const Matrix mask = read_numeric_csv(path, HeaderMode::Optional).values;
    if (mask.rows() != prep.work.rows() || mask.cols() != prep.work.cols())
        throw Error(ErrorCode::ShapeMismatch, "cell mask must be " + std::to_string(prep.work.rows()) + "x" +
                                                  std::to_string(prep.work.cols()));
    std::vector<IndexSet> cells(static_cast<std::size_t>(mask.rows()));
    for (Eigen::Index i = 0; i < mask.rows(); ++i)
        for (Eigen::Index j = 0; j < mask.cols(); ++j)
            if (mask(i, j) != 0.0) cells[static_cast<std::size_t>(i)].push_back(static_cast<std::size_t>(j));
    return cells;
}

void emit(const RunConfig& config, const json& doc) {
    if (config.out) {
        std::ofstream out(*config.out);
        if (!out) throw Error(ErrorCode::ParseError, "cannot write " + config.out->string());
        out << doc.dump(2) << '\n';
    }
    if (config.svg_dir) write_files(*config.svg_dir, render_report(doc, config.max_rows));
}

std::vector<std::string> names_of(const Prepared& prep, const IndexSet& s) {
    std::vector<std::string> out;
    for (std::size_t j : s) out.push_back(prep.columns[j]);
    return out;
}

}  // namespace

void validate(const RunConfig& config) {
    if (config.command == Command::Explain || config.command == Command::Detect) {
        const bool files = config.mu_path.has_value() || config.sigma_path.has_value();
        if (files && !(config.mu_path && config.sigma_path))
            throw Error(ErrorCode::InvalidArgument, "--mu and --sigma must be given together");
        if (files == config.estimate.has_value())
            throw Error(ErrorCode::InvalidArgument, "give exactly one model source: --mu/--sigma or --estimate");
        mdshap::validate(config.detect);
    }
    if (config.command == Command::Simulate) mdshap::validate(config.grid);
}

json cmd_explain(const RunConfig& config) {
    validate(config);
    const Prepared prep = prepare(config);
    json doc = header_json(config, prep, "explain");
    doc["rows"] = json::array();
    if (prep.work.rows() == 0) {
        emit(config, doc);
        return doc;
    }
    const LocationScatter& model = *prep.model;
    const int dof = static_cast<int>(model.dim());
    const double central = chi2_quantile(dof, config.detect.level);

    std::vector<ExplainRecord> records;
    if (config.cells_path) {
        records = explain_rows_given_cells(model, prep.work, read_cells(*config.cells_path, prep));
        doc["reference"] = "local";
    } else {
        records = config.serial ? explain_rows_serial(model, prep.work) : explain_rows(model, prep.work);
        doc["reference"] = "mu";
    }

    for (std::size_t i = 0; i < records.size(); ++i) {
        const ExplainRecord& rec = records[i];
        if (rec.failure) {
            doc["rows"].push_back(failure_json(i, *rec.failure));
            continue;
        }
        const auto& e = rec.explanation;
        double cutoff = central;
        if (config.cells_path) cutoff = noncentral_chi2_quantile(dof, md2(model, e.reference), config.detect.level);
        json row{{"row", i},
                 {"x", to_json(Vector(prep.raw.row(static_cast<Eigen::Index>(i)).transpose()))},
                 {"md2", e.total},
                 {"phi", to_json(e.phi)},
                 {"rescaled", to_json(rescaled_contributions(e))},
                 {"Phi", to_json(rec.interactions)},
                 {"cutoff", cutoff},
                 {"outlier", e.total > cutoff}};
        if (config.cells_path) row["reference"] = to_json(to_input_scale(prep, e.reference));
        doc["rows"].push_back(std::move(row));
    }
    emit(config, doc);
    return doc;
}

json cmd_detect(const RunConfig& config) {
    validate(config);
    const Prepared prep = prepare(config);
    json doc = header_json(config, prep, "detect");
    doc["algorithm"] = config.algorithm == Algorithm::SCD ? "scd" : "moe";
    doc["delta"] = config.detect.delta;
    doc["eta"] = config.detect.eta;
    doc["rows"] = json::array();
    const auto p = prep.columns.size();
    std::vector<std::size_t> per_column(p, 0);
    json per_row = json::array();

    if (prep.work.rows() > 0) {
        DetectOptions options = config.detect;
        options.record_history = config.history;
        const auto records = config.serial ? detect_rows_serial(*prep.model, prep.work, config.algorithm, options)
                                           : detect_rows(*prep.model, prep.work, config.algorithm, options);
        for (std::size_t i = 0; i < records.size(); ++i) {
            const DetectRecord& rec = records[i];
            if (rec.failure) {
                doc["rows"].push_back(failure_json(i, *rec.failure));
                per_row.push_back(0);
                continue;
            }
            const CellFlagResult& r = rec.result;
            const Vector x = prep.raw.row(static_cast<Eigen::Index>(i)).transpose();
            Vector x_tilde = x;
            const Vector imputed = to_input_scale(prep, r.x_tilde);
            for (std::size_t j : r.flagged) x_tilde(static_cast<Eigen::Index>(j)) = imputed(static_cast<Eigen::Index>(j));
            json row{{"row", i},
                     {"x", to_json(x)},
                     {"flagged", r.flagged},
                     {"flagged_names", names_of(prep, r.flagged)},
                     {"x_tilde", to_json(x_tilde)},
                     {"mu_tilde", to_json(to_input_scale(prep, r.mu_tilde))},
                     {"d", to_json(r.d)},
                     {"phi", to_json(r.phi_final.phi)},
                     {"md2", r.phi_final.total},
                     {"Phi", to_json(interaction_matrix(*prep.model, prep.work.row(static_cast<Eigen::Index>(i)).transpose(),
                                                        r.phi_final.reference).phi)},
                     {"shifts", r.shifts},
                     {"status", r.status == DetectStatus::Converged ? "converged" : "iteration_cap_exceeded"}};
            if (config.history) {
                json hist = json::array();
                for (const Snapshot& s : r.history)
                    hist.push_back({{"iteration", s.iteration}, {"phi", to_json(s.phi)}, {"md2", s.md2}, {"cutoff", s.cutoff}});
                row["history"] = std::move(hist);
            }
            for (std::size_t j : r.flagged) ++per_column[j];
            per_row.push_back(r.flagged.size());
            doc["rows"].push_back(std::move(row));
        }
    }
    doc["cell_map"] = {{"per_column", per_column}, {"per_row", per_row}};
    emit(config, doc);
    return doc;
}

json cmd_simulate(const RunConfig& config) {
    validate(config);
    const auto rows = config.serial ? run_grid_serial(config.grid) : run_grid(config.grid);
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["kind"] = "simulate";
    doc["master_seed"] = config.grid.master_seed;
    doc["scenario"] = std::string(to_string(config.grid.scenario));
    doc["replications"] = config.grid.replications;
    doc["delta"] = config.grid.detect.delta;
    doc["eta"] = config.grid.detect.eta;
    doc["level"] = config.grid.detect.level;
    json table = json::array();
    for (const MetricRow& r : rows) {
        const SimulationCase& c = r.sim_case;
        json row{{"case", c.case_index},  {"replication", c.replication}, {"p", c.p},
                 {"n", c.n},              {"cov_kind", std::string(to_string(c.cov_kind))},
                 {"gamma", c.gamma},      {"detector", std::string(to_string(r.detector))},
                 {"true_cells", r.true_cells}, {"flagged_cells", r.flagged_cells}};
        if (c.scenario == Scenario::Shift) {
            row["eps1"] = c.eps1;
            row["eps2"] = c.eps2;
        } else {
            row["eps3"] = c.eps3;
        }
        if (r.error.empty()) {
            row["precision"] = r.metrics.precision;
            row["recall"] = r.metrics.recall;
            row["fscore"] = r.metrics.fscore;
        } else {
            row["error"] = r.error;
        }
        table.push_back(std::move(row));
    }
    doc["rows"] = std::move(table);
    json agg = json::array();
    for (const AggregateRow& a : aggregate(rows)) {
        agg.push_back({{"cov_kind", std::string(to_string(a.cov_kind))},
                       {"detector", std::string(to_string(a.detector))},
                       {"count", a.count},
                       {"precision", a.mean.precision},
                       {"recall", a.mean.recall},
                       {"fscore", a.mean.fscore}});
    }
    doc["aggregate"] = std::move(agg);

    if (config.csv_out) {
        std::ofstream out(*config.csv_out);
        if (!out) throw Error(ErrorCode::ParseError, "cannot write " + config.csv_out->string());
        out << "case,replication,scenario,cov_kind,p,n,eps1,eps2,eps3,gamma,detector,precision,recall,fscore,error\n";
        out.precision(17);
        for (const MetricRow& r : rows) {
            const SimulationCase& c = r.sim_case;
            out << c.case_index << ',' << c.replication << ',' << to_string(c.scenario) << ','
                << to_string(c.cov_kind) << ',' << c.p << ',' << c.n << ',' << c.eps1 << ',' << c.eps2 << ','
                << c.eps3 << ',' << c.gamma << ',' << to_string(r.detector) << ',' << r.metrics.precision << ','
                << r.metrics.recall << ',' << r.metrics.fscore << ",\"" << r.error << "\"\n";
        }
    }
    emit(config, doc);
    return doc;
}

json cmd_report(const RunConfig& config) {
    const json doc = load_results(config.input);
    const auto files = render_report(doc, config.max_rows);
    const std::filesystem::path dir = config.svg_dir.value_or(std::filesystem::path("."));
    write_files(dir, files);
    json written = json::array();
    for (const auto& f : files) written.push_back((dir / f.name).string());
    return {{"written", written}};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Shapley explanations of Mahalanobis outlyingness and cellwise outlier detection", "mdshap"};
    app.require_subcommand(1);
    RunConfig config;
    std::string estimate;
    std::string algorithm = "moe";
    std::string scenario = "structured";
    std::vector<std::string> cov_kinds{"mix"};

    auto add_model_options = [&](CLI::App* sub) {
        sub->add_option("--input", config.input, "Data CSV with header row")->required()->check(CLI::ExistingFile);
        sub->add_option("--mu", config.mu_path, "Location vector, single-column CSV")->check(CLI::ExistingFile);
        sub->add_option("--sigma", config.sigma_path, "Scatter matrix, headerless square CSV")->check(CLI::ExistingFile);
        sub->add_option("--estimate", estimate, "Estimate the model from the data")
            ->check(CLI::IsMember({"sample", "standardize"}));
        sub->add_option("--log", config.log_columns, "Columns to log-transform before modelling")->delimiter(',');
        sub->add_option("--level", config.detect.level, "Cutoff quantile")->capture_default_str();
        sub->add_option("--out", config.out, "JSON report path");
        sub->add_option("--svg", config.svg_dir, "Directory for SVG figures");
        sub->add_option("--max-rows", config.max_rows, "Rows drawn in per-row figures")->capture_default_str();
        sub->add_option("--seed", config.seed, "Accepted for interface uniformity; the command is deterministic");
        sub->add_flag("--serial", config.serial, "Use the serial reference kernels");
    };

    CLI::App* explain = app.add_subcommand("explain", "Shapley values and interaction indices per row");
    add_model_options(explain);
    explain->add_option("--cells", config.cells_path, "0/1 mask of externally flagged cells")->check(CLI::ExistingFile);

    CLI::App* detect = app.add_subcommand("detect", "Cellwise outlier detection with SCD or MOE");
    add_model_options(detect);
    detect->add_option("--algorithm", algorithm, "scd or moe")->check(CLI::IsMember({"scd", "moe"}))->capture_default_str();
    detect->add_option("--delta", config.detect.delta, "Step size in (0,1]")->capture_default_str();
    detect->add_option("--eta", config.detect.eta, "MOE flag threshold in [0,1]")->capture_default_str();
    detect->add_flag("--history", config.history, "Record Shapley values after every shift");

    CLI::App* simulate = app.add_subcommand("simulate", "Contamination simulation grid");
    simulate->add_option("--scenario", scenario, "shift or structured")
        ->check(CLI::IsMember({"shift", "structured"}))->capture_default_str();
    simulate->add_option("--cov", cov_kinds, "Covariance families: mod,mix,low")->delimiter(',');
    simulate->add_option("--p", config.grid.dims, "Dimensions")->delimiter(',');
    simulate->add_option("--eps1", config.grid.eps1, "Shift: fractions of cells per row")->delimiter(',');
    simulate->add_option("--eps2", config.grid.eps2, "Shift: fractions of rows")->delimiter(',');
    simulate->add_option("--eps3", config.grid.eps3, "Structured: fractions of cells per column")->delimiter(',');
    simulate->add_option("--gamma", config.grid.gammas, "Outlyingness magnitudes")->delimiter(',');
    simulate->add_option("--reps", config.grid.replications, "Replications per case")->capture_default_str();
    simulate->add_option("--seed", config.grid.master_seed, "Master seed")->capture_default_str();
    simulate->add_option("--delta", config.grid.detect.delta, "Step size")->capture_default_str();
    simulate->add_option("--eta", config.grid.detect.eta, "MOE threshold")->capture_default_str();
    simulate->add_option("--level", config.grid.detect.level, "Cutoff quantile")->capture_default_str();
    simulate->add_flag("--skip-low-gamma", config.grid.skip_low_gamma_correlated,
                       "Drop gamma=2 for the mod and mix families");
    simulate->add_option("--out", config.out, "JSON table path");
    simulate->add_option("--csv", config.csv_out, "CSV table path");
    simulate->add_option("--svg", config.svg_dir, "Directory for SVG figures");
    simulate->add_flag("--serial", config.serial, "Run cases serially");

    CLI::App* report = app.add_subcommand("report", "Render SVG figures from a stored JSON result");
    report->add_option("--input", config.input, "Result JSON")->required();
    report->add_option("--svg", config.svg_dir, "Output directory")->capture_default_str();
    report->add_option("--max-rows", config.max_rows, "Rows drawn in per-row figures")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (!estimate.empty()) config.estimate = estimate == "sample" ? Estimate::Sample : Estimate::Standardize;
        config.algorithm = algorithm == "scd" ? Algorithm::SCD : Algorithm::MOE;
        config.grid.scenario = parse_scenario(scenario);
        config.grid.cov_kinds.clear();
        for (const auto& k : cov_kinds) config.grid.cov_kinds.push_back(parse_cov_kind(k));

        json result;
        if (*explain) {
            config.command = Command::Explain;
            result = cmd_explain(config);
        } else if (*detect) {
            config.command = Command::Detect;
            result = cmd_detect(config);
        } else if (*simulate) {
            config.command = Command::Simulate;
            result = cmd_simulate(config);
        } else {
            config.command = Command::Report;
            result = cmd_report(config);
        }
        if (!config.out || config.command == Command::Report) out << result.dump(2) << '\n';
        return kSuccess;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::InvalidArgument:
            case ErrorCode::InvalidLevel:
                return kUsage;
            default:
                return is_numeric_failure(e.code()) ? kNumericFailure : kDataError;
        }
    }
}

}  // namespace mdshap::cli
