#include "mdshap/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "mdshap/batch.hpp"
#include "mdshap/error.hpp"

namespace mdshap {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream tags for the pieces of one case.
constexpr std::uint64_t kStreamCovariance = 1;
constexpr std::uint64_t kStreamClean = 2;
constexpr std::uint64_t kStreamContamination = 3;

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count, Rng& rng) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(count, population));
    std::sort(idx.begin(), idx.end());
    return idx;
}

void check_fraction(double value, const char* name) {
    if (!(value > 0.0 && value < 1.0))
        throw Error(ErrorCode::InvalidArgument, std::string(name) + " must lie in (0, 1)");
}

Matrix low_correlation(std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> off(-0.3, 0.3);
    const auto k = static_cast<Eigen::Index>(p);
    Matrix r = Matrix::Identity(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index l = j + 1; l < k; ++l) {
            r(j, l) = off(rng);
            r(l, j) = r(j, l);
        }
    }
    // Shift the spectrum and rescale to unit diagonal until lambda_min > 0.05.
    constexpr double floor = 0.05;
    for (int attempt = 0; attempt < 50; ++attempt) {
        const double smallest = Eigen::SelfAdjointEigenSolver<Matrix>(r, Eigen::EigenvaluesOnly).eigenvalues()(0);
        if (smallest > floor) return r;
        const double c = (floor - smallest) / (1.0 - floor) + 1e-3;
        r = (r + c * Matrix::Identity(k, k)) / (1.0 + c);
        r.diagonal().setOnes();
    }
    throw Error(ErrorCode::NotPositiveDefinite, "could not repair the random correlation matrix");
}

CellMask flags_to_mask(const std::vector<DetectRecord>& records, std::size_t p) {
    CellMask mask(records.size(), p);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].failure) throw Error(records[i].failure->code, records[i].failure->message);
        for (std::size_t j : records[i].result.flagged) mask.set(i, j);
    }
    return mask;
}

}  // namespace

std::string_view to_string(CovKind kind) noexcept {
    switch (kind) {
        case CovKind::Mod: return "mod";
        case CovKind::Mix: return "mix";
        case CovKind::Low: return "low";
    }
    return "?";
}

std::string_view to_string(Scenario scenario) noexcept {
    return scenario == Scenario::Shift ? "shift" : "structured";
}

std::string_view to_string(Detector detector) noexcept {
    return detector == Detector::SCD ? "SCD" : "MOE";
}

CovKind parse_cov_kind(std::string_view text) {
    if (text == "mod") return CovKind::Mod;
    if (text == "mix") return CovKind::Mix;
    if (text == "low") return CovKind::Low;
    throw Error(ErrorCode::InvalidArgument, "unknown covariance family '" + std::string(text) + "'");
}

Scenario parse_scenario(std::string_view text) {
    if (text == "shift") return Scenario::Shift;
    if (text == "structured") return Scenario::Structured;
    throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + std::string(text) + "'");
}

Detector parse_detector(std::string_view text) {
    if (text == "SCD" || text == "scd") return Detector::SCD;
    if (text == "MOE" || text == "moe") return Detector::MOE;
    throw Error(ErrorCode::InvalidArgument, "unknown detector '" + std::string(text) + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

std::size_t ceil_count(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction - 1e-9));
}

std::size_t CellMask::count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), char{1}));
}

std::size_t CellMask::count_row(std::size_t i) const {
    std::size_t c = 0;
    for (std::size_t j = 0; j < cols_; ++j) c += at(i, j) ? 1 : 0;
    return c;
}

std::size_t CellMask::count_col(std::size_t j) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < rows_; ++i) c += at(i, j) ? 1 : 0;
    return c;
}

Matrix make_covariance(CovKind kind, std::size_t p, std::uint64_t seed) {
    if (p < 2) throw Error(ErrorCode::InvalidArgument, "covariance families need p >= 2");
    const auto k = static_cast<Eigen::Index>(p);
    Matrix sigma = Matrix::Identity(k, k);
    switch (kind) {
        case CovKind::Mod:
            sigma.setConstant(0.5);
            sigma.diagonal().setOnes();
            break;
        case CovKind::Mix:
            for (Eigen::Index j = 0; j < k; ++j)
                for (Eigen::Index l = 0; l < k; ++l)
                    sigma(j, l) = std::pow(-0.9, static_cast<double>(std::abs(j - l)));
            break;
        case CovKind::Low:
            sigma = low_correlation(p, seed);
            break;
    }
    return sigma;
}

Matrix generate_clean(std::size_t n, const Matrix& sigma, std::uint64_t seed) {
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "generating covariance is not PD");
    const Matrix L = llt.matrixL();
    Rng rng(seed);
    std::normal_distribution<double> normal;
    Matrix z(static_cast<Eigen::Index>(n), sigma.rows());
    for (Eigen::Index i = 0; i < z.rows(); ++i)
        for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = normal(rng);
    return z * L.transpose();
}

Matrix generate_clean(const SimulationCase& sim_case, const Matrix& sigma) {
    return generate_clean(sim_case.n, sigma, derive_seed(sim_case.seed, kStreamClean));
}

Contaminated inject_shift(const Matrix& data, double eps1, double eps2, double gamma, std::uint64_t seed) {
    check_fraction(eps1, "eps1");
    check_fraction(eps2, "eps2");
    const auto n = static_cast<std::size_t>(data.rows());
    const auto p = static_cast<std::size_t>(data.cols());
    const std::size_t rows = ceil_count(n, eps2);
    const std::size_t r = std::min(ceil_count(p, eps1), p);

    const auto rk = static_cast<Eigen::Index>(r);
    Matrix block = Matrix::Constant(rk, rk, 0.7);
    block.diagonal().setOnes();
    const Matrix L = Eigen::LLT<Matrix>(block).matrixL();

    Contaminated out{data, CellMask(n, p)};
    Rng rng(seed);
    std::normal_distribution<double> normal;
    for (std::size_t i : sample_without_replacement(n, rows, rng)) {
        const auto cells = sample_without_replacement(p, r, rng);
        Vector z(rk);
        for (Eigen::Index a = 0; a < rk; ++a) z(a) = normal(rng);
        const Vector draw = Vector::Constant(rk, gamma) + L * z;
        for (std::size_t a = 0; a < r; ++a) {
            out.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cells[a])) = draw(static_cast<Eigen::Index>(a));
            out.truth.set(i, cells[a]);
        }
    }
    return out;
}

Contaminated inject_structured(const Matrix& data, const LocationScatter& model, double eps3, double gamma,
                               std::uint64_t seed) {
    check_fraction(eps3, "eps3");
    const auto n = static_cast<std::size_t>(data.rows());
    const auto p = static_cast<std::size_t>(data.cols());
    if (p != model.dim()) throw Error(ErrorCode::DimensionMismatch, "data and model dimensions differ");
    const std::size_t per_column = ceil_count(n, eps3);

    Contaminated out{data, CellMask(n, p)};
    Rng rng(seed);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i : sample_without_replacement(n, per_column, rng)) out.truth.set(i, j);
    }

    for (std::size_t i = 0; i < n; ++i) {
        IndexSet cells;
        for (std::size_t j = 0; j < p; ++j) {
            if (out.truth.at(i, j)) cells.push_back(j);
        }
        if (cells.empty()) continue;
        const auto k = static_cast<Eigen::Index>(cells.size());
        Matrix block(k, k);
        for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < k; ++b)
                block(a, b) = model.sigma()(static_cast<Eigen::Index>(cells[a]), static_cast<Eigen::Index>(cells[b]));
        Eigen::SelfAdjointEigenSolver<Matrix> eig(block);
        Vector u = eig.eigenvectors().col(0);
        Eigen::Index lead = 0;
        u.cwiseAbs().maxCoeff(&lead);
        if (u(lead) < 0.0) u = -u;
        const double md_u = std::sqrt(u.dot(Eigen::LLT<Matrix>(block).solve(u)));
        const Vector replacement = (gamma * std::sqrt(static_cast<double>(k)) / md_u) * u;
        for (Eigen::Index a = 0; a < k; ++a) {
            const auto col = static_cast<Eigen::Index>(cells[static_cast<std::size_t>(a)]);
            out.data(static_cast<Eigen::Index>(i), col) = model.mu()(col) + replacement(a);
        }
    }
    return out;
}

Metrics evaluate(const CellMask& flagged, const CellMask& truth) {
    if (flagged.rows() != truth.rows() || flagged.cols() != truth.cols())
        throw Error(ErrorCode::ShapeMismatch, "flag and truth masks differ in shape");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.rows(); ++i) {
        for (std::size_t j = 0; j < truth.cols(); ++j) {
            const bool f = flagged.at(i, j);
            const bool t = truth.at(i, j);
            tp += (f && t) ? 1 : 0;
            fp += (f && !t) ? 1 : 0;
            fn += (!f && t) ? 1 : 0;
        }
    }
    Metrics m;
    m.precision = (tp + fp == 0) ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = (tp + fn == 0) ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double sum = m.precision + m.recall;
    m.fscore = (sum == 0.0) ? 0.0 : 2.0 * m.precision * m.recall / sum;
    return m;
}

void validate(const GridConfig& config) {
    if (config.cov_kinds.empty() || config.dims.empty() || config.gammas.empty())
        throw Error(ErrorCode::InvalidArgument, "grid needs at least one covariance family, dimension and gamma");
    if (config.replications < 1) throw Error(ErrorCode::InvalidArgument, "replications must be positive");
    if (config.detectors.empty()) throw Error(ErrorCode::InvalidArgument, "grid needs at least one detector");
    for (std::size_t p : config.dims) {
        if (p < 2) throw Error(ErrorCode::InvalidArgument, "simulation dimensions must be >= 2");
    }
    if (config.scenario == Scenario::Shift) {
        if (config.eps1.empty() || config.eps2.empty())
            throw Error(ErrorCode::InvalidArgument, "shift scenario needs eps1 and eps2 values");
        for (double e : config.eps1) check_fraction(e, "eps1");
        for (double e : config.eps2) check_fraction(e, "eps2");
    } else {
        if (config.eps3.empty()) throw Error(ErrorCode::InvalidArgument, "structured scenario needs eps3 values");
        for (double e : config.eps3) check_fraction(e, "eps3");
    }
    validate(config.detect);
}

std::vector<SimulationCase> expand_cases(const GridConfig& config) {
    validate(config);
    std::vector<SimulationCase> cases;
    std::size_t index = 0;
    auto emit = [&](SimulationCase base) {
        base.case_index = index;
        for (std::size_t rep = 0; rep < config.replications; ++rep) {
            SimulationCase c = base;
            c.replication = rep;
            c.seed = derive_seed(config.master_seed, index, rep);
            cases.push_back(c);
        }
        ++index;
    };
    for (CovKind kind : config.cov_kinds) {
        for (std::size_t p : config.dims) {
            for (double gamma : config.gammas) {
                if (config.skip_low_gamma_correlated && gamma == 2.0 && kind != CovKind::Low) continue;
                SimulationCase base;
                base.p = p;
                base.n = 20 * p;
                base.cov_kind = kind;
                base.scenario = config.scenario;
                base.gamma = gamma;
                if (config.scenario == Scenario::Shift) {
                    for (double e1 : config.eps1) {
                        for (double e2 : config.eps2) {
                            base.eps1 = e1;
                            base.eps2 = e2;
                            emit(base);
                        }
                    }
                } else {
                    for (double e3 : config.eps3) {
                        base.eps3 = e3;
                        emit(base);
                    }
                }
            }
        }
    }
    return cases;
}

std::vector<MetricRow> run_case(const SimulationCase& sim_case, const GridConfig& config) {
    std::vector<MetricRow> rows;
    for (Detector d : config.detectors) {
        MetricRow row;
        row.sim_case = sim_case;
        row.detector = d;
        rows.push_back(row);
    }
    try {
        const Matrix sigma = make_covariance(sim_case.cov_kind, sim_case.p, derive_seed(sim_case.seed, kStreamCovariance));
        const LocationScatter model =
            LocationScatter::build(Vector::Zero(static_cast<Eigen::Index>(sim_case.p)), sigma);
        const Matrix clean = generate_clean(sim_case, sigma);
        const std::uint64_t contamination_seed = derive_seed(sim_case.seed, kStreamContamination);
        const Contaminated data =
            sim_case.scenario == Scenario::Shift
                ? inject_shift(clean, sim_case.eps1, sim_case.eps2, sim_case.gamma, contamination_seed)
                : inject_structured(clean, model, sim_case.eps3, sim_case.gamma, contamination_seed);

        DetectOptions options = config.detect;
        options.record_history = false;
        for (MetricRow& row : rows) {
            const Algorithm algorithm = row.detector == Detector::SCD ? Algorithm::SCD : Algorithm::MOE;
            const CellMask flagged = flags_to_mask(detect_rows_serial(model, data.data, algorithm, options), sim_case.p);
            row.metrics = evaluate(flagged, data.truth);
            row.true_cells = data.truth.count();
            row.flagged_cells = flagged.count();
        }
    } catch (const Error& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (MetricRow& row : rows) {
            row.metrics = Metrics{nan, nan, nan};
            row.error = e.what();
        }
    }
    return rows;
}

std::vector<MetricRow> run_grid(const GridConfig& config) {
    const std::vector<SimulationCase> cases = expand_cases(config);
    std::vector<std::vector<MetricRow>> per_case(cases.size());
    const auto count = static_cast<std::ptrdiff_t>(cases.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
        per_case[static_cast<std::size_t>(c)] = run_case(cases[static_cast<std::size_t>(c)], config);
    }
    std::vector<MetricRow> out;
    out.reserve(cases.size() * config.detectors.size());
    for (auto& rows : per_case) out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

std::vector<MetricRow> run_grid_serial(const GridConfig& config) {
    std::vector<MetricRow> out;
    for (const SimulationCase& c : expand_cases(config)) {
        auto rows = run_case(c, config);
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

std::vector<AggregateRow> aggregate(const std::vector<MetricRow>& rows) {
    std::map<std::pair<int, int>, AggregateRow> groups;
    for (const MetricRow& row : rows) {
        if (!row.error.empty()) continue;
        auto& g = groups[{static_cast<int>(row.sim_case.cov_kind), static_cast<int>(row.detector)}];
        if (g.count == 0) {
            g.cov_kind = row.sim_case.cov_kind;
            g.detector = row.detector;
            g.mean = Metrics{0.0, 0.0, 0.0};
        }
        ++g.count;
        g.mean.precision += row.metrics.precision;
        g.mean.recall += row.metrics.recall;
        g.mean.fscore += row.metrics.fscore;
    }
    std::vector<AggregateRow> out;
    for (auto& [key, g] : groups) {
        const auto c = static_cast<double>(g.count);
        g.mean.precision /= c;
        g.mean.recall /= c;
        g.mean.fscore /= c;
        out.push_back(g);
    }
    return out;
}

}  // namespace mdshap
