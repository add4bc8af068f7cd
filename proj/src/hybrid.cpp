#include "hfchc/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <boost/math/special_functions/lambert_w.hpp>

#include "hfchc/errors.hpp"

namespace hfchc::hybrid {

double lambert_w_m1(double x) {
    const double branch = -std::exp(-1.0);
    if (!(x >= branch && x < 0)) throw DomainError("lambert_w_m1: argument outside [-1/e, 0)");
    if (x == branch) return -1.0;
    double w = boost::math::lambert_wm1(x);
    // One Halley step against the residual; Boost is already close, this
    // tightens the last ulp or two near the branch point.
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double fp = ew * (w + 1);
    if (fp != 0) {
        const double step = f / (fp - (w + 2) * f / (2 * (w + 1)));
        const double polished = w - step;
        if (std::isfinite(polished) && polished <= -1) {
            const double before = std::abs(f), after = std::abs(polished * std::exp(polished) - x);
            if (after < before) w = polished;
        }
    }
    return w;
}

// ---------------------------------------------------------------- model

double SpaceModel::F(double lambda) const {
    if (lambda <= 0) return 0;
    return A * lambda * std::log(1 / lambda) + B * lambda;
}

double SpaceModel::F_prime(double lambda) const { return A * std::log(1 / lambda) - A + B; }

double SpaceModel::G(double s, double n) const {
    const double log_term = s > 0 ? A * s * std::log(n / s) : 0.0;
    return log_term + B * s + a * std::log(n);
}

double SpaceModel::lambda_tilde() const {
    if (A == 0) return std::numeric_limits<double>::infinity();
    return std::exp(B / A - 1);
}

double SpaceModel::F_max() const {
    if (A == 0) return std::numeric_limits<double>::infinity();
    return A * lambda_tilde();
}

namespace {

void validate_model(const SpaceModel& m) {
    if (!(m.A >= 0 && m.B >= 0 && m.a >= 0)) throw DomainError("space model coefficients must be non-negative");
    if (m.A == 0 && m.B == 0) throw DomainError("space model needs A > 0 or B > 0");
}

}  // namespace

double f_inverse(double c, const SpaceModel& model) {
    validate_model(model);
    if (!(c > 0 && c < model.F_max())) throw DomainError("f_inverse: c outside (0, F(lambda~))");
    if (model.A == 0) return c / model.B;
    const double x = -c * std::exp(-model.B / model.A) / model.A;
    if (x == 0) throw DomainError("f_inverse: B/A too large to evaluate");
    return -c / (model.A * lambert_w_m1(std::max(x, -std::exp(-1.0))));
}

uint64_t HybridConfig::budget(uint32_t n) const { return uint64_t(std::floor(c * double(n))); }

void validate(const HybridConfig& cfg, const SpaceModel& model) {
    validate_model(model);
    if (!(cfg.c > 0 && cfg.c < model.F_max())) throw DomainError("c must lie in (0, F(lambda~))");
    if (!(cfg.gamma_q < cfg.gamma)) throw DomainError("gamma_q must be below gamma");
}

int64_t threshold(const HybridConfig& cfg, const SpaceModel& model, uint32_t n) {
    validate(cfg, model);
    if (n < 2) throw DomainError("threshold: n must be at least 2");
    const double nn = double(n);
    if (cfg.c * nn <= model.a * std::log(nn))
        throw TooSmallBudget("c·n = " + std::to_string(cfg.c * nn) + " does not exceed a·ln n");
    const double lambda = f_inverse(cfg.c - model.a * std::log(nn) / nn, model);
    // No instance on n vertices has s > n, so larger thresholds say nothing more.
    auto s = int64_t(std::floor(std::min(nn * lambda, nn)));
    // Rounding in F⁻¹ can put n·λ a hair above an integer that no longer fits.
    while (s > 0 && model.G(double(s), nn) > cfg.c * nn * (1 + 1e-12)) --s;
    return s;
}

double speedup_exponent(const HybridConfig& cfg, const SpaceModel& model) {
    validate(cfg, model);
    return (cfg.gamma - cfg.gamma_q) * f_inverse(cfg.c, model);
}

double negative_model_exponent(double c, uint32_t n, double gamma) {
    if (n < 2) throw DomainError("negative_model_exponent: n must be at least 2");
    return gamma - c / std::log2(double(n));
}

// ---------------------------------------------------------------- recurrences

FrameworkSpec FrameworkSpec::from_matrix(const std::vector<std::vector<uint32_t>>& rows) {
    FrameworkSpec spec;
    if (rows.empty()) return spec;
    const size_t k = rows.front().size();
    spec.cases.resize(k);
    for (const auto& row : rows) {
        if (row.size() != k) throw std::invalid_argument("FrameworkSpec: ragged branch matrix");
        for (size_t j = 0; j < k; ++j) {
            if (row[j] == 0) continue;
            auto& br = spec.cases[j].branches;
            auto it = std::find_if(br.begin(), br.end(), [&](const auto& p) { return p.first == row[j]; });
            if (it == br.end()) br.emplace_back(row[j], 1);
            else ++it->second;
        }
    }
    return spec;
}

double recurrence_exponent(const FrameworkSpec& spec) {
    double best = 0;
    for (const BranchCase& c : spec.cases) {
        // g is strictly decreasing in x, with g(0) equal to the branch count.
        auto g = [&](double x) {
            double sum = 0;
            for (auto [d, mult] : c.branches) sum += double(mult) * std::exp2(-double(d) * x);
            return sum;
        };
        if (g(0) <= 1) continue;
        double lo = 0, hi = 1;
        while (g(hi) > 1) hi *= 2;
        while (hi - lo > 1e-14 * std::max(1.0, hi)) {
            const double mid = (lo + hi) / 2;
            (g(mid) > 1 ? lo : hi) = mid;
        }
        best = std::max(best, (lo + hi) / 2);
    }
    return best;
}

FrameworkSpec eppstein_framework() { return FrameworkSpec::from_matrix({{3, 2, 5}, {3, 5, 2}}); }

FrameworkSpec ball_sat_framework(uint32_t delta) {
    if (delta == 0 || delta > 40) throw DomainError("ball_sat_framework: delta must lie in [1, 40]");
    const uint64_t t = 3 * uint64_t(delta);
    FrameworkSpec spec;
    spec.cases.push_back({{{1, 2}}});
    spec.cases.push_back({{{delta, t * t << delta}}});
    return spec;
}

// ---------------------------------------------------------------- calibration

namespace {

void measure_node(const FchcInstance& node, uint32_t depth, std::vector<SpacePoint>& out) {
    if (terminal_check(node).verdict) return;
    const qsim::Instance q(node);
    if (q.r() > 0) out.push_back({q.s(), q.n(), qsim::qubit_accounting(q).total_bits});
    if (depth == 0) return;
    const Selection sel = edge_select(node);
    FchcInstance c1 = node, c2 = node;
    c1.force(sel.edge);
    c2.remove(sel.edge);
    triv_red(c1);
    triv_red(c2);
    measure_node(c1, depth - 1, out);
    measure_node(c2, depth - 1, out);
}

}  // namespace

std::vector<SpacePoint> measure_space(const std::vector<FchcInstance>& insts, uint32_t depth) {
    std::vector<std::vector<SpacePoint>> per(insts.size());
    const long count = long(insts.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
        const FchcInstance& inst = insts[size_t(k)];
        if (inst.n() < 3) continue;
        auto root = drop_parallel_duplicates(inst);
        if (!root) continue;
        triv_red(*root);
        measure_node(*root, depth, per[size_t(k)]);
    }
    std::vector<SpacePoint> out;
    for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

SpaceModel calibrate(const std::vector<SpacePoint>& points, CalibrationReport* report) {
    const Eigen::Index rows = Eigen::Index(points.size());
    if (rows < 3) throw InsufficientData("calibrate: need at least three points");
    Eigen::MatrixXd X(rows, 3);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const SpacePoint& p = points[size_t(i)];
        const double s = double(p.s), n = double(p.n);
        X(i, 0) = s > 0 ? s * std::log(n / s) : 0.0;
        X(i, 1) = s;
        X(i, 2) = std::log(n);
        y(i) = double(p.bits);
    }
    if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(X).rank() < 3)
        throw InsufficientData("calibrate: (s, n) grid does not separate the three terms");

    // Non-negative least squares with three unknowns: the optimum is the
    // unconstrained fit on some support set, so try all seven.
    Eigen::Vector3d best = Eigen::Vector3d::Zero();
    double best_rss = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < 8; ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < 3; ++j)
            if (mask >> j & 1) cols.push_back(j);
        Eigen::MatrixXd Xs(rows, Eigen::Index(cols.size()));
        for (size_t j = 0; j < cols.size(); ++j) Xs.col(Eigen::Index(j)) = X.col(cols[j]);
        const Eigen::VectorXd b = Xs.colPivHouseholderQr().solve(y);
        if ((b.array() < 0).any()) continue;
        Eigen::Vector3d full = Eigen::Vector3d::Zero();
        for (size_t j = 0; j < cols.size(); ++j) full(cols[j]) = b(Eigen::Index(j));
        const double rss = (X * full - y).squaredNorm();
        if (rss < best_rss) {
            best_rss = rss;
            best = full;
        }
    }
    const SpaceModel raw{best(0), best(1), best(2)};
    if (raw.A <= 0 && raw.B <= 0) throw InsufficientData("calibrate: fit has no size-dependent term");

    double inflation = 1;
    for (const SpacePoint& p : points) {
        const double g = raw.G(double(p.s), double(p.n));
        if (g <= 0) throw InsufficientData("calibrate: model vanishes at a measured point");
        inflation = std::max(inflation, double(p.bits) / g);
    }
    const SpaceModel model{raw.A * inflation, raw.B * inflation, raw.a * inflation};

    if (report) {
        const double mean = y.mean();
        const double tss = (y.array() - mean).square().sum();
        size_t covered = 0;
        for (const SpacePoint& p : points)
            if (model.G(double(p.s), double(p.n)) >= double(p.bits) * (1 - 1e-12)) ++covered;
        *report = {raw,
                   inflation,
                   std::sqrt(best_rss / double(rows)),
                   tss > 0 ? 1 - best_rss / tss : 1.0,
                   double(covered) / double(points.size()),
                   points.size()};
    }
    return model;
}

SpaceModel calibrate(const std::vector<FchcInstance>& insts, CalibrationReport* report) {
    return calibrate(measure_space(insts, 2), report);
}

// ---------------------------------------------------------------- scheduler

double HybridStats::modeled_cost() const {
    double cost = double(classical_nodes);
    for (const Handoff& h : handoffs) cost += double(h.iteration_budget);
    return cost;
}

std::optional<uint32_t> HybridStats::handoff_depth() const {
    if (handoffs.empty()) return std::nullopt;
    uint32_t d = handoffs.front().depth;
    for (const Handoff& h : handoffs) d = std::min(d, h.depth);
    return d;
}

namespace {

class Scheduler {
public:
    Scheduler(const HybridOptions& opt, HybridStats& st) : opt_(opt), st_(st) {}

    bool rec(const FchcInstance& node, uint32_t depth) {
        ++st_.classical_nodes;
        st_.max_depth = std::max(st_.max_depth, depth);
        if (auto v = terminal_check(node).verdict) return *v;
        if (size_metric(node) <= st_.s_tilde)
            if (auto v = hand_off(node, depth)) return *v;
        const Selection sel = edge_select(node);
        FchcInstance c1 = node, c2 = node;
        c1.force(sel.edge);
        c2.remove(sel.edge);
        triv_red(c1);
        triv_red(c2);
        return rec(c1, depth + 1) || rec(c2, depth + 1);
    }

private:
    // Returns nullopt when the subinstance stays classical.
    std::optional<bool> hand_off(const FchcInstance& node, uint32_t depth) {
        const qsim::Instance q(node);
        if (q.r() == 0) return std::nullopt;
        const uint64_t bits = qsim::qubit_accounting(q).total_bits;
        if (bits > st_.budget) {
            ++st_.refused;
            return std::nullopt;
        }
        const qsim::SearchReport rep = qsim::enumerate_search(q, opt_.search);
        const double budget = std::ceil(std::numbers::pi / 4 * std::exp2(double((q.s() + 1) / 2) / 2));
        st_.handoffs.push_back({depth, q.s(), q.n(), bits, rep.found, rep.r, rep.t_measured, rep.grover_estimate,
                                uint64_t(budget)});
        return rep.found;
    }

    const HybridOptions& opt_;
    HybridStats& st_;
};

}  // namespace

HybridVerdict hybrid_solve(const FchcInstance& inst, const HybridConfig& cfg, const SpaceModel& model,
                           const HybridOptions& opt) {
    validate(cfg, model);
    HybridVerdict out;
    HybridStats& st = out.stats;
    st.budget = cfg.budget(inst.n());
    if (inst.n() < 3) {
        out.result = brute_force_fchc(inst);
        st.budget_too_small = true;
        return out;
    }
    try {
        st.s_tilde = threshold(cfg, model, inst.n());
    } catch (const TooSmallBudget&) {
        if (opt.strict_budget) throw;
        st.budget_too_small = true;
        st.s_tilde = -1;
    }
    auto root = drop_parallel_duplicates(inst);
    if (!root) return out;
    triv_red(*root);
    st.s_root = size_metric(*root);
    Scheduler sched(opt, st);
    out.result = sched.rec(*root, 0);
    return out;
}

// ---------------------------------------------------------------- tables

std::vector<SpeedupRow> speedup_table(const SpaceModel& model, double c_lo, double c_hi, uint32_t count,
                                      double gamma, double gamma_q) {
    if (count == 0 || !(c_lo <= c_hi)) throw DomainError("speedup_table: empty or reversed grid");
    std::vector<SpeedupRow> rows;
    for (uint32_t k = 0; k < count; ++k) {
        const double c = count == 1 ? c_lo : c_lo + (c_hi - c_lo) * double(k) / double(count - 1);
        const HybridConfig cfg{c, gamma, gamma_q};
        rows.push_back({c, f_inverse(c, model), speedup_exponent(cfg, model)});
    }
    return rows;
}

std::vector<ThresholdRow> threshold_table(const HybridConfig& cfg, const SpaceModel& model,
                                          const std::vector<uint32_t>& ns) {
    validate(cfg, model);
    const double lambda = f_inverse(cfg.c, model);
    std::vector<ThresholdRow> rows;
    for (uint32_t n : ns) {
        ThresholdRow row{n, std::nullopt, double(n) * lambda};
        try {
            row.s_tilde = threshold(cfg, model, n);
        } catch (const TooSmallBudget&) {
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<NegativeRow> negative_table(const HybridConfig& cfg, const SpaceModel& model,
                                        const std::vector<uint32_t>& ns) {
    const double f = speedup_exponent(cfg, model);
    std::vector<NegativeRow> rows;
    for (uint32_t n : ns) {
        const double e = negative_model_exponent(cfg.c, n, cfg.gamma);
        rows.push_back({n, e, cfg.gamma - e, f});
    }
    return rows;
}

}  // namespace hfchc::hybrid
