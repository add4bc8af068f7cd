#pragma once

// Crossover scheduling between the classical branch-and-reduce solver and
// the ν-search pipeline, plus the analytic layer behind the threshold.
//
// Space is modeled as G(s, n) = A·s·ln(n/s) + B·s + a·ln n converted bits.
// Writing λ = s/n, G = n·F(λ) + a·ln n with F(λ) = A·λ·ln(1/λ) + B·λ, which
// increases on (0, λ̃] for λ̃ = e^{B/A - 1}. A subinstance of size s fits
// in c·n bits whenever s ≤ n·F⁻¹(c - a·ln n / n).

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hfchc/eppstein.hpp"
#include "hfchc/graph.hpp"
#include "hfchc/qsim.hpp"

namespace hfchc::hybrid {

// x in [-1/e, 0); returns w <= -1 with w·e^w = x.
double lambert_w_m1(double x);

struct SpaceModel {
    double A = 0;
    double B = 0;
    double a = 0;

    double G(double s, double n) const;
    double F(double lambda) const;
    double F_prime(double lambda) const;
    // +inf when A = 0: F is then linear and never turns over.
    double lambda_tilde() const;
    double F_max() const;
};

// Throws DomainError unless 0 < c < F(λ̃).
double f_inverse(double c, const SpaceModel& model);

struct HybridConfig {
    double c = 0.25;
    double gamma = 1.0 / 3;
    double gamma_q = 0.25;

    uint64_t budget(uint32_t n) const;
};
void validate(const HybridConfig& cfg, const SpaceModel& model);

// ⌊n·F⁻¹(c - a·ln n / n)⌋, capped at n. Throws TooSmallBudget when c·n <= a·ln n.
int64_t threshold(const HybridConfig& cfg, const SpaceModel& model, uint32_t n);
double speedup_exponent(const HybridConfig& cfg, const SpaceModel& model);
// γ - c / log2 n: the exponent when the budget only buys c qubits per
// doubling of n, which never moves the constant.
double negative_model_exponent(double c, uint32_t n, double gamma = 1.0 / 3);

// Branches of one case as (size decrease, multiplicity).
struct BranchCase {
    std::vector<std::pair<uint32_t, uint64_t>> branches;
};
struct FrameworkSpec {
    std::vector<BranchCase> cases;

    // Columns are cases, rows are branches; a zero entry marks a missing branch.
    static FrameworkSpec from_matrix(const std::vector<std::vector<uint32_t>>& rows);
};
// max over cases of the root x of Σ mult·2^{-C·x} = 1.
double recurrence_exponent(const FrameworkSpec& spec);
FrameworkSpec eppstein_framework();
// Δ-parameterized Promise-Ball-SAT shape: two unit branches, or 9Δ²·2^Δ
// branches of decrease Δ.
FrameworkSpec ball_sat_framework(uint32_t delta);

// ---------------------------------------------------------------- calibration

struct SpacePoint {
    int64_t s;
    uint32_t n;
    uint64_t bits;
};

// Runs the qsim space accounting on every reduced, non-terminal node within
// `depth` branch levels of each instance's root.
std::vector<SpacePoint> measure_space(const std::vector<FchcInstance>& insts, uint32_t depth);

struct CalibrationReport {
    SpaceModel raw;      // non-negative least squares
    double inflation;    // scale applied so the model covers every point
    double rms_residual;  // of the raw fit, in bits
    double r_squared;
    double coverage;      // fraction of points with G(s, n) >= bits after inflation
    size_t points;
};

// Throws InsufficientData with fewer than three points or a rank-deficient
// design.
SpaceModel calibrate(const std::vector<SpacePoint>& points, CalibrationReport* report = nullptr);
SpaceModel calibrate(const std::vector<FchcInstance>& insts, CalibrationReport* report = nullptr);

// ---------------------------------------------------------------- scheduler

struct Handoff {
    uint32_t depth;
    int64_t s;
    uint32_t n;
    uint64_t space_bits;
    bool verdict;
    uint32_t r;
    uint32_t t;
    uint64_t grover_estimate;
    // ⌈(π/4)·2^{⌈s/2⌉/2}⌉: enough iterations to find any accepting path, so
    // the search commits to this many whatever the outcome.
    uint64_t iteration_budget;
};

struct HybridStats {
    int64_t s_root = 0;
    int64_t s_tilde = -1;  // -1: no subinstance fits
    uint64_t budget = 0;
    bool budget_too_small = false;
    uint64_t classical_nodes = 0;  // nodes visited by the classical recursion
    uint64_t refused = 0;  // s <= s̃ yet measured space above the budget
    uint32_t max_depth = 0;
    std::vector<Handoff> handoffs;

    // Classical nodes plus the iteration budget of every handoff.
    double modeled_cost() const;
    std::optional<uint32_t> handoff_depth() const;
};

struct HybridVerdict {
    bool result = false;
    HybridStats stats;
};

struct HybridOptions {
    // Throw TooSmallBudget instead of running classically when c·n cannot
    // cover the model's log term.
    bool strict_budget = false;
    qsim::SearchOptions search{};
};

HybridVerdict hybrid_solve(const FchcInstance& inst, const HybridConfig& cfg, const SpaceModel& model,
                           const HybridOptions& opt = {});

// ---------------------------------------------------------------- tables

struct SpeedupRow {
    double c;
    double lambda;  // F⁻¹(c)
    double f;
};
std::vector<SpeedupRow> speedup_table(const SpaceModel& model, double c_lo, double c_hi, uint32_t count,
                                      double gamma = 1.0 / 3, double gamma_q = 0.25);

struct ThresholdRow {
    uint32_t n;
    std::optional<int64_t> s_tilde;  // absent when the budget is too small
    double linear_part;              // n·F⁻¹(c)
};
std::vector<ThresholdRow> threshold_table(const HybridConfig& cfg, const SpaceModel& model,
                                          const std::vector<uint32_t>& ns);

struct NegativeRow {
    uint32_t n;
    double exponent;
    double gap;    // c / log2 n
    double f_c;    // the constant gap of the positive model, for contrast
};
std::vector<NegativeRow> negative_table(const HybridConfig& cfg, const SpaceModel& model,
                                        const std::vector<uint32_t>& ns);

}  // namespace hfchc::hybrid
