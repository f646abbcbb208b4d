#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quatsylv/pinv.hpp"
#include "quatsylv/qtensor.hpp"

namespace quatsylv {

enum class Variant { single, ax_yb, two_term, quad, full, reduced, eta };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ToleranceConfig {
    double rank_rtol = 1e-12;  // pseudo-inverse rank cutoff
    double cond_rtol = 1e-9;   // consistency-condition threshold factor
};

struct FreeParams {
    enum class Policy { zero, random };
    Policy policy = Policy::zero;
    std::uint64_t seed = 0;

    static FreeParams zero() { return {}; }
    static FreeParams random(std::uint64_t seed) {
        return {Policy::random, seed};
    }
};

// One consistency-condition residual.  `id` is the schema-stable condition
// identifier; `term` spells out the exact projector product evaluated.
// Thresholds are cond_rtol * max(1, product of the factor norms).
struct ConditionResult {
    std::string id;
    std::string term;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = true;
};

struct ConsistencyReport {
    std::vector<ConditionResult> conditions;
    bool overall = true;

    void add(ConditionResult c) {
        overall = overall && c.pass;
        conditions.push_back(std::move(c));
    }
    const ConditionResult* first_failure() const {
        for (const auto& c : conditions)
            if (!c.pass) return &c;
        return nullptr;
    }
};

struct Solution {
    std::map<std::string, QTensor> unknowns;
    FreeParams policy;
    // every free parameter drawn or assembled during the solve, in use order
    std::vector<std::pair<std::string, QTensor>> free_params_used;
};

// Every intermediate tensor of the staged derivation, tagged with the stage
// that produced it.
struct DerivationCache {
    struct Entry {
        std::string stage;
        std::string name;
        QTensor value;
    };
    std::vector<Entry> entries;

    void put(std::string stage, std::string name, QTensor value) {
        entries.push_back({std::move(stage), std::move(name), std::move(value)});
    }
    const QTensor* find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return &e.value;
        return nullptr;
    }
};

struct NotEtaHermitianRHS : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Coefficient/right-hand-side bundle for one system variant.  Slot names
// follow the variant conventions ("A1", "F4", "E3", ...).
struct SystemSpec {
    Variant variant = Variant::single;
    EtaAxis eta = EtaAxis::i;
    std::map<std::string, QTensor> slots;

    const QTensor& at(const std::string& name) const;
    bool has(const std::string& name) const { return slots.count(name) != 0; }
    // Checks that every product in the variant's defining display is
    // shape-valid (and, for eta, that the right-hand sides are eta-Hermitian
    // within tol).  Throws ShapeMismatch / NotEtaHermitianRHS.
    void validate(const ToleranceConfig& tol = {}) const;
    std::vector<std::string> unknown_names() const;
    std::vector<std::string> rhs_names() const;
};

struct SolveResult {
    ConsistencyReport report;
    std::optional<Solution> solution;
    DerivationCache cache;
};

// Single two-sided equation A *_N X *_M B = E.
SolveResult solve_axb(const QTensor& a, const QTensor& b, const QTensor& e,
                      const FreeParams& fp = {}, const ToleranceConfig& tol = {});

// A *_N X + Y *_M B = E.
SolveResult solve_ax_yb(const QTensor& a, const QTensor& b, const QTensor& e,
                        const FreeParams& fp = {}, const ToleranceConfig& tol = {});

// C3 *_N X3 *_M D3 + C4 *_N X4 *_M D4 = E.
SolveResult solve_two_term(const QTensor& c3, const QTensor& d3, const QTensor& c4,
                           const QTensor& d4, const QTensor& e,
                           const FreeParams& fp = {}, const ToleranceConfig& tol = {});

// A1 X1 B1 + A2 X2 B2 + A2 (C3 X3 D3 + C4 X4 D4) B1 = E.
SolveResult solve_quad(const QTensor& a1, const QTensor& b1, const QTensor& a2,
                       const QTensor& b2, const QTensor& c3, const QTensor& d3,
                       const QTensor& c4, const QTensor& d4, const QTensor& e,
                       const FreeParams& fp = {}, const ToleranceConfig& tol = {});

// Five-equation coupled systems.
ConsistencyReport check_full(const SystemSpec& spec, const ToleranceConfig& tol = {});
SolveResult solve_full(const SystemSpec& spec, const FreeParams& fp = {},
                       const ToleranceConfig& tol = {});
ConsistencyReport check_reduced(const SystemSpec& spec, const ToleranceConfig& tol = {});
SolveResult solve_reduced(const SystemSpec& spec, const FreeParams& fp = {},
                          const ToleranceConfig& tol = {});
SolveResult solve_eta(const SystemSpec& spec, const FreeParams& fp = {},
                      const ToleranceConfig& tol = {});

// Variant dispatchers used by the CLI.
ConsistencyReport check_system(const SystemSpec& spec, const ToleranceConfig& tol = {});
SolveResult solve_system(const SystemSpec& spec, const FreeParams& fp = {},
                         const ToleranceConfig& tol = {});

// Substitutes sol into every equation of spec; one row per equation with the
// relative residual |LHS - RHS| / max(1, |RHS|).
ConsistencyReport verify(const SystemSpec& spec, const Solution& sol,
                         const ToleranceConfig& tol = {});

}  // namespace quatsylv
