#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "quatsylv/sylvester.hpp"

namespace quatsylv {

struct UnknownFixture : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct NoNullSpace : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mode extents used when generating instances: every tensor gets `order` row
// modes and `order` column modes, each of extent `mode_dim`.
struct ShapeProfile {
    std::int64_t mode_dim = 2;
    int order = 2;
};

// Bundled golden fixtures (currently "example-3.3").  Returns the spec and a
// known solution.  Throws UnknownFixture for unknown ids.
std::pair<SystemSpec, Solution> load_fixture(const std::string& id);
// Raw fixture file payloads (spec/solution JSON text) for materialization.
std::pair<std::string, std::string> fixture_files(const std::string& id);

// Forward oracle: draws random coefficients (rank-reduced with probability
// 1/2 so projectors are nontrivial) and ground-truth unknowns, then computes
// every right-hand side by direct evaluation.  Deterministic in seed.
std::pair<SystemSpec, Solution> generate_consistent(Variant variant,
                                                    const ShapeProfile& profile,
                                                    std::uint64_t seed,
                                                    EtaAxis eta = EtaAxis::i);

// Adds a unit-norm perturbation lying in the range of the relevant projector
// pair to the chosen right-hand side, guaranteeing a consistency-condition
// residual >= 0.5.  Throws NoNullSpace when the slot's coefficients leave no
// room (surjective factor).
SystemSpec perturb_inconsistent(const SystemSpec& spec, const std::string& which_rhs,
                                std::uint64_t seed);

// Deterministic splittable generator (used for free parameters and instance
// generation; every draw stream is keyed by a name).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    static Rng keyed(std::uint64_t seed, const std::string& name);

    std::uint64_t next_u64();
    double next_uniform();  // in (0, 1)
    double next_normal();
    Quaternion next_quaternion();

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

QTensor random_tensor(Rng& rng, const Shape& shape);

}  // namespace quatsylv
