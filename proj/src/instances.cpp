#include "quatsylv/instances.hpp"

#include <cmath>

#include "quatsylv/json_io.hpp"
#include "quatsylv/pinv.hpp"

namespace quatsylv {

namespace detail {
// generated at build time from data/fixtures
extern const char* kFixtureSpec33;
extern const char* kFixtureSolution33;
}  // namespace detail

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

Rng Rng::keyed(std::uint64_t seed, const std::string& name) {
    std::uint64_t s = seed ^ fnv1a(name);
    splitmix(s);
    return Rng(s);
}

std::uint64_t Rng::next_u64() { return splitmix(state_); }

double Rng::next_uniform() {
    // 53 uniform bits in (0, 1]
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::next_normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

Quaternion Rng::next_quaternion() {
    const double w = next_normal();
    const double x = next_normal();
    const double y = next_normal();
    const double z = next_normal();
    return {w, x, y, z};
}

QTensor random_tensor(Rng& rng, const Shape& shape) {
    QTensor t(shape);
    const std::int64_t m = t.total_rows();
    const std::int64_t n = t.total_cols();
    for (std::int64_t r = 0; r < m; ++r)
        for (std::int64_t c = 0; c < n; ++c) t.at(r, c) = rng.next_quaternion();
    return t;
}

namespace {

// Zero the trailing singular values of the flattening, keeping `keep`
// quaternionic singular values.
QTensor rank_reduced(const QTensor& t, int keep) {
    const QuatMatrix m = flatten(t);
    const ComplexMatrix chi = complex_adjoint(m);
    Eigen::JacobiSVD<ComplexMatrix> svd(chi, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd sv = svd.singularValues();
    for (Eigen::Index i = 2 * keep; i < sv.size(); ++i) sv(i) = 0.0;
    const ComplexMatrix trunc =
        svd.matrixU() * sv.asDiagonal() * svd.matrixV().adjoint();
    return unflatten(from_complex_adjoint(trunc), t.shape());
}

QTensor random_coefficient(Rng& rng, const Shape& shape) {
    QTensor t = random_tensor(rng, shape);
    if (rng.next_uniform() < 0.5) {
        const int maxrank =
            static_cast<int>(std::min(shape.total_rows(), shape.total_cols()));
        if (maxrank > 1) {
            const int keep = 1 + static_cast<int>(rng.next_u64() % (maxrank - 1));
            t = rank_reduced(t, keep);
        }
    }
    return t;
}

struct SlotSpec {
    std::vector<std::string> coefficients;
    std::vector<std::string> unknowns;
};

SlotSpec slots_for(Variant v) {
    SlotSpec s;
    switch (v) {
        case Variant::single:
        case Variant::ax_yb:
            s.coefficients = {"A", "B"};
            break;
        case Variant::two_term:
            s.coefficients = {"C3", "D3", "C4", "D4"};
            break;
        case Variant::quad:
            s.coefficients = {"A1", "B1", "A2", "B2", "C3", "D3", "C4", "D4"};
            break;
        case Variant::full:
            for (int i = 1; i <= 3; ++i)
                for (const char* n : {"A", "B", "C", "D", "F", "G", "H", "J"})
                    s.coefficients.push_back(n + std::to_string(i));
            for (const char* n : {"F4", "G4", "H4", "J4"}) s.coefficients.push_back(n);
            break;
        case Variant::reduced:
            for (int i = 1; i <= 4; ++i)
                for (const char* n : {"F", "G", "H", "J"})
                    s.coefficients.push_back(n + std::to_string(i));
            break;
        case Variant::eta:
            for (int i = 1; i <= 4; ++i)
                for (const char* n : {"F", "H"})
                    s.coefficients.push_back(n + std::to_string(i));
            break;
    }
    return s;
}

QTensor forward_lhs(const SystemSpec& spec, const std::map<std::string, QTensor>& u,
                    const std::string& rhs_name);

}  // namespace

std::pair<SystemSpec, Solution> load_fixture(const std::string& id) {
    auto [spec_text, sol_text] = fixture_files(id);
    SystemSpec spec = spec_from_json(Json::parse(spec_text));
    Solution sol = solution_from_json(Json::parse(sol_text));
    return {std::move(spec), std::move(sol)};
}

std::pair<std::string, std::string> fixture_files(const std::string& id) {
    if (id == "example-3.3")
        return {detail::kFixtureSpec33, detail::kFixtureSolution33};
    throw UnknownFixture("unknown fixture id: " + id);
}

std::pair<SystemSpec, Solution> generate_consistent(Variant variant,
                                                    const ShapeProfile& profile,
                                                    std::uint64_t seed, EtaAxis eta) {
    const Dims modes(static_cast<std::size_t>(profile.order), profile.mode_dim);
    const Shape square(modes, modes);
    SystemSpec spec;
    spec.variant = variant;
    spec.eta = eta;

    const SlotSpec sl = slots_for(variant);
    for (const auto& name : sl.coefficients) {
        Rng rng = Rng::keyed(seed, "coeff." + name);
        spec.slots.emplace(name, random_coefficient(rng, square));
    }

    Solution truth;
    truth.policy = FreeParams::zero();
    for (const auto& name : spec.unknown_names()) {
        Rng rng = Rng::keyed(seed, "truth." + name);
        QTensor z = random_tensor(rng, square);
        if (variant == Variant::eta)
            z = (z + eta_conj_transpose(z, eta)).scaled(0.5);
        truth.unknowns.emplace(name, std::move(z));
    }
    for (const auto& rhs : spec.rhs_names())
        spec.slots.emplace(rhs, forward_lhs(spec, truth.unknowns, rhs));
    return {std::move(spec), std::move(truth)};
}

namespace {

QTensor forward_lhs(const SystemSpec& spec, const std::map<std::string, QTensor>& u,
                    const std::string& rhs_name) {
    // evaluate the defining display of the variant for one right-hand side
    auto P = [&](const std::string& a, const std::string& x, const std::string& b) {
        return einstein_product(einstein_product(spec.at(a), u.at(x)), spec.at(b));
    };
    auto Pe = [&](const std::string& a, const std::string& x, const std::string& b,
                  EtaAxis eta) {
        return einstein_product(einstein_product(spec.at(a), u.at(x)),
                                eta_conj_transpose(spec.at(b), eta));
    };
    switch (spec.variant) {
        case Variant::single:
            return P("A", "X", "B");
        case Variant::ax_yb:
            return einstein_product(spec.at("A"), u.at("X")) +
                   einstein_product(u.at("Y"), spec.at("B"));
        case Variant::two_term:
            return P("C3", "X3", "D3") + P("C4", "X4", "D4");
        case Variant::quad: {
            QTensor inner = P("C3", "X3", "D3") + P("C4", "X4", "D4");
            return P("A1", "X1", "B1") + P("A2", "X2", "B2") +
                   einstein_product(einstein_product(spec.at("A2"), inner), spec.at("B1"));
        }
        case Variant::full: {
            if (rhs_name == "E4") return P("F4", "Z1", "G4");
            if (rhs_name == "E5") return P("H4", "Z4", "J4");
            const std::string s(1, rhs_name[1]);
            const int i = rhs_name[1] - '0';
            QTensor inner = P("F" + s, "Z" + s, "G" + s) +
                            P("H" + s, "Z" + std::to_string(i + 1), "J" + s);
            return P("A" + s, "X" + s, "B" + s) + P("C" + s, "Y" + s, "D" + s) +
                   einstein_product(einstein_product(spec.at("C" + s), inner),
                                    spec.at("B" + s));
        }
        case Variant::reduced: {
            if (rhs_name == "E4") return P("F4", "Z1", "G4");
            if (rhs_name == "E5") return P("H4", "Z4", "J4");
            const std::string s(1, rhs_name[1]);
            const int i = rhs_name[1] - '0';
            return P("F" + s, "Z" + s, "G" + s) +
                   P("H" + s, "Z" + std::to_string(i + 1), "J" + s);
        }
        case Variant::eta: {
            if (rhs_name == "E4") return Pe("F4", "Z1", "F4", spec.eta);
            if (rhs_name == "E5") return Pe("H4", "Z4", "H4", spec.eta);
            const std::string s(1, rhs_name[1]);
            const int i = rhs_name[1] - '0';
            return Pe("F" + s, "Z" + s, "F" + s, spec.eta) +
                   Pe("H" + s, "Z" + std::to_string(i + 1), "H" + s, spec.eta);
        }
    }
    throw std::logic_error("forward_lhs");
}

// Left/right factors whose projectors sandwich the perturbation so that one
// consistency condition is violated by construction.
std::pair<const QTensor*, const QTensor*> perturb_factors(const SystemSpec& spec,
                                                          const std::string& rhs) {
    switch (spec.variant) {
        case Variant::single:
            return {&spec.at("A"), nullptr};
        case Variant::ax_yb:
            return {&spec.at("A"), &spec.at("B")};
        case Variant::two_term:
            return {&spec.at("C3"), &spec.at("D4")};
        case Variant::quad:
            return {&spec.at("A2"), &spec.at("B1")};
        case Variant::full:
            if (rhs == "E4") return {&spec.at("F4"), nullptr};
            if (rhs == "E5") return {&spec.at("H4"), nullptr};
            return {&spec.at("C" + std::string(1, rhs[1])),
                    &spec.at("B" + std::string(1, rhs[1]))};
        case Variant::reduced:
        case Variant::eta:
            if (rhs == "E4") return {&spec.at("F4"), nullptr};
            if (rhs == "E5") return {&spec.at("H4"), nullptr};
            return {&spec.at("F" + std::string(1, rhs[1])),
                    &spec.at("J" + std::string(1, rhs[1]))};
    }
    throw std::logic_error("perturb_factors");
}

}  // namespace

SystemSpec perturb_inconsistent(const SystemSpec& spec, const std::string& which_rhs,
                                std::uint64_t seed) {
    std::string rhs = which_rhs;
    if (rhs.empty()) rhs = spec.rhs_names().size() == 1 ? "E" : "E4";
    const QTensor& e = spec.at(rhs);
    auto [lf, rf] = perturb_factors(spec, rhs);
    if (spec.variant == Variant::eta && rhs != "E4" && rhs != "E5")
        rf = nullptr;  // J slots do not exist; the R-side alone suffices

    const RankTolerance rt;
    const QTensor lp = right_projector(*lf, rt);
    QTensor delta(e.shape());
    Rng rng = Rng::keyed(seed, "perturb." + rhs);
    for (int attempt = 0; attempt < 16; ++attempt) {
        QTensor p = random_tensor(rng, e.shape());
        delta = einstein_product(lp, p);
        if (rf) delta = einstein_product(delta, left_projector(*rf, rt));
        if (spec.variant == Variant::eta)
            delta = (delta + eta_conj_transpose(delta, spec.eta)).scaled(0.5);
        const double n = delta.fro_norm();
        if (n > 1e-6 * std::max(1.0, p.fro_norm())) {
            delta = delta.scaled(1.0 / n);
            // for the symmetrized case the sandwich is no longer exact
            if (spec.variant == Variant::eta) {
                QTensor chk = einstein_product(lp, delta);
                if (chk.fro_norm() < 0.5) continue;
            }
            SystemSpec out = spec;
            out.slots.at(rhs) = e + delta;
            return out;
        }
    }
    throw NoNullSpace("perturb_inconsistent: " + rhs +
                      "'s coefficients leave no null space to perturb into");
}

}  // namespace quatsylv
