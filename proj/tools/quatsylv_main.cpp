#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "quatsylv/instances.hpp"
#include "quatsylv/json_io.hpp"
#include "quatsylv/sylvester.hpp"

using namespace quatsylv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInconsistent = 2;
constexpr int kExitInputError = 3;

struct CommonOpts {
    double tol_rank = 1e-12;
    double tol_cond = 1e-9;
    std::string free_policy = "zero";
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--tol-rank", o.tol_rank, "pseudo-inverse rank cutoff")
        ->capture_default_str();
    cmd->add_option("--tol-cond", o.tol_cond, "consistency-condition tolerance")
        ->capture_default_str();
    cmd->add_option("--free", o.free_policy,
                    "free-parameter policy: zero or random:<u64 seed>")
        ->capture_default_str();
    cmd->add_option("--format", o.format, "report format: json or text")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
}

ToleranceConfig tolerances(const CommonOpts& o) { return {o.tol_rank, o.tol_cond}; }

std::optional<std::uint64_t> env_seed() {
    if (const char* s = std::getenv("QUATSYLV_SEED")) return std::strtoull(s, nullptr, 10);
    return std::nullopt;
}

FreeParams parse_free(const std::string& s) {
    if (s == "zero") return FreeParams::zero();
    if (s.rfind("random", 0) == 0) {
        if (s.size() > 7 && s[6] == ':')
            return FreeParams::random(std::strtoull(s.c_str() + 7, nullptr, 10));
        if (auto seed = env_seed()) return FreeParams::random(*seed);
        throw std::invalid_argument(
            "--free random needs a seed (random:<seed> or QUATSYLV_SEED)");
    }
    throw std::invalid_argument("bad --free value: " + s);
}

void emit_report(const ConsistencyReport& rep, const std::string& path,
                 const std::string& format) {
    const std::string text =
        format == "text" ? report_to_text(rep) : canonical_dump(report_to_json(rep));
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_file(path, text);
}

int run_check(const std::string& in, const std::string& out, const CommonOpts& o) {
    const SystemSpec spec = spec_from_json(load_json_file(in));
    const ConsistencyReport rep = check_system(spec, tolerances(o));
    emit_report(rep, out, o.format);
    return rep.overall ? kExitOk : kExitInconsistent;
}

int run_solve(const std::string& in, const std::string& out, const std::string& report_path,
              const CommonOpts& o) {
    const SystemSpec spec = spec_from_json(load_json_file(in));
    const SolveResult res = solve_system(spec, parse_free(o.free_policy), tolerances(o));
    if (!report_path.empty()) emit_report(res.report, report_path, o.format);
    if (!res.solution) {
        // the inconsistency report takes the solution's place
        emit_report(res.report, out, o.format);
        if (const auto* f = res.report.first_failure())
            std::cerr << "inconsistent: condition " << f->id << " (" << f->term
                      << ") residual " << f->residual << " > " << f->threshold << "\n";
        return kExitInconsistent;
    }
    write_file(out, canonical_dump(solution_to_json(*res.solution)));
    return kExitOk;
}

int run_verify(const std::string& spec_path, const std::string& sol_path,
               const std::string& out, const CommonOpts& o) {
    const SystemSpec spec = spec_from_json(load_json_file(spec_path));
    const Solution sol = solution_from_json(load_json_file(sol_path));
    const ConsistencyReport rep = verify(spec, sol, tolerances(o));
    emit_report(rep, out, o.format);
    return rep.overall ? kExitOk : kExitInconsistent;
}

int run_generate(const std::string& variant, std::uint64_t seed, std::int64_t dim,
                 int order, const std::string& eta, const std::string& out,
                 const std::string& sol_out) {
    const Variant v = variant_from_string(variant);
    EtaAxis axis = EtaAxis::i;
    if (eta == "j") axis = EtaAxis::j;
    if (eta == "k") axis = EtaAxis::k;
    ShapeProfile profile;
    profile.mode_dim = dim;
    profile.order = order;
    auto [spec, truth] = generate_consistent(v, profile, seed, axis);
    write_file(out, canonical_dump(spec_to_json(spec)));
    if (!sol_out.empty()) write_file(sol_out, canonical_dump(solution_to_json(truth)));
    return kExitOk;
}

int run_example(const std::string& id, const std::string& dir, const std::string& out,
                const CommonOpts& o) {
    auto [spec_text, sol_text] = fixture_files(id);
    const std::string spec_path = dir + "/" + id + ".spec.json";
    const std::string sol_path = dir + "/" + id + ".solution.json";
    write_file(spec_path, spec_text);
    write_file(sol_path, sol_text);
    return run_verify(spec_path, sol_path, out, o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quatsylv: coupled two-sided Sylvester-like quaternion tensor systems"};
    app.require_subcommand(1);

    CommonOpts copts;
    std::string in, out, report_path, spec_path, sol_path;
    std::string variant = "full", eta = "i", fixture_id = "example-3.3", dir = ".";
    std::uint64_t seed = 1;
    std::int64_t dim = 2;
    int order = 2;

    auto* check = app.add_subcommand("check", "evaluate the consistency conditions");
    check->add_option("--in", in, "spec file")->required();
    check->add_option("--out", out, "report file (default: stdout)");
    add_common(check, copts);

    auto* solve = app.add_subcommand("solve", "solve the system");
    solve->add_option("--in", in, "spec file")->required();
    solve->add_option("--out", out, "solution file")->required();
    solve->add_option("--report", report_path, "also write the consistency report");
    add_common(solve, copts);

    auto* verify_cmd = app.add_subcommand("verify", "substitute a solution and report residuals");
    verify_cmd->add_option("--spec", spec_path, "spec file")->required();
    verify_cmd->add_option("--solution", sol_path, "solution file")->required();
    verify_cmd->add_option("--out", out, "report file (default: stdout)");
    add_common(verify_cmd, copts);

    auto* gen = app.add_subcommand("generate", "emit a forward-built consistent instance");
    gen->add_option("--variant", variant,
                    "single|ax_yb|two_term|quad|full|reduced|eta")
        ->capture_default_str();
    gen->add_option("--seed", seed, "generator seed (QUATSYLV_SEED as fallback)");
    gen->add_option("--dim", dim, "mode extent")->capture_default_str();
    gen->add_option("--order", order, "row/column mode count")->capture_default_str();
    gen->add_option("--eta", eta, "eta axis for the eta variant")
        ->check(CLI::IsMember({"i", "j", "k"}))
        ->capture_default_str();
    gen->add_option("--out", out, "spec file")->required();
    gen->add_option("--solution-out", sol_path, "ground-truth solution file");

    auto* example = app.add_subcommand("example", "materialize a bundled fixture and verify it");
    example->add_option("--id", fixture_id, "fixture id")->capture_default_str();
    example->add_option("--dir", dir, "output directory for the fixture files")
        ->capture_default_str();
    example->add_option("--out", out, "report file (default: stdout)");
    add_common(example, copts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return run_check(in, out, copts);
        if (solve->parsed()) return run_solve(in, out, report_path, copts);
        if (verify_cmd->parsed()) return run_verify(spec_path, sol_path, out, copts);
        if (gen->parsed()) {
            if (!gen->count("--seed")) {
                if (auto s = env_seed()) seed = *s;
            }
            return run_generate(variant, seed, dim, order, eta, out, sol_path);
        }
        if (example->parsed()) return run_example(fixture_id, dir, out, copts);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ShapeMismatch& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const NotEtaHermitianRHS& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const UnknownFixture& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const NoNullSpace& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
