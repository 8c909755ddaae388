// lipfree: norms of molecules and the verification suites.
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "lipfree/freecore.hpp"
#include "lipfree/io.hpp"
#include "lipfree/qmetric.hpp"
#include "lipfree/verify.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;

int cmd_norm(const std::string& space_path, const std::string& molecule_path, const std::string& method) {
    auto j = lipfree::read_json_file(molecule_path);
    std::string base_dir = std::filesystem::path(molecule_path).parent_path().string();
    if (!space_path.empty()) {
        j["space"] = std::filesystem::absolute(space_path).string();
        base_dir.clear();
    }
    const auto mu = lipfree::molecule_from_json(j, base_dir);
    lipfree::require_valid(mu.space(), "space");
    const auto cert = lipfree::norm(mu, lipfree::parse_norm_method(method));
    std::cout << lipfree::certificate_to_json(cert).dump(2) << "\n";
    return 0;
}

int cmd_verify(const lipfree::VerifyConfig& config) {
    lipfree::set_worker_count(config.workers);
    const auto result = lipfree::run_suite(config);
    if (!config.out.empty()) lipfree::write_reports(result, config.out);
    for (const auto& c : result.criteria) {
        std::size_t failed = 0;
        for (const auto& r : c.records) failed += r.pass ? 0 : 1;
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << " " << c.title << " (" << c.records.size() - failed << "/"
                  << c.records.size() << ")\n";
        for (const auto& r : c.records)
            if (!r.pass)
                std::cerr << "failed: criterion " << c.id << " " << r.instance << " p=" << lipfree::format_double(r.p)
                          << " bound=" << lipfree::format_double(r.bound)
                          << " measured=" << lipfree::format_double(r.measured)
                          << " margin=" << lipfree::format_double(r.margin) << "\n";
    }
    std::cout << "suite " << result.suite << ": " << result.passed_rows() << " passed, " << result.failed_rows()
              << " failed\n";
    return result.pass() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Norms and verification in Lipschitz free p-spaces"};
    app.require_subcommand(1);

    std::string space_path, molecule_path, method = "auto";
    auto* norm = app.add_subcommand("norm", "Print the norm certificate of a molecule as JSON");
    norm->add_option("--space", space_path, "Space JSON (overrides the molecule's own space)")->check(CLI::ExistingFile);
    norm->add_option("--molecule", molecule_path, "Molecule JSON")->required()->check(CLI::ExistingFile);
    norm->add_option("--method", method, "auto, lp, enumerate, dp or bounds_only");

    std::string config_path, suite, out;
    std::vector<double> ps;
    std::size_t max_points = 0;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    double tolerance = 0.0;
    auto* verify = app.add_subcommand("verify", "Run verification suites");
    verify->add_option("--config", config_path, "Flat key = value file; flags win")->check(CLI::ExistingFile);
    auto* o_suite = verify->add_option("--suite", suite, "qmetric, norms, complement, embed, bases or all");
    auto* o_p = verify->add_option("--p", ps, "Exponents (comma separated)")->delimiter(',');
    auto* o_max = verify->add_option("--max-points", max_points, "Cap on random space sizes");
    auto* o_seed = verify->add_option("--seed", seed, "RNG seed (default 42)");
    auto* o_out = verify->add_option("--out", out, "Report directory");
    auto* o_workers = verify->add_option("--workers", workers, "Worker threads (default: hardware)");
    auto* o_tol = verify->add_option("--tolerance", tolerance, "Replace every pinned tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (norm->parsed()) return cmd_norm(space_path, molecule_path, method);

        lipfree::VerifyConfig config;
        if (!config_path.empty()) config = lipfree::read_config_file(config_path);
        if (o_suite->count()) config.suite = suite;
        if (o_p->count()) config.ps = ps;
        if (o_max->count()) config.max_points = max_points;
        if (o_seed->count()) config.seed = seed;
        if (o_out->count()) config.out = out;
        if (o_workers->count()) config.workers = workers;
        if (o_tol->count()) config.tolerance = tolerance;
        if (config.workers == 0) config.workers = std::max(1u, std::thread::hardware_concurrency());
        for (double p : config.ps)
            if (!(p > 0.0 && p <= 1.0)) throw lipfree::StructuralError("p must lie in (0, 1]");
        (void)lipfree::suite_criteria(config.suite);
        return cmd_verify(config);
    } catch (const lipfree::ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kExitResource;
    } catch (const lipfree::StructuralError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitInvalid;
    }
}
