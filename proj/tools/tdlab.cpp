// tdlab: command-line front end.
//
//   tdlab solve   --group Z4 --set 0,1,3 --kind turan [-o cert.json]
//   tdlab scan    --groups Z8,Z2xZ4 --what duality|fd1|packing [--threads 4]
//   tdlab euclid  --ball 1 --dim 2 --N 16,32 [--R 4] [--gap]
//   tdlab verify  cert.json
//   tdlab selftest [--seed 7]
//
// Exit codes: 0 success, 1 bad input (parse error, budget), 2 solver or
// verification failure.

#include "tdlab/io.hpp"
#include "tdlab/scan.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace tdlab;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitFailure = 2;

// Raised for results that are computed but do not check out.
struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string output;
    double tolerance = kCertificateTolerance;
    unsigned threads = 0;
    std::uint64_t seed = 20240917;
};

void validate_tolerance(double tol)
{
    if (!(tol > 0.0) || tol > 1e-4) {
        throw std::invalid_argument("tolerance must be in (0, 1e-4]");
    }
}

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) {
                throw std::invalid_argument("cannot open output file " + path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

std::vector<std::size_t> parse_size_list(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("expected a comma-separated list of non-negative integers, got '" + text + "'");
        }
        out.push_back(std::stoul(item));
    }
    if (out.empty()) {
        throw std::invalid_argument("empty list");
    }
    return out;
}

std::vector<FiniteAbelianGroup> parse_group_list(const std::string& text)
{
    std::vector<FiniteAbelianGroup> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(FiniteAbelianGroup::parse(item));
    }
    if (out.empty()) {
        throw std::invalid_argument("no groups given");
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, const std::string& group, const std::string& set, const std::string& kind_name)
{
    const auto g = FiniteAbelianGroup::parse(group);
    const SymmetricSet u(g, parse_index_list(set));
    const auto kind = parse_problem_kind(kind_name);
    if (!is_primal(kind)) {
        throw std::invalid_argument("--kind must be turan or delsarte; the dual is solved alongside");
    }
    const auto cert = certify({kind, u});
    Output out(cfg.output);
    out.stream() << certificate_to_json(cert).dump(2) << '\n';
    if (!cert.passes(cfg.tolerance)) {
        throw CheckFailure("certificate residuals above tolerance");
    }
    return kExitOk;
}

int cmd_scan(const RunConfig& cfg, const std::string& groups, std::size_t all_orders, const std::string& what, std::size_t max_order)
{
    std::vector<FiniteAbelianGroup> list;
    if (!groups.empty()) {
        list = parse_group_list(groups);
    }
    for (std::size_t n = 2; n <= all_orders; ++n) {
        for (auto& g : abelian_groups_of_order(static_cast<int>(n))) {
            list.push_back(std::move(g));
        }
    }
    if (list.empty()) {
        throw std::invalid_argument("give --groups or --all-orders");
    }
    Output out(cfg.output);
    auto& os = out.stream();
    ScanOptions opt;
    opt.threads = cfg.threads;
    opt.tolerance = cfg.tolerance;
    opt.max_order = max_order;
    opt.sink = [&os](const Json& r) { os << r.dump() << '\n'; };
    for (const auto& g : list) {
        check_scan_budget(g, opt);
    }
    ScanResult res;
    if (what == "duality") {
        res = scan_duality(list, opt);
    } else if (what == "fd1") {
        res = scan_tiling_spectral(list, opt);
    } else if (what == "packing") {
        res = scan_packing(list, opt);
    } else {
        throw std::invalid_argument("--what must be duality, fd1 or packing");
    }
    os << res.summary.dump() << '\n';
    if (res.violations != 0) {
        throw CheckFailure(std::to_string(res.violations) + " violations");
    }
    return kExitOk;
}

struct EuclidArgs {
    std::optional<double> ball;
    std::optional<double> box;
    std::size_t dim = 1;
    std::string domain_file;
    std::string resolutions;
    std::optional<double> period;
    bool gap = false;
    bool no_symmetry = false;
};

int cmd_euclid(const RunConfig& cfg, const EuclidArgs& a)
{
    std::optional<EuclideanDomain> domain;
    std::optional<double> period = a.period;
    std::vector<std::size_t> ns;
    const int shapes = (a.ball ? 1 : 0) + (a.box ? 1 : 0) + (a.domain_file.empty() ? 0 : 1);
    if (shapes != 1) {
        throw std::invalid_argument("give exactly one of --ball, --box, --domain");
    }
    if (!a.domain_file.empty()) {
        auto spec = domain_spec_from_json(read_json_file(a.domain_file));
        domain = spec.domain;
        if (!period) {
            period = spec.period;
        }
        ns = spec.resolutions;
    } else if (a.ball) {
        domain = EuclideanDomain::ball(a.dim, *a.ball);
    } else {
        domain = EuclideanDomain::cube(a.dim, *a.box);
    }
    if (!a.resolutions.empty()) {
        ns = parse_size_list(a.resolutions);
    }
    if (ns.empty()) {
        throw std::invalid_argument("no resolutions given (--N)");
    }
    EuclidOptions opt;
    opt.period = period;
    opt.threads = cfg.threads;
    opt.use_symmetry = !a.no_symmetry;
    const auto report = approximate_constants(*domain, ns, opt);
    Json j = approximation_report_to_json(report);
    if (a.gap && domain->convex()) {
        const std::size_t finest = *std::max_element(ns.begin(), ns.end());
        opt.snapshots = false;
        j["gap"] = gap_report_to_json(turan_domain_gap(*domain, finest, opt));
    }
    Output out(cfg.output);
    out.stream() << j.dump(2) << '\n';
    if (!report.ok()) {
        throw CheckFailure("invariant failures: " + std::to_string(report.invariant_failures.size()));
    }
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& path)
{
    const auto r = verify_certificate(read_json_file(path), cfg.tolerance);
    Output out(cfg.output);
    out.stream() << verify_result_to_json(r).dump(2) << '\n';
    if (!r.matches_claim) {
        throw CheckFailure("recomputed verdict differs from the certificate's claim");
    }
    if (!r.pass) {
        throw CheckFailure("certificate does not verify");
    }
    return kExitOk;
}

// Quick versions of the property suites; one line per check.
int cmd_selftest(const RunConfig& cfg)
{
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
        failures += ok ? 0 : 1;
    };
    auto guarded = [&](const std::string& name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            report(name, false, std::string("exception: ") + e.what());
        }
    };
    ScanOptions opt;
    opt.threads = cfg.threads;
    opt.tolerance = cfg.tolerance;

    guarded("known values", [&] {
        const auto z4 = FiniteAbelianGroup::parse("Z4");
        const SymmetricSet u(z4, {0, 1, 3});
        const auto c = certify({ProblemKind::Turan, u});
        const auto z2 = FiniteAbelianGroup::parse("Z2");
        const double t2 = extremal_constant(ProblemKind::Turan, SymmetricSet::whole(z2));
        const bool ok = std::abs(c.primal.value - 1.0) <= 1e-9 && c.passes(cfg.tolerance) && std::abs(t2 - std::sqrt(2.0)) <= 1e-9;
        report("known values", ok, "T_Z4({0,1,3})=" + std::to_string(c.primal.value) + " T_Z2(G)=" + std::to_string(t2));
    });
    guarded("duality scan", [&] {
        std::vector<FiniteAbelianGroup> gs;
        for (int n = 2; n <= 8; ++n) {
            gs.emplace_back(std::vector<int>{n});
        }
        gs.push_back(FiniteAbelianGroup::parse("Z2xZ2"));
        const auto r = scan_duality(gs, opt);
        report("duality scan", r.violations == 0, std::to_string(r.instances) + " sets, " + std::to_string(r.violations) + " violations");
    });
    guarded("fd1 scan", [&] {
        const auto r = scan_tiling_spectral({FiniteAbelianGroup::parse("Z8"), FiniteAbelianGroup::parse("Z2xZ4")}, opt);
        report("fd1 scan", r.violations == 0, std::to_string(r.instances) + " subsets, " + std::to_string(r.violations) + " violations");
    });
    guarded("packing scan", [&] {
        const auto r = scan_packing({FiniteAbelianGroup::parse("Z8"), FiniteAbelianGroup::parse("Z3xZ3")}, opt);
        report("packing scan", r.violations == 0, std::to_string(r.instances) + " subsets, " + std::to_string(r.violations) + " violations");
    });
    guarded("random LP duality", [&] {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = 2 + rng() % 5;
            const std::size_t m = 1 + rng() % 6;
            LinearProgram lp(n);
            for (std::size_t j = 0; j < n; ++j) {
                lp.objective[j] = unif(rng);
                lp.bounds[j] = {BoundKind::NonNegative, 0.0};
            }
            std::vector<double> row(n, 1.0);
            lp.add_le(row, 1.0 + std::abs(unif(rng))); // keeps the region bounded
            for (std::size_t i = 0; i < m; ++i) {
                for (auto& v : row) {
                    v = unif(rng);
                }
                lp.add_le(row, std::abs(unif(rng)));
            }
            const auto sol = solve(lp);
            worst = std::max(worst, check_certificate(lp, sol).max());
        }
        report("random LP duality", worst <= 1e-8, "worst residual " + std::to_string(worst));
    });
    guarded("interval calibration", [&] {
        EuclidOptions eo;
        eo.threads = cfg.threads;
        eo.snapshots = false;
        const auto r = approximate_constants(EuclideanDomain::ball(1, 1.0), {8, 16, 32}, eo);
        bool ok = r.ok();
        for (const auto& lv : r.levels) {
            ok = ok && *lv.turan_error <= 0.08;
        }
        report("interval calibration", ok, "T_32=" + std::to_string(r.levels.back().turan));
    });
    return failures == 0 ? kExitOk : kExitFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Turan and Delsarte extremal problems on finite abelian groups"};
    app.require_subcommand(1);
    RunConfig cfg;
    app.add_option("--tol", cfg.tolerance, "Tolerance for pass/fail checks (<= 1e-4)");
    app.add_option("--threads", cfg.threads, "Worker threads (default: TDLAB_THREADS or all cores)");

    auto* solve_cmd = app.add_subcommand("solve", "Certify a Turan or Delsarte problem and its dual");
    std::string group;
    std::string set;
    std::string kind = "turan";
    solve_cmd->add_option("--group", group, "Group literal, e.g. Z2xZ4")->required();
    solve_cmd->add_option("--set", set, "Comma-separated element indices of U")->required();
    solve_cmd->add_option("--kind", kind, "turan or delsarte");
    solve_cmd->add_option("-o,--output", cfg.output, "Output file (default stdout)");

    auto* scan_cmd = app.add_subcommand("scan", "Exhaustive scans; JSON lines with a summary line last");
    std::string groups;
    std::string what = "duality";
    std::size_t all_orders = 0;
    std::size_t max_order = 24;
    scan_cmd->add_option("--groups", groups, "Comma-separated group literals");
    scan_cmd->add_option("--all-orders", all_orders, "Add every abelian group of order 2..n");
    scan_cmd->add_option("--what", what, "duality, fd1 or packing");
    scan_cmd->add_option("--max-order", max_order, "Refuse groups larger than this");
    scan_cmd->add_option("-o,--output", cfg.output, "Output file (default stdout)");
    scan_cmd->add_option("--threads", cfg.threads, "Worker threads");

    auto* euclid_cmd = app.add_subcommand("euclid", "Grid approximation of Euclidean constants");
    EuclidArgs ea;
    euclid_cmd->add_option("--ball", ea.ball, "Ball of this radius");
    euclid_cmd->add_option("--box", ea.box, "Cube of this half-width");
    euclid_cmd->add_option("--dim", ea.dim, "Dimension for --ball/--box");
    euclid_cmd->add_option("--domain", ea.domain_file, "Domain spec JSON {dim, shape:{kind, params}, R?, N:[...]}");
    euclid_cmd->add_option("--N", ea.resolutions, "Comma-separated even resolutions");
    euclid_cmd->add_option("--R", ea.period, "Torus side (default 4 x bounding radius)");
    euclid_cmd->add_flag("--gap", ea.gap, "Add the Delsarte gap report at the finest N");
    euclid_cmd->add_flag("--no-symmetry", ea.no_symmetry, "Reduce by x -> -x only");
    euclid_cmd->add_option("-o,--output", cfg.output, "Output file (default stdout)");
    euclid_cmd->add_option("--threads", cfg.threads, "Worker threads");

    auto* verify_cmd = app.add_subcommand("verify", "Re-check a td-cert/1 certificate from its contents");
    std::string cert_path;
    verify_cmd->add_option("certificate", cert_path, "Certificate JSON file")->required();
    verify_cmd->add_option("-o,--output", cfg.output, "Output file (default stdout)");

    auto* selftest_cmd = app.add_subcommand("selftest", "Quick property suites");
    selftest_cmd->add_option("--seed", cfg.seed, "Seed for the randomized suites");
    selftest_cmd->add_option("--threads", cfg.threads, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        validate_tolerance(cfg.tolerance);
        if (*solve_cmd) {
            return cmd_solve(cfg, group, set, kind);
        }
        if (*scan_cmd) {
            return cmd_scan(cfg, groups, all_orders, what, max_order);
        }
        if (*euclid_cmd) {
            return cmd_euclid(cfg, ea);
        }
        if (*verify_cmd) {
            return cmd_verify(cfg, cert_path);
        }
        if (*selftest_cmd) {
            return cmd_selftest(cfg);
        }
    } catch (const CheckFailure& e) {
        std::cerr << "tdlab: " << e.what() << '\n';
        return kExitFailure;
    } catch (const SolverError& e) {
        std::cerr << "tdlab: solver failure: " << e.what() << '\n';
        return kExitFailure;
    } catch (const Json::exception& e) {
        std::cerr << "tdlab: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "tdlab: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::out_of_range& e) {
        std::cerr << "tdlab: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "tdlab: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitInput;
}
