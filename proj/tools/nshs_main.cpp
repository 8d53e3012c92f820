// nshs - spectral solver and verification laboratory for 2D incompressible
// Navier-Stokes on the half-plane in vorticity form.
//
// Subcommands: simulate, euler, converge, verify-kernels,
// verify-inequalities, norms, inspect. Exit codes: 0 pass, 2 verification
// failure, 1 error.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nshs/harness.hpp"
#include "nshs/io.hpp"
#include "nshs/norms.hpp"
#include "nshs/solvers.hpp"
#include "nshs/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace nshs;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::uint64_t seed = 12345;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file");
    cmd->add_option("--set", args.overrides, "override, section.key=value");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "sampling seed");
}

RunConfig load_config(const CommonArgs& args) {
    if (args.config_path.empty()) return parse_config("", args.overrides);
    return parse_config_file(args.config_path, args.overrides);
}

std::string diagnostics_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "time,energy,enstrophy,compat_max,cfl,picard_iters\n";
    os.precision(12);
    for (const auto& d : traj.diagnostics)
        os << d.time << "," << d.energy << "," << d.enstrophy << "," << d.compat_max << ","
           << d.cfl << "," << d.picard_iters << "\n";
    return os.str();
}

int run_solver(const CommonArgs& args, const std::string& solver_name) {
    RunConfig cfg = load_config(args);
    auto grid = make_solver_grid(cfg);
    VorticityState datum = make_datum(cfg, grid);

    SolverKind use = SolverKind::Mild;
    if (solver_name == "mild") use = SolverKind::Mild;
    else if (solver_name == "direct") use = SolverKind::Direct;
    else if (solver_name == "euler") use = SolverKind::Euler;
    else throw InvalidArgument("unknown solver: " + solver_name);

    Trajectory traj = run(cfg, datum, use);
    const std::filesystem::path out(args.out_dir);
    std::filesystem::create_directories(out);
    write_checkpoint(out / "trajectory.nshs", traj);

    std::vector<Artifact> artifacts;
    artifacts.push_back({"diagnostics.csv", diagnostics_csv(traj)});
    artifacts.push_back({"config.ini", cfg.serialize()});
    Norms norms(cfg, grid);
    artifacts.push_back({"norms_final.json", norms.triple_norm(traj.back()).to_json() + "\n"});
    emit_outputs(out, artifacts);

    if (!traj.failure.empty()) {
        std::cerr << "run truncated: " << traj.failure << "\n";
        return 2;
    }
    std::cout << "completed " << traj.snapshots.size() << " snapshots to t=" << traj.back().time()
              << "; outputs in " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("NSHS_THREADS")) {
#ifdef _OPENMP
        const int n = std::atoi(env);
        if (n >= 1) omp_set_num_threads(n);
#else
        (void)env;
#endif
    }

    CLI::App app{"nshs - half-plane vorticity solver and verification lab"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string solver_name = "mild";

    auto* simulate = app.add_subcommand("simulate", "run the viscous solver");
    add_common(simulate, args);
    simulate->add_option("--solver", solver_name, "mild|direct (default mild)");

    auto* euler_cmd = app.add_subcommand("euler", "run the inviscid reference");
    add_common(euler_cmd, args);

    auto* converge = app.add_subcommand("converge", "viscosity sweep against the Euler reference");
    add_common(converge, args);
    std::vector<double> nu_list = {4e-3, 2e-3, 1e-3, 5e-4};
    converge->add_option("--nu", nu_list, "viscosity sweep (decreasing)");

    auto* vk = app.add_subcommand("verify-kernels", "residual-kernel structure battery");
    add_common(vk, args);
    bool no_refine = false;
    vk->add_flag("--no-refine", no_refine, "skip the 2x grid refinement stability pass");
    bool dump_kernels = false;
    vk->add_flag("--dump", dump_kernels, "write sample kernels in NSHK format");

    auto* vi = app.add_subcommand("verify-inequalities", "appendix and estimate batteries");
    add_common(vi, args);

    auto* norms_cmd = app.add_subcommand("norms", "norm report for a checkpoint or the datum");
    add_common(norms_cmd, args);
    std::string checkpoint;
    norms_cmd->add_option("--checkpoint", checkpoint, "NSHS checkpoint path");

    auto* inspect = app.add_subcommand("inspect", "summarize a checkpoint");
    std::string inspect_path;
    inspect->add_option("path", inspect_path, "NSHS checkpoint")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (simulate->parsed()) return run_solver(args, solver_name);
        if (euler_cmd->parsed()) return run_solver(args, "euler");

        if (converge->parsed()) {
            RunConfig cfg = load_config(args);
            ConvergenceTable table = run_convergence(cfg, nu_list);
            std::vector<Artifact> artifacts;
            artifacts.push_back({"convergence.csv", table.to_csv()});
            nlohmann::json meta;
            meta["slope"] = table.slope;
            meta["dissipation_slope"] = table.dissipation_slope;
            meta["failures"] = table.failures;
            meta["config"] = cfg.serialize();
            artifacts.push_back({"convergence_meta.json", meta.dump(2) + "\n"});
            emit_outputs(args.out_dir, artifacts);
            std::cout << table.to_csv();
            std::cout << "slope=" << table.slope
                      << " dissipation_slope=" << table.dissipation_slope << "\n";
            return table.failures.empty() ? 0 : 2;
        }

        if (vk->parsed()) {
            InequalityReport rep = check_kernel_bounds(!no_refine);
            std::vector<Artifact> artifacts;
            artifacts.push_back({"kernel_report.csv", reports_to_csv({rep})});
            artifacts.push_back({"kernel_report.json", reports_to_json({rep}) + "\n"});
            emit_outputs(args.out_dir, artifacts);
            if (dump_kernels) {
                auto grid = YGrid::make(193, 2.0, 1e-3);
                for (int xi : {1, 4}) {
                    KernelMatrix k = green_residual(xi, 1e-2, 1e-1, grid, 320);
                    write_kernel(std::filesystem::path(args.out_dir) /
                                     ("residual_xi" + std::to_string(xi) + ".nshk"),
                                 k);
                }
            }
            std::cout << reports_to_csv({rep});
            return rep.pass ? 0 : 2;
        }

        if (vi->parsed()) {
            RunConfig cfg = load_config(args);
            std::vector<InequalityReport> reports;
            reports.push_back(check_int_t());
            reports.push_back(check_recovery(cfg, args.seed));
            reports.push_back(check_weight_properties());
            auto grid = YGrid::make(cfg.ny, cfg.ymax, cfg.nu);
            VorticityState datum = make_datum(cfg, grid);
            reports.push_back(check_nonlinear_estimates(datum, cfg, args.seed));
            std::vector<Artifact> artifacts;
            artifacts.push_back({"inequalities.csv", reports_to_csv(reports)});
            artifacts.push_back({"inequalities.json", reports_to_json(reports) + "\n"});
            emit_outputs(args.out_dir, artifacts);
            std::cout << reports_to_csv(reports);
            for (const auto& r : reports)
                if (!r.pass) return 2;
            return 0;
        }

        if (norms_cmd->parsed()) {
            RunConfig cfg = load_config(args);
            VorticityState state;
            std::shared_ptr<const YGrid> grid;
            if (!checkpoint.empty()) {
                Trajectory traj = read_checkpoint(checkpoint);
                cfg = traj.config;
                state = traj.back();
                grid = state.grid();
            } else {
                grid = make_solver_grid(cfg);
                state = make_datum(cfg, grid);
            }
            Norms norms(cfg, grid);
            NormReport rep = norms.triple_norm(state);
            emit_outputs(args.out_dir, {{"norms.json", rep.to_json() + "\n"}});
            std::cout << rep.to_json() << "\n";
            return 0;
        }

        if (inspect->parsed()) {
            Trajectory traj = read_checkpoint(inspect_path);
            std::cout << "solver: " << to_string(traj.kind) << "\n";
            std::cout << "snapshots: " << traj.snapshots.size() << "\n";
            std::cout << "K: " << traj.front().K() << ", ny: " << traj.front().grid()->size()
                      << ", ymax: " << traj.front().grid()->ymax() << "\n";
            std::cout << "t: [" << traj.front().time() << ", " << traj.back().time() << "]\n";
            if (!traj.failure.empty()) std::cout << "failure: " << traj.failure << "\n";
            return 0;
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
