#include "selfaffine/config.hpp"
#include "selfaffine/errors.hpp"
#include "selfaffine/run.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace {

void usage() {
    std::puts(
        "usage: safm <config.json> [options]\n"
        "\n"
        "Computes multifractal quantities of self-affine measures: spectrum\n"
        "roots, derivative and closed-form curves, chaos-game sampling with\n"
        "grid-moment estimation, and covering-selection checks.\n"
        "\n"
        "options:\n"
        "  --override key=value   set a scalar parameter (repeatable)\n"
        "  --seed N               shorthand for --override seed=N\n"
        "  --budget N             shorthand for --override budget=N\n"
        "  --out-dir PATH         output directory\n"
        "  --print-config         echo the effective config and exit\n"
        "\n"
        "tasks (config \"task\" field): dq, tau, spectrum, lyapunov,\n"
        "closed-form, regimes, sample, empirical-tau, verify, covering\n"
        "\n"
        "exit codes: 0 ok, 2 validation error, 3 budget/convergence/check failure");
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "-h" || args[0] == "--help") {
        usage();
        return args.empty() ? 2 : 0;
    }

    try {
        selfaffine::RunConfig cfg = selfaffine::load_config(args[0]);
        bool print_only = false;
        for (std::size_t i = 1; i < args.size(); ++i) {
            const std::string& a = args[i];
            auto next = [&]() -> const std::string& {
                if (i + 1 >= args.size())
                    throw selfaffine::ValidationError("missing value after " + a);
                return args[++i];
            };
            if (a == "--override") selfaffine::apply_override(cfg, next());
            else if (a == "--seed") selfaffine::apply_override(cfg, "seed=" + next());
            else if (a == "--budget") selfaffine::apply_override(cfg, "budget=" + next());
            else if (a == "--out-dir") cfg.out_dir = next();
            else if (a == "--print-config") print_only = true;
            else throw selfaffine::ValidationError("unknown option '" + a + "'");
        }
        if (print_only) {
            std::printf("%s\n", selfaffine::emit_config(cfg).c_str());
            return 0;
        }

        selfaffine::RunResult res = selfaffine::run(cfg);
        for (const auto& f : res.outputs) std::printf("wrote %s\n", f.c_str());
        for (const auto& f : res.failures) std::fprintf(stderr, "FAIL: %s\n", f.c_str());
        return res.exit_code;
    } catch (const selfaffine::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const selfaffine::BudgetError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const selfaffine::ConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
