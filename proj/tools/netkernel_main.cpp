#include <CLI11.hpp>
#include <optional>
#include <string>

#include "netkernel/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"netkernel: joint graph / interaction-kernel estimation for "
                 "interacting-particle systems"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments = {
        "simulate",          "fit-als",        "fit-orals",         "fit-threefold",
        "study-convergence", "study-noise",    "study-regularizers", "study-rip",
        "kuramoto",          "leader-follower", "multitype-select",  "benchmark"};

    std::string config_path, out_dir = ".";
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;

    std::vector<CLI::App*> subs;
    for (const auto& name : experiments) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (env NETKERNEL_THREADS)");
        sub->add_option("--seed", seed, "override the config seed");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed())
            return netkernel::cli::run(experiments[i], config_path, out_dir, threads, seed);
    return 2;
}
