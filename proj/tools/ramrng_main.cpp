#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ramrng/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"SRAM power-up randomness simulator: decay experiments, entropy budgets, "
                 "harvest cycles and HB+ authentication runs"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;
    bool seed_given = false;
    app.add_option("--seed", seed, "global random seed")->each([&](const std::string&) {
        seed_given = true;
    });
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_path, "write output to this file instead of stdout");

    int tags = 4;
    std::string intervals = "0:5:60";
    CLI::App* decay = app.add_subcommand("decay", "run the remanence experiment, emit CSV");
    decay->add_option("--tags", tags, "population size");
    decay->add_option("--intervals", intervals, "off-intervals as start:step:end seconds");

    std::string protocol = "hb-plus";
    std::string generation = "wisp41";
    CLI::App* budget = app.add_subcommand("budget", "print the entropy feasibility table");
    budget->add_option("--protocol", protocol, "hb-plus or hb-sharp");
    budget->add_option("--generation", generation, "wisp41, wisp2x or custom");

    long cycles = 1;
    double off_interval = 60.0;
    CLI::App* harvest = app.add_subcommand("harvest", "extract random bits, one hex line per cycle");
    harvest->add_option("--cycles", cycles, "number of harvest cycles");
    harvest->add_option("--off-interval", off_interval, "seconds of power loss between cycles");

    std::string auth_protocol = "hb-plus";
    std::string supply = "entropy_capacity";
    std::string convention = "between";
    CLI::App* auth = app.add_subcommand("auth", "schedule harvests and run an authentication");
    auth->add_option("--protocol", auth_protocol, "hb-plus or hb-sharp");
    auth->add_option("--supply", supply, "entropy_capacity or extractor_yield");
    auth->add_option("--convention", convention, "between or per");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        ramrng::RunConfig cfg = ramrng::load_run_config(config_path);
        if (seed_given) cfg.seed = seed;
        if (!out_path.empty()) cfg.output_path = out_path;

        std::string result;
        if (decay->parsed())
            result = ramrng::run_decay(cfg, tags, intervals);
        else if (budget->parsed())
            result = ramrng::run_budget(cfg, protocol, generation);
        else if (harvest->parsed())
            result = ramrng::run_harvest(cfg, cycles, off_interval);
        else
            result = ramrng::run_auth(cfg, auth_protocol, supply, convention);

        if (cfg.output_path.empty())
            std::cout << result;
        else
            ramrng::write_file_atomic(cfg.output_path, result);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
