#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fadekit/scenario.hpp"
#include "fadekit/validation.hpp"
#include "fadekit/version.hpp"

namespace {

namespace sc = fadekit::scenario;
namespace va = fadekit::validation;

constexpr int exit_validation_failed = 1;
constexpr int exit_config_error = 2;
constexpr int exit_numerical_failure = 3;

struct RunArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string metric;
    std::string capacity_scheme;
    std::string modulation;
    std::string output;
};

int cmd_run(const RunArgs& args) {
    try {
        sc::Document doc = sc::load_document(args.config);
        for (const std::string& s : args.sets) sc::apply_override(doc, s);
        if (!args.metric.empty()) sc::apply_override(doc, "metric=" + args.metric);
        if (!args.capacity_scheme.empty()) sc::apply_override(doc, "capacity_scheme=" + args.capacity_scheme);
        if (!args.modulation.empty()) sc::apply_override(doc, "modulation=" + args.modulation);
        if (!args.output.empty()) sc::apply_override(doc, "output=\"" + args.output + "\"");
        const sc::ScenarioConfig cfg = sc::from_document(doc);
        const sc::RunOutput out = sc::run(cfg, sc::threads_from_env());
        sc::write_outputs(cfg, out);
        std::cout << "wrote " << cfg.output << ".csv (" << cfg.sweep.points << " rows) and " << cfg.output
                  << ".meta.json\n";
        return 0;
    } catch (const sc::ConfigError& e) {
        std::cerr << "fadekit: config error: " << e.what() << '\n';
        return exit_config_error;
    } catch (const fadekit::Error& e) {
        std::cerr << "fadekit: numerical failure: " << e.what() << '\n';
        return exit_numerical_failure;
    } catch (const std::exception& e) {
        std::cerr << "fadekit: " << e.what() << '\n';
        return 1;
    }
}

int cmd_validate(const std::string& which) {
    std::vector<const va::Suite*> selected;
    if (which == "all") {
        for (const va::Suite& s : va::suites()) selected.push_back(&s);
    } else if (const va::Suite* s = va::find_suite(which)) {
        selected.push_back(s);
    } else {
        std::cerr << "fadekit: unknown suite '" << which << "' (expected all";
        for (const va::Suite& s : va::suites()) std::cerr << ", " << s.name;
        std::cerr << ")\n";
        return exit_config_error;
    }
    bool ok = true;
    for (const va::Suite* s : selected) {
        const auto checks = s->run();
        const bool pass = va::all_passed(checks);
        ok = ok && pass;
        std::cout << "== " << s->name << ": " << s->title << '\n';
        for (const va::Check& c : checks)
            std::cout << (c.passed ? "  PASS  " : "  FAIL  ") << c.name << "  [" << c.detail << "]\n";
        std::size_t passed = 0;
        for (const va::Check& c : checks) passed += c.passed ? 1 : 0;
        std::cout << "   " << (pass ? "PASS" : "FAIL") << " " << s->name << " (" << passed << "/" << checks.size()
                  << " checks)\n";
    }
    return ok ? 0 : exit_validation_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Performance metrics for multi-hop links over alpha-kappa-mu fading"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Evaluate a scenario sweep and write <output>.csv and <output>.meta.json");
    run->add_option("config", run_args.config, "Scenario file (TOML, or JSON such as a .meta.json)")->required();
    run->add_option("--set", run_args.sets, "Override a config field, e.g. --set hops[0].mu=2 (repeatable)")
        ->take_all();
    run->add_option("--metric", run_args.metric, "Shorthand for --set metric=...");
    run->add_option("--capacity-scheme", run_args.capacity_scheme, "Shorthand for --set capacity_scheme=...");
    run->add_option("--modulation", run_args.modulation, "Shorthand for --set modulation=...");
    run->add_option("--output", run_args.output, "Shorthand for --set output=...");

    std::string suite;
    CLI::App* validate = app.add_subcommand("validate", "Run an acceptance suite and print a pass/fail table");
    validate->add_option("suite", suite, "Suite name or 'all'")->required();

    app.add_subcommand("version", "Print the library version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }

    if (*run) return cmd_run(run_args);
    if (*validate) return cmd_validate(suite);
    std::cout << "fadekit " << fadekit::version << '\n';
    return 0;
}
