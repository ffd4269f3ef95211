// Batch front-end: profiles -> cone -> leaf -> domain -> solve -> analysis,
// driven by a flat key=value config file.

#include "ac/config.hpp"
#include "ac/io.hpp"
#include "ac/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Allen-Cahn minimizers near Lawson cones"};
    std::string command, config_path, out_dir = "out";
    app.add_option("command", command,
                   "one of: cone-info, leaf, profile, solve, analyze, sweep")
        ->required();
    app.add_option("--config", config_path, "flat key=value config file")->required();
    app.add_option("--out", out_dir, "output directory (default: out)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad invocation is a config error
    }

    std::string text;
    try {
        text = ac::read_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    ac::ParseResult parsed = ac::parse_config(text);
    if (!parsed.ok()) {
        std::cerr << ac::format_errors(parsed.errors);
        return 2;
    }
    if (to_string(parsed.config.command) != command) {
        std::cerr << "config error: command line says '" << command << "' but config says '"
                  << to_string(parsed.config.command) << "'\n";
        return 2;
    }
    return ac::run_pipeline(parsed.config, out_dir);
}
