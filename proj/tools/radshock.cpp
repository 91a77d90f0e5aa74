#include <CLI11.hpp>
#include <iostream>

#include "radshock/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"radiative shock toolkit: profiles, regularity thresholds, "
                 "system reduction and time-dependent verification"};
    app.allow_extras();  // residual --key value pairs become config entries

    std::string mode;
    app.add_option("mode", mode,
                   "run mode: profile | regularity | system | evolve | verify")
        ->required();
    std::string config_path;
    app.add_option("--config", config_path, "flat key=value configuration file");

    CLI11_PARSE(app, argc, argv);

    radshock::RunConfig cfg;
    try {
        if (!config_path.empty())
            cfg = radshock::RunConfig::from_file(mode, config_path);
        cfg.mode = mode;

        std::vector<std::string> extras = app.remaining();
        for (std::size_t i = 0; i < extras.size(); ++i) {
            const std::string& tok = extras[i];
            if (tok.rfind("--", 0) != 0)
                throw radshock::ConfigError("unexpected argument '" + tok + "'");
            std::string key = tok.substr(2);
            std::string value;
            std::size_t eq = key.find('=');
            if (eq != std::string::npos) {
                value = key.substr(eq + 1);
                key = key.substr(0, eq);
            } else {
                if (i + 1 >= extras.size())
                    throw radshock::ConfigError("flag --" + key +
                                                " is missing a value");
                value = extras[++i];
            }
            if (key.empty())
                throw radshock::ConfigError("empty flag name");
            cfg.kv[key] = value;  // flags override file values
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return radshock::kExitConfig;
    }

    return radshock::run_config(cfg);
}
