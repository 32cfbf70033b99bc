// rosa: chat with a simulated robot from the terminal, or serve the HTTP API.

#include "rosa/gateway/http_server.hpp"
#include "rosa/gateway/repl.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <iostream>

namespace {

rosa::gateway::HttpGateway* g_server = nullptr;

void on_signal(int) {
    if (g_server) {
        g_server->stop();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rosa: natural-language operation of simulated robots"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string scenario_dir = ROSA_DATA_DIR "/scenarios";
    std::string config_file;
    std::string model = "scripted";
    std::string script;
    std::string log_dir;
    app.add_option("--scenario-dir", scenario_dir, "Directory of .scenario files")->check(CLI::ExistingDirectory);
    app.add_option("--config", config_file, "Key-value config file")->check(CLI::ExistingFile);
    app.add_option("--model", model, "Model backend")->check(CLI::IsMember({"scripted", "remote"}));
    app.add_option("--script", script, "Script for the scripted model (default: the scenario's)")
        ->check(CLI::ExistingFile);
    app.add_option("--log-dir", log_dir, "Where transcripts and graph logs are written");

    auto* repl = app.add_subcommand("repl", "Interactive chat with one session");
    std::string scenario = "ros_demo";
    std::optional<std::string> language;
    repl->add_option("--scenario", scenario, "Scenario name");
    repl->add_option("--language", language, "Language for the agent's replies");

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--port", port, "Listen port")->check(CLI::Range(0, 65535));

    CLI11_PARSE(app, argc, argv);

    try {
        rosa::Json overrides = rosa::Json::object();
        if (!config_file.empty()) {
            overrides = rosa::gateway::overrides_from_config(config_file);
        }
        // Flags win over the config file.
        if (app.count("--model") || !overrides.contains("model")) {
            overrides["model"] = model;
        }
        if (!script.empty()) {
            overrides["model.script"] = script;
        }
        rosa::gateway::SessionService::Options options;
        if (!log_dir.empty()) {
            options.log_dir = log_dir;
        }
        options.defaults.apply(overrides);
        rosa::gateway::SessionService service(rosa::scenarios::ScenarioCatalog(scenario_dir), options);

        if (*repl) {
            auto id = service.create_session(scenario);
            std::cout << "session " << id << " on scenario " << scenario << "; /quit to leave\n";
            return rosa::gateway::run_repl(service, id, std::cin, std::cout, language);
        }

        rosa::gateway::HttpGateway server(service);
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cout << "listening on " << host << ":" << port << std::endl;
        if (!server.listen(host, port)) {
            std::cerr << "rosa: cannot listen on " << host << ":" << port << '\n';
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "rosa: " << e.what() << '\n';
        return 1;
    }
}
