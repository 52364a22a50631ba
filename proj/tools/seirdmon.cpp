// Command-line driver over the seirdmon C API.
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seirdmon/seirdmon.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3, kInternal = 4 };

int exit_code(seirdmon_status s) {
    switch (s) {
        case SEIRDMON_OK: return kOk;
        case SEIRDMON_ERR_INVALID_ARGUMENT: return kUsage;
        case SEIRDMON_ERR_NOT_FOUND:
        case SEIRDMON_ERR_FORMAT:
        case SEIRDMON_ERR_DATA_INTEGRITY:
        case SEIRDMON_ERR_IO:
        case SEIRDMON_ERR_DIMENSION: return kData;
        case SEIRDMON_ERR_DOMAIN:
        case SEIRDMON_ERR_INTEGRATION:
        case SEIRDMON_ERR_DEPLETION:
        case SEIRDMON_ERR_SINGULAR_COVARIANCE:
        case SEIRDMON_ERR_UNDEFINED_METRIC: return kNumeric;
        default: return kInternal;
    }
}

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

struct ConfigHandle {
    seirdmon_config* cfg = nullptr;
    ~ConfigHandle() { seirdmon_config_destroy(cfg); }
};

std::string flag_name(std::string key) {
    for (char& c : key)
        if (c == '_') c = '-';
    return "--" + key;
}

bool is_boolean(const seirdmon_config* cfg, const char* key) {
    char buf[16];
    if (seirdmon_config_get(cfg, key, buf, sizeof buf, nullptr) != SEIRDMON_OK) return false;
    return std::string(buf) == "true" || std::string(buf) == "false";
}

int report_failure(const char* stage, seirdmon_status s) {
    std::fprintf(stderr, "seirdmon %s: %s: %s\n", stage, seirdmon_status_string(s), seirdmon_last_error());
    return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
    ConfigHandle defaults;
    if (seirdmon_config_create(&defaults.cfg) != SEIRDMON_OK) return kInternal;

    CLI::App app{"Sequential SEIRD estimation and MEWMA change monitoring"};
    app.require_subcommand(1);
    app.set_version_flag("--version", seirdmon_version());

    struct Stage {
        const char* name;
        const char* help;
        std::vector<const char*> steps;
    };
    const std::vector<Stage> stages = {
        {"ingest", "derive the canonical observation CSV from JHU time-series files", {"ingest"}},
        {"simulate", "write a synthetic observation CSV from known rates", {"simulate"}},
        {"fit", "run the particle filter over every day", {"fit"}},
        {"monitor", "compute the MEWMA T2 chart from the posterior archive", {"monitor"}},
        {"report", "summarize fit quality and signal days", {"report"}},
        {"run", "fit, monitor and report in one go", {"fit", "monitor", "report"}},
    };

    std::string config_file;
    std::map<std::string, std::string> values;
    std::vector<CLI::App*> subs;
    for (const Stage& st : stages) {
        CLI::App* sub = app.add_subcommand(st.name, st.help);
        sub->add_option("--config", config_file, "key = value file; flags override it");
        for (std::size_t k = 0; k < seirdmon_config_key_count(); ++k) {
            const char* key = seirdmon_config_key(k);
            const std::string help = seirdmon_config_key_help(k);
            std::string& slot = values[key];
            if (is_boolean(defaults.cfg, key))
                sub->add_flag(flag_name(key) + "{true}", slot, help)->expected(0, 1);
            else
                sub->add_option(flag_name(key), slot, help);
        }
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    ConfigHandle run;
    if (seirdmon_config_create(&run.cfg) != SEIRDMON_OK) return kInternal;
    if (!config_file.empty()) {
        const seirdmon_status s = seirdmon_config_load_file(run.cfg, config_file.c_str());
        if (s != SEIRDMON_OK) return report_failure("config", s);
    }

    const Stage* chosen = nullptr;
    for (std::size_t i = 0; i < stages.size(); ++i)
        if (subs[i]->parsed()) chosen = &stages[i];
    if (chosen == nullptr) return kUsage;
    CLI::App* sub = app.get_subcommand(chosen->name);

    for (std::size_t k = 0; k < seirdmon_config_key_count(); ++k) {
        const char* key = seirdmon_config_key(k);
        if (sub->count(flag_name(key)) == 0) continue;
        const seirdmon_status s = seirdmon_config_set(run.cfg, key, values[key].c_str());
        if (s != SEIRDMON_OK) return report_failure("config", s);
    }
    if (const seirdmon_status s = seirdmon_config_validate(run.cfg); s != SEIRDMON_OK)
        return report_failure("config", s);

    for (const char* step : chosen->steps) {
        const std::string name = step;
        seirdmon_status s = SEIRDMON_ERR_INTERNAL;
        if (name == "ingest") s = seirdmon_run_ingest(run.cfg, log_line, nullptr);
        else if (name == "simulate") s = seirdmon_run_simulate(run.cfg, log_line, nullptr);
        else if (name == "fit") s = seirdmon_run_fit(run.cfg, log_line, nullptr);
        else if (name == "monitor") s = seirdmon_run_monitor(run.cfg, log_line, nullptr);
        else if (name == "report") {
            seirdmon_report r{};
            s = seirdmon_run_report(run.cfg, nullptr, nullptr, &r);
            if (s == SEIRDMON_OK) {
                char out[4096];
                if (seirdmon_config_get(run.cfg, "out", out, sizeof out, nullptr) == SEIRDMON_OK) {
                    const std::string path = std::string(out) + "/summary.txt";
                    if (std::FILE* f = std::fopen(path.c_str(), "rb")) {
                        char buf[4096];
                        std::size_t n;
                        while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) std::fwrite(buf, 1, n, stdout);
                        std::fclose(f);
                    }
                }
            }
        }
        if (s != SEIRDMON_OK) return report_failure(step, s);
    }
    return kOk;
}
