#include "seirdmon/seirdmon.h"

#include <cstring>
#include <new>
#include <optional>
#include <ostream>
#include <streambuf>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "filter/particle_filter.hpp"
#include "model/likelihood.hpp"
#include "model/seird.hpp"
#include "monitor/chi_square.hpp"
#include "monitor/mewma.hpp"
#include "pipeline/config.hpp"
#include "pipeline/pipeline.hpp"

struct seirdmon_config {
    seirdmon::RunConfig cfg;
};

struct seirdmon_filter {
    seirdmon::ParticleFilter filter;
    std::vector<seirdmon::ParamVector> samples;
};

struct seirdmon_monitor {
    seirdmon::MewmaMonitor monitor;
};

namespace {

thread_local std::string g_last_error;

seirdmon_status status_of(seirdmon::ErrorKind kind) {
    using seirdmon::ErrorKind;
    switch (kind) {
        case ErrorKind::InvalidArgument: return SEIRDMON_ERR_INVALID_ARGUMENT;
        case ErrorKind::NotFound: return SEIRDMON_ERR_NOT_FOUND;
        case ErrorKind::Format: return SEIRDMON_ERR_FORMAT;
        case ErrorKind::DataIntegrity: return SEIRDMON_ERR_DATA_INTEGRITY;
        case ErrorKind::Io: return SEIRDMON_ERR_IO;
        case ErrorKind::Domain: return SEIRDMON_ERR_DOMAIN;
        case ErrorKind::Integration: return SEIRDMON_ERR_INTEGRATION;
        case ErrorKind::Depletion: return SEIRDMON_ERR_DEPLETION;
        case ErrorKind::SingularCovariance: return SEIRDMON_ERR_SINGULAR_COVARIANCE;
        case ErrorKind::UndefinedMetric: return SEIRDMON_ERR_UNDEFINED_METRIC;
        case ErrorKind::Dimension: return SEIRDMON_ERR_DIMENSION;
    }
    return SEIRDMON_ERR_INTERNAL;
}

seirdmon_status fail(seirdmon_status s, const char* what) {
    g_last_error = what;
    return s;
}

template <class F>
seirdmon_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return SEIRDMON_OK;
    } catch (const seirdmon::Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SEIRDMON_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SEIRDMON_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SEIRDMON_ERR_INTERNAL, "unknown exception");
    }
}

#define SEIRDMON_REQUIRE(ptr)                                                       \
    do {                                                                            \
        if ((ptr) == nullptr) return fail(SEIRDMON_ERR_INVALID_ARGUMENT, #ptr " is null"); \
    } while (0)

// Forwards each completed line to the callback.
class LogSink : public std::streambuf {
public:
    LogSink(seirdmon_log_fn fn, void* user) : fn_(fn), user_(user) {}
    ~LogSink() override {
        if (!line_.empty()) fn_(line_.c_str(), user_);
    }

protected:
    int_type overflow(int_type c) override {
        if (traits_type::eq_int_type(c, traits_type::eof())) return traits_type::not_eof(c);
        if (traits_type::to_char_type(c) == '\n') {
            fn_(line_.c_str(), user_);
            line_.clear();
        } else {
            line_ += traits_type::to_char_type(c);
        }
        return c;
    }

private:
    seirdmon_log_fn fn_;
    void* user_;
    std::string line_;
};

template <class F>
seirdmon_status with_log(seirdmon_log_fn log, void* user, F&& body) {
    if (log == nullptr) return guarded([&] { body(nullptr); });
    LogSink sink(log, user);
    std::ostream os(&sink);
    return guarded([&] { body(&os); });
}

seirdmon::ParamVector to_cpp(const seirdmon_params& p) { return {p.alpha, p.beta, p.gamma, p.eta}; }
seirdmon_params to_c(const seirdmon::ParamVector& p) { return {p.alpha, p.beta, p.gamma, p.eta}; }

}  // namespace

extern "C" {

const char* seirdmon_version(void) { return "0.1.0"; }

const char* seirdmon_status_string(seirdmon_status status) {
    switch (status) {
        case SEIRDMON_OK: return "ok";
        case SEIRDMON_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SEIRDMON_ERR_NOT_FOUND: return "not found";
        case SEIRDMON_ERR_FORMAT: return "format error";
        case SEIRDMON_ERR_DATA_INTEGRITY: return "data integrity error";
        case SEIRDMON_ERR_IO: return "i/o error";
        case SEIRDMON_ERR_DOMAIN: return "domain error";
        case SEIRDMON_ERR_INTEGRATION: return "integration failure";
        case SEIRDMON_ERR_DEPLETION: return "particle depletion";
        case SEIRDMON_ERR_SINGULAR_COVARIANCE: return "singular covariance";
        case SEIRDMON_ERR_UNDEFINED_METRIC: return "undefined metric";
        case SEIRDMON_ERR_DIMENSION: return "dimension mismatch";
        case SEIRDMON_ERR_BUFFER_TOO_SMALL: return "buffer too small";
        case SEIRDMON_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* seirdmon_last_error(void) { return g_last_error.c_str(); }

seirdmon_status seirdmon_config_create(seirdmon_config** out) {
    SEIRDMON_REQUIRE(out);
    *out = nullptr;
    return guarded([&] { *out = new seirdmon_config{}; });
}

void seirdmon_config_destroy(seirdmon_config* cfg) { delete cfg; }

size_t seirdmon_config_key_count(void) { return seirdmon::option_keys().size(); }

const char* seirdmon_config_key(size_t index) {
    const auto& keys = seirdmon::option_keys();
    return index < keys.size() ? keys[index].c_str() : nullptr;
}

const char* seirdmon_config_key_help(size_t index) {
    static const std::vector<std::string> help = [] {
        std::vector<std::string> h;
        for (const auto& k : seirdmon::option_keys()) h.push_back(seirdmon::option_help(k));
        return h;
    }();
    return index < help.size() ? help[index].c_str() : nullptr;
}

seirdmon_status seirdmon_config_set(seirdmon_config* cfg, const char* key, const char* value) {
    SEIRDMON_REQUIRE(cfg);
    SEIRDMON_REQUIRE(key);
    SEIRDMON_REQUIRE(value);
    // Applied to a copy so a rejected value leaves the config untouched.
    return guarded([&] {
        seirdmon::RunConfig next = cfg->cfg;
        seirdmon::set_option(next, key, value);
        cfg->cfg = std::move(next);
    });
}

seirdmon_status seirdmon_config_get(const seirdmon_config* cfg, const char* key, char* buf, size_t len,
                                    size_t* needed) {
    SEIRDMON_REQUIRE(cfg);
    SEIRDMON_REQUIRE(key);
    std::string value;
    const seirdmon_status s = guarded([&] { value = seirdmon::get_option(cfg->cfg, key); });
    if (s != SEIRDMON_OK) return s;
    if (needed) *needed = value.size() + 1;
    if (buf == nullptr || len < value.size() + 1) return fail(SEIRDMON_ERR_BUFFER_TOO_SMALL, "buffer too small");
    std::memcpy(buf, value.c_str(), value.size() + 1);
    return SEIRDMON_OK;
}

seirdmon_status seirdmon_config_load_file(seirdmon_config* cfg, const char* path) {
    SEIRDMON_REQUIRE(cfg);
    SEIRDMON_REQUIRE(path);
    return guarded([&] {
        seirdmon::RunConfig next = cfg->cfg;
        seirdmon::load_config_file(next, path);
        cfg->cfg = std::move(next);
    });
}

seirdmon_status seirdmon_config_validate(const seirdmon_config* cfg) {
    SEIRDMON_REQUIRE(cfg);
    return guarded([&] { seirdmon::validate(cfg->cfg); });
}

seirdmon_status seirdmon_run_ingest(const seirdmon_config* cfg, seirdmon_log_fn log, void* user) {
    SEIRDMON_REQUIRE(cfg);
    return with_log(log, user, [&](std::ostream* os) { seirdmon::run_ingest(cfg->cfg, os); });
}

seirdmon_status seirdmon_run_simulate(const seirdmon_config* cfg, seirdmon_log_fn log, void* user) {
    SEIRDMON_REQUIRE(cfg);
    return with_log(log, user, [&](std::ostream* os) { seirdmon::run_simulate(cfg->cfg, os); });
}

seirdmon_status seirdmon_run_fit(const seirdmon_config* cfg, seirdmon_log_fn log, void* user) {
    SEIRDMON_REQUIRE(cfg);
    return with_log(log, user, [&](std::ostream* os) { seirdmon::run_fit(cfg->cfg, os); });
}

seirdmon_status seirdmon_run_monitor(const seirdmon_config* cfg, seirdmon_log_fn log, void* user) {
    SEIRDMON_REQUIRE(cfg);
    return with_log(log, user, [&](std::ostream* os) { seirdmon::run_monitor(cfg->cfg, os); });
}

seirdmon_status seirdmon_run_report(const seirdmon_config* cfg, seirdmon_log_fn log, void* user,
                                    seirdmon_report* out) {
    SEIRDMON_REQUIRE(cfg);
    return with_log(log, user, [&](std::ostream* os) {
        const auto r = seirdmon::run_report(cfg->cfg, os);
        if (out) *out = {r.pseudo_r2, r.coverage, r.signal_days.size()};
    });
}

seirdmon_status seirdmon_filter_create(const seirdmon_config* cfg, seirdmon_filter** out) {
    SEIRDMON_REQUIRE(cfg);
    SEIRDMON_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        seirdmon::validate(cfg->cfg);
        *out = new seirdmon_filter{seirdmon::ParticleFilter(seirdmon::filter_config(cfg->cfg), cfg->cfg.init, 0), {}};
    });
}

void seirdmon_filter_destroy(seirdmon_filter* f) { delete f; }

seirdmon_status seirdmon_filter_step(seirdmon_filter* f, const seirdmon_observation* obs, double* ess) {
    SEIRDMON_REQUIRE(f);
    SEIRDMON_REQUIRE(obs);
    return guarded([&] {
        auto out = f->filter.step(seirdmon::Observation{obs->day, obs->infected, obs->recovered, obs->deaths});
        f->samples = std::move(out.posterior_samples);
        if (ess) *ess = out.ess;
    });
}

int64_t seirdmon_filter_day(const seirdmon_filter* f) { return f ? f->filter.cloud().day : -1; }

size_t seirdmon_filter_sample_count(const seirdmon_filter* f) { return f ? f->samples.size() : 0; }

seirdmon_status seirdmon_filter_samples(const seirdmon_filter* f, seirdmon_params* out, size_t capacity) {
    SEIRDMON_REQUIRE(f);
    if (capacity < f->samples.size()) return fail(SEIRDMON_ERR_BUFFER_TOO_SMALL, "sample buffer too small");
    if (!f->samples.empty()) SEIRDMON_REQUIRE(out);
    for (std::size_t j = 0; j < f->samples.size(); ++j) out[j] = to_c(f->samples[j]);
    g_last_error.clear();
    return SEIRDMON_OK;
}

seirdmon_status seirdmon_monitor_create(double lambda, double limit, seirdmon_monitor** out) {
    SEIRDMON_REQUIRE(out);
    *out = nullptr;
    return guarded([&] { *out = new seirdmon_monitor{seirdmon::MewmaMonitor(lambda, limit)}; });
}

void seirdmon_monitor_destroy(seirdmon_monitor* m) { delete m; }

seirdmon_status seirdmon_monitor_push(seirdmon_monitor* m, int64_t day, const seirdmon_params* samples, size_t count,
                                      int* has_record, double* t2, int* signaled) {
    SEIRDMON_REQUIRE(m);
    if (count > 0) SEIRDMON_REQUIRE(samples);
    return guarded([&] {
        std::vector<seirdmon::ParamVector> v(count);
        for (std::size_t j = 0; j < count; ++j) v[j] = to_cpp(samples[j]);
        const auto rec = m->monitor.push(day, v);
        if (has_record) *has_record = rec ? 1 : 0;
        if (t2) *t2 = rec ? rec->t2 : 0.0;
        if (signaled) *signaled = rec && rec->signaled ? 1 : 0;
    });
}

seirdmon_status seirdmon_chi_square_quantile(double p, double dof, double* out) {
    SEIRDMON_REQUIRE(out);
    return guarded([&] { *out = seirdmon::chi_square_quantile(p, dof); });
}

seirdmon_status seirdmon_r0(const seirdmon_params* p, double* out) {
    SEIRDMON_REQUIRE(p);
    SEIRDMON_REQUIRE(out);
    return guarded([&] { *out = seirdmon::compute_r0(to_cpp(*p)); });
}

seirdmon_status seirdmon_poisson_logpmf(int64_t k, double lambda, double* out) {
    SEIRDMON_REQUIRE(out);
    return guarded([&] { *out = seirdmon::poisson_logpmf(k, lambda); });
}

seirdmon_status seirdmon_integrate_day(const seirdmon_state* in, const seirdmon_params* p, int substeps,
                                       seirdmon_state* out) {
    SEIRDMON_REQUIRE(in);
    SEIRDMON_REQUIRE(p);
    SEIRDMON_REQUIRE(out);
    return guarded([&] {
        const seirdmon::StateVector x0{in->s, in->e, in->i, in->r, in->d};
        seirdmon::require_valid(x0);
        seirdmon::require_valid(to_cpp(*p));
        const auto x = seirdmon::integrate_day(x0, to_cpp(*p), substeps);
        *out = {x.s, x.e, x.i, x.r, x.d};
    });
}

}  // extern "C"
