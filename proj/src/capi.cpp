#include "apos.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "apos/models.hpp"
#include "apos/report.hpp"

struct apos_session {
    std::string last_error;
};

namespace {

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

apos::Json parse_request(const char* text) {
    if (!text) throw apos::UsageError("request is null");
    try {
        return apos::Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw apos::UsageError(std::string("request is not valid JSON: ") + e.what());
    }
}

// Runs body, storing its output in *out and mapping exceptions to status
// codes. Numerical failures still produce an error report in *out.
template <class Body>
apos_status guarded(apos_session* session, char** out, Body body) {
    if (!session || !out) return APOS_ERR_USAGE;
    *out = nullptr;
    session->last_error.clear();
    try {
        std::string text;
        const apos_status status = body(text);
        *out = copy_string(text);
        return *out ? status : APOS_ERR_INTERNAL;
    } catch (const apos::UsageError& e) {
        session->last_error = e.what();
        return APOS_ERR_USAGE;
    } catch (const apos::NumericalFailure& e) {
        session->last_error = e.what();
        *out = copy_string(apos::format_json(apos::error_report("numerical_failure", e.what(), e.where(), e.value())));
        return APOS_ERR_NUMERICAL;
    } catch (const std::exception& e) {
        session->last_error = e.what();
        return APOS_ERR_INTERNAL;
    } catch (...) {
        session->last_error = "unknown error";
        return APOS_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

apos_session* apos_session_new(void) { return new (std::nothrow) apos_session(); }

void apos_session_free(apos_session* session) { delete session; }

const char* apos_last_error(const apos_session* session) { return session ? session->last_error.c_str() : "null session"; }

const char* apos_version(void) { return apos::kToolVersion; }

void apos_string_free(char* s) { std::free(s); }

apos_status apos_analyze(apos_session* session, const char* request_json, char** out_json) {
    return guarded(session, out_json, [&](std::string& text) {
        text = apos::format_json(apos::analyze(parse_request(request_json)));
        return APOS_OK;
    });
}

apos_status apos_simulate(apos_session* session, const char* request_json, char** out_csv) {
    return guarded(session, out_csv, [&](std::string& text) {
        text = apos::trace_to_csv(apos::simulate(parse_request(request_json)));
        return APOS_OK;
    });
}

apos_status apos_roots(apos_session* session, const char* request_json, char** out_json) {
    return guarded(session, out_json, [&](std::string& text) {
        text = apos::format_json(apos::roots(parse_request(request_json)));
        return APOS_OK;
    });
}

apos_status apos_models(apos_session* session, const char*, char** out_json) {
    return guarded(session, out_json, [&](std::string& text) {
        text = apos::format_json(apos::Json(apos::model_names()));
        return APOS_OK;
    });
}

apos_status apos_certify(apos_session* session, const char* request_json, char** out_json) {
    return guarded(session, out_json, [&](std::string& text) {
        const apos::Json request = parse_request(request_json);
        std::vector<apos::CriterionResult> results;
        if (request.contains("criteria")) {
            for (const apos::Json& id : request.at("criteria")) {
                if (!id.is_number_integer()) throw apos::UsageError("criteria must be integers");
                results.push_back(apos::run_criterion(id.get<int>()));
            }
        } else {
            const bool quick = request.contains("quick") && request.at("quick").is_boolean() && request.at("quick").get<bool>();
            results = apos::run_certification(quick);
        }
        const apos::Json report = apos::certify_report(results);
        text = apos::format_json(report);
        return report.at("all_passed").get<bool>() ? APOS_OK : APOS_ERR_FAILED_CRITERIA;
    });
}

}  // extern "C"
