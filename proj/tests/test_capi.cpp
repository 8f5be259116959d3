#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "apos.h"

namespace {

struct Session {
    apos_session* s = apos_session_new();
    ~Session() { apos_session_free(s); }
};

std::string take(char* out) {
    std::string text = out ? out : "";
    apos_string_free(out);
    return text;
}

}  // namespace

TEST_CASE("status codes and outputs") {
    Session session;
    char* out = nullptr;
    CHECK(apos_analyze(session.s, R"({"model": "spiral3"})", &out) == APOS_OK);
    const std::string first = take(out);
    CHECK(first.find("\"uniformly-asymptotically-positive\"") != std::string::npos);
    CHECK(std::string(apos_last_error(session.s)).empty());
    CHECK(apos_analyze(session.s, R"({"model": "spiral3"})", &out) == APOS_OK);
    CHECK(take(out) == first);

    CHECK(apos_analyze(session.s, R"({"model": "unknown"})", &out) == APOS_ERR_USAGE);
    CHECK(out == nullptr);
    CHECK(std::string(apos_last_error(session.s)).find("unknown") != std::string::npos);
    CHECK(apos_analyze(session.s, "not json", &out) == APOS_ERR_USAGE);

    CHECK(apos_simulate(session.s, R"({"model": "network_flow", "T": 1, "step": 0.5})", &out) == APOS_ERR_NUMERICAL);
    CHECK(take(out).find("\"numerical_failure\"") != std::string::npos);

    CHECK(apos_roots(session.s, R"({"function": "delay_char"})", &out) == APOS_OK);
    CHECK(take(out).find("\"count_by_argument\": 1") != std::string::npos);

    CHECK(apos_models(session.s, "{}", &out) == APOS_OK);
    CHECK(take(out).find("\"spiral3\"") != std::string::npos);

    CHECK(apos_certify(session.s, R"({"criteria": [11]})", &out) == APOS_OK);
    CHECK(take(out).find("\"all_passed\": true") != std::string::npos);

    CHECK(apos_analyze(nullptr, "{}", &out) == APOS_ERR_USAGE);
    CHECK(std::string(apos_version()) == "1.0.0");
}
