#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "dense_chain.hpp"
#include "gcsim/engine.hpp"
#include "gcsim/errors.hpp"
#include "gcsim/oracle.hpp"
#include "gcsim/stats.hpp"
#include "scenario_builders.hpp"
#include "trace_replay.hpp"

using namespace gcsim;
using testsupport::must_validate;
using testsupport::ring_endogenous;
using testsupport::single_cell_exogenous;

namespace {

struct SampleStats {
    double mean = 0.0;
    double std_error = 0.0;
};

SampleStats sample_stats(const std::vector<double>& xs) {
    SampleStats s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
                  std::sqrt(static_cast<double>(xs.size()));
    return s;
}

std::vector<double> per_rep_metric(const std::vector<ReplicationResult>& runs, Metric m) {
    std::vector<double> out;
    for (const auto& r : runs) out.push_back(metric_value(r, m));
    return out;
}

} // namespace

TEST_CASE("event queue orders by time then seq") {
    EventQueue q;
    Event a;
    a.time = 1.0;
    q.schedule(a);
    Event b;
    b.time = 0.5;
    q.schedule(b);

    auto first = q.advance();
    REQUIRE(first.has_value());
    CHECK(first->time == 0.5);
    CHECK(q.now() == 0.5);
    auto second = q.advance();
    REQUIRE(second.has_value());
    CHECK(second->time == 1.0);
    CHECK_FALSE(q.advance().has_value());
}

TEST_CASE("event queue tie-breaks equal times by scheduling order") {
    EventQueue q;
    Event a;
    a.time = 2.0;
    a.cell = 7;
    q.schedule(a);
    Event b;
    b.time = 2.0;
    b.cell = 9;
    q.schedule(b);

    auto first = q.advance();
    auto second = q.advance();
    REQUIRE(first.has_value());
    REQUIRE(second.has_value());
    CHECK(first->cell == 7);
    CHECK(second->cell == 9);
    CHECK(first->seq < second->seq);
}

TEST_CASE("event queue round-trips a single event and rejects the past") {
    EventQueue q;
    Event e;
    e.time = 3.25;
    e.kind = EventKind::Completion;
    e.cell = 2;
    q.schedule(e);
    auto out = q.advance();
    REQUIRE(out.has_value());
    CHECK(out->time == 3.25);
    CHECK(out->kind == EventKind::Completion);
    CHECK(out->cell == 2);

    Event stale;
    stale.time = 1.0; // clock is now 3.25
    CHECK_THROWS_AS(q.schedule(stale), LogicError);
}

TEST_CASE("clock never decreases across advances") {
    EventQueue q;
    RngStream s(1, 0, StreamLabel::Lifecycle);
    for (int i = 0; i < 200; ++i) {
        Event e;
        e.time = 10.0 * s.uniform01();
        q.schedule(e);
    }
    double last = 0.0;
    while (auto e = q.advance()) {
        CHECK(e->time >= last);
        last = e->time;
    }
}

TEST_CASE("draw_exponential matches its mean and replays deterministically") {
    RngStream s(99, 3, StreamLabel::Lifecycle, 0);
    const int n = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = draw_exponential(s, 2.0);
        CHECK(d > 0.0);
        sum += d;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));

    RngStream a(5, 1, StreamLabel::Routing, 2), b(5, 1, StreamLabel::Routing, 2);
    for (int i = 0; i < 1000; ++i) CHECK(draw_exponential(a, 1.0) == draw_exponential(b, 1.0));

    RngStream c(5, 1, StreamLabel::Routing, 3); // different cell, different stream
    bool all_equal = true;
    RngStream a2(5, 1, StreamLabel::Routing, 2);
    for (int i = 0; i < 16; ++i)
        if (draw_exponential(a2, 1.0) != draw_exponential(c, 1.0)) all_equal = false;
    CHECK_FALSE(all_equal);

    CHECK_THROWS_AS(draw_exponential(a, 0.0), DomainError);
    CHECK_THROWS_AS(draw_exponential(a, -1.0), DomainError);
}

TEST_CASE("lifecycle splits between completion and handoff by the rate ratio") {
    RngStream s(7, 0, StreamLabel::Lifecycle);
    const int n = 1'000'000;

    SUBCASE("exogenous mode always completes in place") {
        for (int i = 0; i < 1000; ++i) {
            auto plan = plan_call_lifecycle(s, 1.0, 0.0, MobilityMode::Exogenous);
            CHECK_FALSE(plan.handoff);
            CHECK(plan.delay > 0.0);
        }
    }

    SUBCASE("equal rates hand off half the time") {
        int handoffs = 0;
        for (int i = 0; i < n; ++i)
            if (plan_call_lifecycle(s, 1.0, 1.0, MobilityMode::Endogenous).handoff) ++handoffs;
        CHECK(static_cast<double>(handoffs) / n == doctest::Approx(0.5).epsilon(0.005));
    }

    SUBCASE("dwell three times faster hands off three quarters of calls") {
        int handoffs = 0;
        for (int i = 0; i < n; ++i)
            if (plan_call_lifecycle(s, 1.0, 3.0, MobilityMode::Endogenous).handoff) ++handoffs;
        CHECK(static_cast<double>(handoffs) / n == doctest::Approx(0.75).epsilon(0.005));
    }

    SUBCASE("invalid rates raise DomainError") {
        CHECK_THROWS_AS(plan_call_lifecycle(s, 0.0, 1.0, MobilityMode::Exogenous), DomainError);
        CHECK_THROWS_AS(plan_call_lifecycle(s, 1.0, 0.0, MobilityMode::Endogenous), DomainError);
    }
}

TEST_CASE("route_handoff picks neighbors uniformly") {
    Topology ring = Topology::ring(6);
    RngStream s(11, 0, StreamLabel::Routing);
    const int n = 1'000'000;
    int to_1 = 0, to_5 = 0;
    for (int i = 0; i < n; ++i) {
        int target = route_handoff(ring, 0, s);
        if (target == 1)
            ++to_1;
        else if (target == 5)
            ++to_5;
        else
            FAIL("ring cell 0 routed to non-neighbor ", target);
    }
    CHECK(static_cast<double>(to_1) / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(static_cast<double>(to_5) / n == doctest::Approx(0.5).epsilon(0.01));

    Topology pair = Topology::ring(2);
    for (int i = 0; i < 100; ++i) CHECK(route_handoff(pair, 0, s) == 1);

    Topology isolated{2, {}};
    CHECK_THROWS_AS(route_handoff(isolated, 0, s), ConfigError);
}

TEST_CASE("zero traffic produces a zero result") {
    Scenario s = single_cell_exogenous(SchemeKind::Fca, 4, 0, 0, 0.0, 0.0, 1.0, 100.0, 10.0, 1, 1);
    ReplicationResult r = run_replication(must_validate(s), 0);
    CellCounts t = r.totals();
    CHECK(t.new_attempts == 0);
    CHECK(t.new_blocks == 0);
    CHECK(t.handoff_attempts == 0);
    CHECK(t.handoff_blocks == 0);
    CHECK(t.busy_time == 0.0);
}

TEST_CASE("single-channel loss system blocks half its arrivals") {
    // M/M/1/1 at one Erlang: blocking a/(1+a) = 0.5.
    Scenario s =
        single_cell_exogenous(SchemeKind::Fca, 1, 0, 0, 1.0, 0.0, 1.0, 20000.0, 2000.0, 10, 77);
    auto runs = run_replications(must_validate(s), 0);
    auto stats = sample_stats(per_rep_metric(runs, Metric::NewCallBlocking));
    CHECK(std::fabs(stats.mean - 0.5) <= 3.0 * stats.std_error);
}

TEST_CASE("replications are bit-reproducible and thread-count independent") {
    Scenario s = ring_endogenous(SchemeKind::DgcaCbs, 6, 8, 2, 1, 4.0, 1.0, 0.5, 300.0, 30.0, 4, 5);
    ValidatedScenario vs = must_validate(s);

    ReplicationResult once = run_replication(vs, 2);
    ReplicationResult again = run_replication(vs, 2);
    CHECK(once == again);

    auto serial = run_replications(vs, 1);
    auto parallel = run_replications(vs, 4);
    CHECK(serial == parallel);
}

TEST_CASE("two Poisson streams treated identically block identically (PASTA)") {
    Scenario s = single_cell_exogenous(SchemeKind::Fca, 4, 0, 0, 1.5, 1.5, 1.0, 10000.0, 1000.0,
                                       10, 1234);
    auto runs = run_replications(must_validate(s), 0);
    std::vector<double> diffs;
    for (const auto& r : runs) {
        diffs.push_back(metric_value(r, Metric::NewCallBlocking) -
                        metric_value(r, Metric::HandoffBlocking));
    }
    auto stats = sample_stats(diffs);
    CHECK(std::fabs(stats.mean) <= 3.0 * stats.std_error);
}

TEST_CASE("static guard simulation matches the cutoff chain") {
    const int S = 5, g = 1;
    const double lam_n = 2.0, lam_h = 1.0, mu = 1.0;
    Scenario s = single_cell_exogenous(SchemeKind::StaticGc, S, g, 0, lam_n, lam_h, mu, 5000.0,
                                       500.0, 10, 2024);
    auto runs = run_replications(must_validate(s), 0);

    ChainSpec spec{S, g, lam_n, lam_h, mu};
    BlockingPair predicted = blocking_probabilities(cutoff_steady_state(spec), spec);

    auto new_stats = sample_stats(per_rep_metric(runs, Metric::NewCallBlocking));
    auto handoff_stats = sample_stats(per_rep_metric(runs, Metric::HandoffBlocking));
    CHECK(std::fabs(new_stats.mean - predicted.new_call) <= 3.0 * new_stats.std_error);
    CHECK(std::fabs(handoff_stats.mean - predicted.handoff) <= 3.0 * handoff_stats.std_error);
}

TEST_CASE("result counters satisfy their structural bounds") {
    Scenario s = ring_endogenous(SchemeKind::StaticGc, 6, 6, 2, 0, 5.0, 1.0, 1.0, 500.0, 50.0, 3, 9);
    for (const auto& r : run_replications(must_validate(s), 0)) {
        CellCounts t = r.totals();
        CHECK(t.new_blocks <= t.new_attempts);
        CHECK(t.handoff_blocks <= t.handoff_attempts);
        CHECK(t.drops <= t.handoff_blocks);
        CHECK(t.admitted_new <= t.new_attempts);
        CHECK(t.busy_time >= 0.0);
        for (const CellCounts& c : r.cells) CHECK(c.drops <= c.admitted_new);
    }
}

TEST_CASE("trace replay reproduces counts and occupancy integrals") {
    // Endogenous ring under the borrowing scheme with an active controller,
    // so the trace exercises every event kind including guard changes.
    Scenario s = ring_endogenous(SchemeKind::DgcaCbs, 6, 5, 1, 1, 3.0, 1.0, 1.0, 200.0, 20.0, 1, 31);
    s.policy.guard_min = 0;
    s.policy.guard_max = 2;
    s.policy.adjust_period = 10.0;
    ValidatedScenario vs = must_validate(s);

    std::ostringstream trace;
    ReplicationResult engine_result = run_replication(vs, 0, &trace);
    auto replayed = testsupport::replay_trace(trace.str(), s);

    REQUIRE(replayed.cells.size() == engine_result.cells.size());
    for (std::size_t c = 0; c < replayed.cells.size(); ++c) {
        const CellCounts& got = engine_result.cells[c];
        const CellCounts& want = replayed.cells[c];
        CHECK(got.new_attempts == want.new_attempts);
        CHECK(got.new_blocks == want.new_blocks);
        CHECK(got.handoff_attempts == want.handoff_attempts);
        CHECK(got.handoff_blocks == want.handoff_blocks);
        CHECK(got.completions == want.completions);
        CHECK(got.drops == want.drops);
        CHECK(got.admitted_new == want.admitted_new);
        CHECK(got.busy_time == doctest::Approx(want.busy_time).epsilon(1e-6));
        CHECK(got.guard_busy_time ==
              doctest::Approx(want.guard_busy_time).epsilon(1e-6).scale(1.0));
        CHECK(got.guard_count_time == doctest::Approx(want.guard_count_time).epsilon(1e-6));
    }
}

TEST_CASE("controller trace records every tick with window readings") {
    Scenario s = single_cell_exogenous(SchemeKind::DynamicGc, 6, 0, 0, 4.0, 2.0, 1.0, 100.0, 0.0,
                                       1, 17);
    s.policy.guard_min = 0;
    s.policy.guard_max = 3;
    s.policy.adjust_period = 10.0;
    ReplicationResult r = run_replication(must_validate(s), 0);
    CHECK(r.guard_trace.size() == 10); // ticks at 10, 20, ..., 100
    for (const GuardAdjustment& g : r.guard_trace) {
        CHECK(g.guard_count >= s.policy.guard_min);
        CHECK(g.guard_count <= s.policy.guard_max);
        CHECK(g.window_guard_utilization >= 0.0);
        CHECK(g.window_guard_utilization <= 1.0);
    }
}

TEST_CASE("schemes without a controller schedule no ticks") {
    Scenario s = single_cell_exogenous(SchemeKind::StaticGc, 6, 2, 0, 4.0, 2.0, 1.0, 100.0, 0.0,
                                       1, 17);
    CHECK(run_replication(must_validate(s), 0).guard_trace.empty());
    s.scheme = SchemeKind::Fca;
    CHECK(run_replication(must_validate(s), 0).guard_trace.empty());
}
